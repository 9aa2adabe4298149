#pragma once

// Scenario orchestration: drive the stepper with the diagnostics sampler,
// persist timeseries.csv / ledger.csv / summary.json per run, and fan a
// Cartesian parameter sweep out over a small thread pool (runs share
// nothing; each cell owns its output directory).

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "chemolab/config.hpp"
#include "chemolab/constants.hpp"
#include "chemolab/diagnostics.hpp"
#include "chemolab/errors.hpp"
#include "chemolab/oracles.hpp"
#include "chemolab/stepper.hpp"

namespace chemolab {

namespace detail {

/// Shortest exact decimal form, identical across runs on one platform.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

inline Json threshold_report_json(const ThresholdReport& rep) {
    auto put = [](Json& j, const char* key, const ThresholdValue& tv) {
        if (tv.defined()) {
            j[key] = *tv.value;
        } else {
            j[key] = nullptr;
            j[std::string(key) + "_error"] = tv.error;
        }
    };
    Json j;
    j["n_dim"] = rep.in.n_dim;
    j["p"] = rep.in.p;
    j["q"] = rep.in.q;
    j["lambda"] = rep.in.lambda;
    j["chi"] = rep.in.chi;
    j["alpha"] = rep.in.alpha;
    j["beta"] = rep.in.beta;
    j["r"] = rep.in.r;
    j["mu"] = rep.in.mu;
    j["eta"] = rep.in.eta;
    j["lx"] = rep.in.lx;
    j["ly"] = rep.in.ly;
    j["area"] = rep.area;
    j["diam"] = rep.diam;
    j["delta0"] = rep.delta0;
    put(j, "mu1_star", rep.mu1);
    put(j, "mu2_star", rep.mu2);
    put(j, "mu3_star", rep.mu3);
    put(j, "mu4_star", rep.mu4);
    j["mu4_branch"] = rep.mu4_branch;
    j["mu_tilde"] = rep.mu_tilde.value;
    j["mu_tilde_branch"] = rep.mu_tilde.branch;
    j["mu_minus_mu_tilde"] = rep.mu_tilde.mu_minus;
    j["decay_positive"] = rep.mu_tilde.decay_positive;
    j["v_floor_eta"] = rep.mu_tilde.v_floor;
    j["rate_energy"] = rep.rate_energy;
    j["rate_sup"] = rep.rate_sup;
    Json cond;
    cond["mu_gt_mu1"] = rep.cond_mu1;
    cond["mu_gt_mu2"] = rep.cond_mu2;
    cond["mu_gt_mu3_gt_mu2"] = rep.cond_mu3;
    cond["mu_gt_max_mu3_mu4"] = rep.cond_mu3_mu4;
    j["conditions"] = cond;
    return j;
}

/// Evaluate and print the threshold report as JSON.
inline ThresholdReport report_thresholds(const ThresholdInputs& in, std::ostream& os) {
    ThresholdReport rep = evaluate_thresholds(in);
    os << threshold_report_json(rep).dump(2) << "\n";
    return rep;
}

struct ScenarioResult {
    RunOutcome outcome;
    std::vector<DiagnosticsSample> samples;
    ThresholdReport thresholds;
    std::optional<double> fitted_l2sq;
    std::optional<double> fitted_energy;
    Json summary;
};

namespace detail {

inline void write_timeseries_csv(const std::filesystem::path& path,
                                 const std::vector<DiagnosticsSample>& samples) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path.string());
    os << "t,mass,lp2,lp4,lq,min_u,max_u,min_v,max_v,grad_u_max,grad_v_l2sq,"
          "energy,dist_sup,l2sq_dev\n";
    for (const auto& s : samples) {
        os << fmt(s.t) << ',' << fmt(s.mass) << ',' << fmt(s.lp_value(2.0)) << ','
           << fmt(s.lp_value(4.0)) << ',' << fmt(s.lq) << ',' << fmt(s.min_u) << ','
           << fmt(s.max_u) << ',' << fmt(s.min_v) << ',' << fmt(s.max_v) << ','
           << fmt(s.grad_u_max) << ',' << fmt(s.grad_v_l2sq) << ','
           << (s.energy ? fmt(*s.energy) : std::string{}) << ',' << fmt(s.dist_sup)
           << ',' << fmt(s.l2sq_dev) << '\n';
    }
    if (!os) throw IoError("failed writing " + path.string());
}

inline void write_ledger_csv(const std::filesystem::path& path,
                             const std::vector<DiagnosticsSample>& samples) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path.string());
    os << "t,name,lhs,rhs,slack,pass\n";
    for (const auto& s : samples)
        for (const auto& e : s.ledger)
            os << fmt(s.t) << ',' << e.name << ',' << fmt(e.lhs) << ',' << fmt(e.rhs)
               << ',' << fmt(e.slack) << ',' << (e.pass ? "true" : "false") << '\n';
    if (!os) throw IoError("failed writing " + path.string());
}

inline std::optional<double> try_fit(const std::vector<std::pair<double, double>>& series,
                                     double lo_rel, double hi_rel) {
    double ymax = 0.0;
    for (const auto& [t, y] : series) ymax = std::max(ymax, y);
    if (!(ymax > 0.0)) return std::nullopt;
    try {
        return fit_decay_rate(series, lo_rel * ymax, hi_rel * ymax);
    } catch (const InsufficientData&) {
        return std::nullopt;
    }
}

}  // namespace detail

/// Run one scenario and persist its outputs under out_dir.
/// Solver failures are recorded in the summary instead of escaping.
inline ScenarioResult run_scenario(const ScenarioConfig& cfg,
                                   const std::filesystem::path& out_dir) {
    cfg.validate();
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir.string());

    ScenarioResult res;
    res.thresholds = evaluate_thresholds(cfg.threshold_inputs());

    ScalarField u0 = build_initial_field(cfg);

    DiagnosticsConfig diag;
    diag.p_list = cfg.p_list;
    // the timeseries schema always carries the lp2 and lp4 columns
    for (double p : {2.0, 4.0})
        if (std::find(diag.p_list.begin(), diag.p_list.end(), p) == diag.p_list.end())
            diag.p_list.push_back(p);
    diag.q = cfg.q;
    diag.mass0 = integrate(u0);
    diag.t_late = cfg.effective_t_late();
    diag.v_lower_enabled = cfg.v_lower_enabled();

    Sampler sampler = [&](double t, const ScalarField& u, const ScalarField& v) {
        res.samples.push_back(sample(t, u, v, cfg.params, res.thresholds, diag));
    };

    try {
        SimulationResult sim = simulate(u0, cfg.params, sampler, cfg.sample_every);
        res.outcome = sim.outcome;
    } catch (const std::exception& e) {
        // a failed run is a result, not a crash: record it and keep going
        res.outcome = {RunStatus::SolverFailure, e.what(), 0.0};
    }

    // tail statistics over the last quarter of the sampled window
    double tail_mass_min = 0.0, tail_lp2_max = 0.0, tail_min_v = 0.0,
           dist_sup_final = 0.0;
    if (!res.samples.empty()) {
        const double t0 = res.samples.front().t, t1 = res.samples.back().t;
        const double cut = t0 + 0.75 * (t1 - t0);
        bool first = true;
        for (const auto& s : res.samples) {
            if (s.t < cut) continue;
            if (first) {
                tail_mass_min = s.mass;
                tail_lp2_max = s.lp_value(2.0);
                tail_min_v = s.min_v;
                first = false;
            } else {
                tail_mass_min = std::min(tail_mass_min, s.mass);
                tail_lp2_max = std::max(tail_lp2_max, s.lp_value(2.0));
                tail_min_v = std::min(tail_min_v, s.min_v);
            }
        }
        dist_sup_final = res.samples.back().dist_sup;
    }

    std::vector<std::pair<double, double>> l2sq_series, energy_series;
    for (const auto& s : res.samples) {
        l2sq_series.emplace_back(s.t, s.l2sq_dev);
        if (s.energy) energy_series.emplace_back(s.t, *s.energy);
    }
    res.fitted_l2sq = detail::try_fit(l2sq_series, cfg.fit_lo_rel, cfg.fit_hi_rel);
    res.fitted_energy = detail::try_fit(energy_series, cfg.fit_lo_rel, cfg.fit_hi_rel);

    Json summary;
    summary["params"] = scenario_to_json(cfg);
    summary["thresholds"] = threshold_report_json(res.thresholds);
    summary["outcome"] = {{"status", to_string(res.outcome.status)},
                          {"reason", res.outcome.reason},
                          {"t_final", res.outcome.t_final}};
    summary["tail"] = {{"mass_min", tail_mass_min},
                       {"lp2_max", tail_lp2_max},
                       {"min_v_min", tail_min_v},
                       {"dist_sup_final", dist_sup_final}};
    Json rates;
    rates["fitted_l2sq"] = res.fitted_l2sq ? Json(*res.fitted_l2sq) : Json(nullptr);
    rates["fitted_energy"] = res.fitted_energy ? Json(*res.fitted_energy) : Json(nullptr);
    rates["predicted_energy"] = res.thresholds.rate_energy;
    rates["predicted_sup"] = res.thresholds.rate_sup;
    summary["rates"] = rates;
    res.summary = summary;

    detail::write_timeseries_csv(out_dir / "timeseries.csv", res.samples);
    detail::write_ledger_csv(out_dir / "ledger.csv", res.samples);
    {
        std::ofstream os(out_dir / "summary.json");
        if (!os) throw IoError("cannot open " + (out_dir / "summary.json").string());
        os << summary.dump(2) << "\n";
        if (!os) throw IoError("failed writing summary.json");
    }
    return res;
}

struct SweepRow {
    std::size_t index = 0;
    double mu = 0.0, chi = 0.0, lambda = 0.0;
    bool cond_mu1 = false, cond_mu2 = false, cond_mu3 = false, cond_mu3_mu4 = false;
    std::string status;
    std::string reason;
    double t_final = 0.0;
    double tail_mass_min = 0.0, tail_lp2_max = 0.0, tail_min_v_min = 0.0,
           dist_sup_final = 0.0;
    std::optional<double> fitted_l2sq, fitted_energy;
    double predicted_energy = 0.0, predicted_sup = 0.0;
};

inline int sweep_thread_cap() {
    if (const char* env = std::getenv("CHEMO_LAB_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) return cap;
    }
    return std::numeric_limits<int>::max();
}

/// Execute the Cartesian product of the sweep axes; each cell runs
/// run_scenario into its own subdirectory.  A failing cell is recorded in its
/// row and never blocks the others.
inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg,
                                       const std::filesystem::path& out_dir,
                                       int parallel_override = 0) {
    cfg.base.validate();
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir.string());

    const std::size_t cells = cfg.cell_count();
    std::vector<SweepRow> rows(cells);

    // index runs over the Cartesian product with the last axis fastest
    auto cell_config = [&](std::size_t index) {
        ScenarioConfig sc = cfg.base;
        std::size_t rest = index;
        for (auto it = cfg.axes.rbegin(); it != cfg.axes.rend(); ++it) {
            const std::size_t k = rest % it->values.size();
            rest /= it->values.size();
            const double v = it->values[k];
            if (it->name == "mu") sc.params.mu = v;
            else if (it->name == "chi") sc.params.chi = v;
            else sc.params.lambda = v;
        }
        char buf[32];
        std::snprintf(buf, sizeof(buf), "cell_%04zu", index);
        return std::pair<ScenarioConfig, std::string>(sc, buf);
    };

    auto run_cell = [&](std::size_t index) {
        auto [sc, name] = cell_config(index);
        SweepRow row;
        row.index = index;
        row.mu = sc.params.mu;
        row.chi = sc.params.chi;
        row.lambda = sc.params.lambda;
        try {
            ScenarioResult r = run_scenario(sc, out_dir / name);
            row.cond_mu1 = r.thresholds.cond_mu1;
            row.cond_mu2 = r.thresholds.cond_mu2;
            row.cond_mu3 = r.thresholds.cond_mu3;
            row.cond_mu3_mu4 = r.thresholds.cond_mu3_mu4;
            row.status = to_string(r.outcome.status);
            row.reason = r.outcome.reason;
            row.t_final = r.outcome.t_final;
            row.tail_mass_min = r.summary["tail"]["mass_min"].get<double>();
            row.tail_lp2_max = r.summary["tail"]["lp2_max"].get<double>();
            row.tail_min_v_min = r.summary["tail"]["min_v_min"].get<double>();
            row.dist_sup_final = r.summary["tail"]["dist_sup_final"].get<double>();
            row.fitted_l2sq = r.fitted_l2sq;
            row.fitted_energy = r.fitted_energy;
            row.predicted_energy = r.thresholds.rate_energy;
            row.predicted_sup = r.thresholds.rate_sup;
        } catch (const std::exception& e) {
            row.status = "SolverFailure";
            row.reason = e.what();
        }
        rows[index] = std::move(row);
    };

    int workers = cfg.parallelism;
    if (parallel_override > 0) workers = parallel_override;
    workers = std::min<int>({workers, sweep_thread_cap(), static_cast<int>(cells)});
    workers = std::max(workers, 1);

    if (workers == 1) {
        for (std::size_t i = 0; i < cells; ++i) run_cell(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < cells; i = next.fetch_add(1))
                    run_cell(i);
            });
        for (auto& th : pool) th.join();
    }

    std::ofstream os(out_dir / "sweep.csv");
    if (!os) throw IoError("cannot open " + (out_dir / "sweep.csv").string());
    os << "index,mu,chi,lambda,cond_mu1,cond_mu2,cond_mu3,cond_mu3_mu4,status,reason,"
          "t_final,tail_mass_min,tail_lp2_max,tail_min_v_min,dist_sup_final,"
          "fitted_l2sq,fitted_energy,predicted_energy,predicted_sup\n";
    auto opt = [](const std::optional<double>& v) {
        return v ? detail::fmt(*v) : std::string{};
    };
    for (const auto& r : rows) {
        os << r.index << ',' << detail::fmt(r.mu) << ',' << detail::fmt(r.chi) << ','
           << detail::fmt(r.lambda) << ',' << (r.cond_mu1 ? "true" : "false") << ','
           << (r.cond_mu2 ? "true" : "false") << ',' << (r.cond_mu3 ? "true" : "false")
           << ',' << (r.cond_mu3_mu4 ? "true" : "false") << ',' << r.status << ",\""
           << r.reason << "\"," << detail::fmt(r.t_final) << ','
           << detail::fmt(r.tail_mass_min) << ',' << detail::fmt(r.tail_lp2_max) << ','
           << detail::fmt(r.tail_min_v_min) << ',' << detail::fmt(r.dist_sup_final)
           << ',' << opt(r.fitted_l2sq) << ',' << opt(r.fitted_energy) << ','
           << detail::fmt(r.predicted_energy) << ',' << detail::fmt(r.predicted_sup)
           << '\n';
    }
    if (!os) throw IoError("failed writing sweep.csv");
    return rows;
}

}  // namespace chemolab
