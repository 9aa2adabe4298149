#pragma once

// Scenario and sweep configuration: a single flat JSON document per scenario
// (diff-friendly, trivially parseable anywhere), plus {base, axes} for sweeps.
// Unknown keys are rejected so typos surface as ConfigError instead of
// silently running the defaults.

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "chemolab/constants.hpp"
#include "chemolab/diagnostics.hpp"
#include "chemolab/errors.hpp"
#include "chemolab/stepper.hpp"

namespace chemolab {

using Json = nlohmann::ordered_json;

struct InitialData {
    enum class Kind { Constant, Perturbed, Random };
    Kind kind = Kind::Constant;
    double c = 1.0;
    double amplitude = 0.0;
    int kx = 1, ky = 0;          // perturbed-constant mode numbers
    std::uint64_t seed = 0;      // random-positive noise seed

    static const char* kind_name(Kind k) {
        switch (k) {
            case Kind::Constant: return "constant";
            case Kind::Perturbed: return "perturbed";
            default: return "random";
        }
    }
};

struct ScenarioConfig {
    Params params;

    // threshold-report inputs
    int n_dim = 2;
    double p = 2.0;
    double q = 0.5;
    double eta = 1.0;

    std::vector<double> p_list = {2.0, 4.0};
    InitialData initial;
    double sample_every = 0.25;
    double t_late = -1.0;  // < 0 -> t_end / 2

    enum class VLowerCheck { Auto, On, Off };
    VLowerCheck v_lower = VLowerCheck::Auto;

    double fit_lo_rel = 1e-20;  // decay-fit window, relative to the series max
    double fit_hi_rel = 1e-2;

    double effective_t_late() const {
        return t_late < 0.0 ? 0.5 * params.t_end : t_late;
    }

    bool v_lower_enabled() const {
        if (v_lower == VLowerCheck::On) return true;
        if (v_lower == VLowerCheck::Off) return false;
        return params.alpha == 1.0 && params.beta == 1.0;
    }

    ThresholdInputs threshold_inputs() const {
        ThresholdInputs in;
        in.n_dim = n_dim;
        in.p = p;
        in.q = q;
        in.lambda = params.lambda;
        in.chi = params.chi;
        in.alpha = params.alpha;
        in.beta = params.beta;
        in.r = params.r;
        in.mu = params.mu;
        in.eta = eta;
        in.lx = params.grid.lx;
        in.ly = params.grid.ly;
        return in;
    }

    void validate() const {
        params.validate();
        // diagnostics are anchored at the steady state (r/mu, beta r/(alpha mu))
        if (!(params.r > 0.0) || !(params.mu > 0.0))
            throw ConfigError("config: r and mu must be positive");
        if (n_dim < 2) throw ConfigError("config: n_dim must be >= 2");
        if (!(q > 0.0) || !(q < 1.0)) throw ConfigError("config: q must lie in (0,1)");
        if (!(eta > 0.0) || eta > 1.0) throw ConfigError("config: eta must lie in (0,1]");
        if (!(sample_every > 0.0)) throw ConfigError("config: sample_every must be positive");
        if (p_list.empty()) throw ConfigError("config: p_list must not be empty");
        if (!(fit_lo_rel > 0.0) || !(fit_hi_rel > fit_lo_rel) || fit_hi_rel > 1.0)
            throw ConfigError("config: need 0 < fit_lo_rel < fit_hi_rel <= 1");
        if (initial.c < 0.0) throw ConfigError("config: initial value c must be >= 0");
        if (initial.kind == InitialData::Kind::Constant && !(initial.c > 0.0))
            throw ConfigError("config: constant initial data must be positive");
        if (initial.kind == InitialData::Kind::Perturbed &&
            initial.c - std::fabs(initial.amplitude) < 0.0)
            throw ConfigError("config: perturbed initial data dips below zero");
    }
};

/// Construct the initial field.  Random data is a seeded uniform perturbation
/// in [-amplitude, amplitude] clamped at zero, so every run is reproducible.
inline ScalarField build_initial_field(const ScenarioConfig& cfg) {
    const Grid& g = cfg.params.grid;
    ScalarField u0(g);
    const InitialData& d = cfg.initial;
    switch (d.kind) {
        case InitialData::Kind::Constant:
            u0.assign([&](double, double) { return d.c; });
            break;
        case InitialData::Kind::Perturbed: {
            const double pi = std::acos(-1.0);
            u0.assign([&](double x, double y) {
                return d.c + d.amplitude * std::cos(d.kx * pi * x / g.lx) *
                                 std::cos(d.ky * pi * y / g.ly);
            });
            break;
        }
        case InitialData::Kind::Random: {
            std::mt19937_64 rng(d.seed);
            std::uniform_real_distribution<double> noise(-d.amplitude, d.amplitude);
            for (double& v : u0.values) v = std::max(0.0, d.c + noise(rng));
            break;
        }
    }
    if (u0.min() < 0.0) throw ConfigError("initial data violates u0 >= 0");
    if (!(integrate(u0) > 0.0)) throw ConfigError("initial data carries no mass");
    return u0;
}

namespace detail {

inline void reject_unknown_keys(const Json& j, const std::set<std::string>& known,
                                const char* what) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw ConfigError(std::string(what) + ": unknown key '" + it.key() + "'");
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("config: key '") + key + "' has the wrong type");
    }
}

}  // namespace detail

inline ScenarioConfig parse_scenario(const Json& j) {
    static const std::set<std::string> known = {
        "nx", "ny", "lx", "ly", "chi", "r", "mu", "alpha", "beta", "lambda",
        "dt_init", "dt_min", "dt_max", "cfl_safety", "t_end", "u_cap", "v_floor",
        "rel_tol", "max_iter", "n_dim", "p", "q", "eta", "p_list", "initial", "c",
        "amplitude", "kx", "ky", "seed", "sample_every", "t_late", "v_lower_check",
        "fit_lo_rel", "fit_hi_rel"};
    if (!j.is_object()) throw ConfigError("scenario config must be a JSON object");
    detail::reject_unknown_keys(j, known, "scenario config");

    using detail::get_or;
    ScenarioConfig cfg;
    try {
        const int nx = get_or(j, "nx", 64);
        const int ny = get_or(j, "ny", 64);
        const double lx = get_or(j, "lx", 1.0);
        const double ly = get_or(j, "ly", 1.0);
        cfg.params.grid = Grid(nx, ny, lx, ly);
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
    }

    cfg.params.chi = get_or(j, "chi", 1.0);
    cfg.params.r = get_or(j, "r", 1.0);
    cfg.params.mu = get_or(j, "mu", 1.0);
    cfg.params.alpha = get_or(j, "alpha", 1.0);
    cfg.params.beta = get_or(j, "beta", 1.0);
    cfg.params.lambda = get_or(j, "lambda", 0.5);
    cfg.params.dt_init = get_or(j, "dt_init", 1e-3);
    cfg.params.dt_min = get_or(j, "dt_min", 1e-9);
    cfg.params.dt_max = get_or(j, "dt_max", 1e-1);
    cfg.params.cfl_safety = get_or(j, "cfl_safety", 0.5);
    cfg.params.t_end = get_or(j, "t_end", 1.0);
    cfg.params.u_cap = get_or(j, "u_cap", 1e8);
    cfg.params.v_floor = get_or(j, "v_floor", 1e-12);
    cfg.params.elliptic.rel_tol = get_or(j, "rel_tol", 1e-10);
    cfg.params.elliptic.max_iter = get_or(j, "max_iter", 0);

    cfg.n_dim = get_or(j, "n_dim", 2);
    cfg.p = get_or(j, "p", 2.0);
    cfg.q = get_or(j, "q", 0.5);
    cfg.eta = get_or(j, "eta", 1.0);
    cfg.p_list = get_or(j, "p_list", std::vector<double>{2.0, 4.0});

    const std::string kind = get_or<std::string>(j, "initial", "constant");
    if (kind == "constant") cfg.initial.kind = InitialData::Kind::Constant;
    else if (kind == "perturbed") cfg.initial.kind = InitialData::Kind::Perturbed;
    else if (kind == "random") cfg.initial.kind = InitialData::Kind::Random;
    else throw ConfigError("config: initial must be constant|perturbed|random");
    cfg.initial.c = get_or(j, "c", 1.0);
    cfg.initial.amplitude = get_or(j, "amplitude", 0.0);
    cfg.initial.kx = get_or(j, "kx", 1);
    cfg.initial.ky = get_or(j, "ky", 0);
    if (cfg.initial.kind == InitialData::Kind::Random && !j.contains("seed"))
        throw ConfigError("config: random initial data requires a seed");
    cfg.initial.seed = get_or<std::uint64_t>(j, "seed", 0);

    cfg.sample_every = get_or(j, "sample_every", 0.25);
    cfg.t_late = get_or(j, "t_late", -1.0);

    const std::string vl = get_or<std::string>(j, "v_lower_check", "auto");
    if (vl == "auto") cfg.v_lower = ScenarioConfig::VLowerCheck::Auto;
    else if (vl == "on") cfg.v_lower = ScenarioConfig::VLowerCheck::On;
    else if (vl == "off") cfg.v_lower = ScenarioConfig::VLowerCheck::Off;
    else throw ConfigError("config: v_lower_check must be auto|on|off");

    cfg.fit_lo_rel = get_or(j, "fit_lo_rel", 1e-20);
    cfg.fit_hi_rel = get_or(j, "fit_hi_rel", 1e-2);

    try {
        cfg.validate();
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

inline Json scenario_to_json(const ScenarioConfig& cfg) {
    Json j;
    j["nx"] = cfg.params.grid.nx;
    j["ny"] = cfg.params.grid.ny;
    j["lx"] = cfg.params.grid.lx;
    j["ly"] = cfg.params.grid.ly;
    j["chi"] = cfg.params.chi;
    j["r"] = cfg.params.r;
    j["mu"] = cfg.params.mu;
    j["alpha"] = cfg.params.alpha;
    j["beta"] = cfg.params.beta;
    j["lambda"] = cfg.params.lambda;
    j["dt_init"] = cfg.params.dt_init;
    j["dt_min"] = cfg.params.dt_min;
    j["dt_max"] = cfg.params.dt_max;
    j["cfl_safety"] = cfg.params.cfl_safety;
    j["t_end"] = cfg.params.t_end;
    j["u_cap"] = cfg.params.u_cap;
    j["v_floor"] = cfg.params.v_floor;
    j["rel_tol"] = cfg.params.elliptic.rel_tol;
    j["max_iter"] = cfg.params.elliptic.max_iter;
    j["n_dim"] = cfg.n_dim;
    j["p"] = cfg.p;
    j["q"] = cfg.q;
    j["eta"] = cfg.eta;
    j["p_list"] = cfg.p_list;
    j["initial"] = InitialData::kind_name(cfg.initial.kind);
    j["c"] = cfg.initial.c;
    j["amplitude"] = cfg.initial.amplitude;
    j["kx"] = cfg.initial.kx;
    j["ky"] = cfg.initial.ky;
    j["seed"] = cfg.initial.seed;
    j["sample_every"] = cfg.sample_every;
    j["t_late"] = cfg.t_late;
    j["v_lower_check"] = cfg.v_lower == ScenarioConfig::VLowerCheck::Auto ? "auto"
                         : cfg.v_lower == ScenarioConfig::VLowerCheck::On ? "on"
                                                                          : "off";
    j["fit_lo_rel"] = cfg.fit_lo_rel;
    j["fit_hi_rel"] = cfg.fit_hi_rel;
    return j;
}

struct SweepAxis {
    std::string name;  // one of mu, chi, lambda
    std::vector<double> values;
};

struct SweepConfig {
    ScenarioConfig base;
    std::vector<SweepAxis> axes;
    int parallelism = 1;

    std::size_t cell_count() const {
        std::size_t n = 1;
        for (const auto& a : axes) n *= a.values.size();
        return n;
    }
};

inline SweepConfig parse_sweep(const Json& j) {
    if (!j.is_object()) throw ConfigError("sweep config must be a JSON object");
    detail::reject_unknown_keys(j, {"base", "axes", "parallelism"}, "sweep config");
    if (!j.contains("base") || !j.contains("axes"))
        throw ConfigError("sweep config requires 'base' and 'axes'");

    SweepConfig cfg;
    cfg.base = parse_scenario(j.at("base"));
    cfg.parallelism = detail::get_or(j, "parallelism", 1);
    if (cfg.parallelism < 1) throw ConfigError("sweep: parallelism must be >= 1");

    if (!j.at("axes").is_array()) throw ConfigError("sweep: axes must be an array");
    for (const auto& a : j.at("axes")) {
        detail::reject_unknown_keys(a, {"param", "values"}, "sweep axis");
        SweepAxis axis;
        axis.name = detail::get_or<std::string>(a, "param", "");
        if (axis.name != "mu" && axis.name != "chi" && axis.name != "lambda")
            throw ConfigError("sweep: axis param must be one of mu, chi, lambda");
        axis.values = detail::get_or(a, "values", std::vector<double>{});
        if (axis.values.empty()) throw ConfigError("sweep: axis has no values");
        for (double v : axis.values) {
            if (!std::isfinite(v)) throw ConfigError("sweep: axis value not finite");
            if (axis.name == "lambda" && !(v > 0.0 && v < 1.0))
                throw ConfigError("sweep: lambda values must lie in (0,1)");
            if (axis.name == "mu" && !(v > 0.0))
                throw ConfigError("sweep: mu values must be positive");
            if (axis.name == "chi" && !(v >= 0.0))
                throw ConfigError("sweep: chi values must be >= 0");
        }
        cfg.axes.push_back(std::move(axis));
    }
    if (cfg.axes.empty()) throw ConfigError("sweep: at least one axis is required");
    return cfg;
}

}  // namespace chemolab
