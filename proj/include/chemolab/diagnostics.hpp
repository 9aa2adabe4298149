#pragma once

// Per-sample diagnostics: norms, extrema, the logarithmic energy functional
//
//   E(t) = int [ u - u* - u* ln(u/u*) ],   u* = r/mu,
//
// and a ledger of the trajectory inequalities the solver is expected to
// satisfy:
//
//   V_LOWER          min v >= delta0 * int u          (alpha = beta = 1)
//   VP_UPPER_p       int v^p <= (beta/alpha)^p int u^p,  p in {1,2,4}
//   MASS_UPPER       int u <= max{int u0, r |Omega| / mu}
//   V_DEV            int (v - v*)^2 <= (beta/alpha)^2 int (u - u*)^2
//   GRAD_V           int |grad v|^2 <= (beta^2 / 4 alpha) int (u - u*)^2
//   GRAD_V_REL       int |grad v|^2/v^2 <= (beta mu / 4r)(1/min v) int (u-u*)^2
//   ENERGY_SANDWICH  (mu/4r) int (u-u*)^2 <= E <= (mu/r) int (u-u*)^2,
//                    evaluated only while u is inside [u*/2, 2u*], where the
//                    integrand admits both quadratic bounds pointwise
//   V_FLOOR_ETA      min v >= (2r/mu) eta^(1/q) delta0 |Omega| for t >= t_late
//
// A ledger entry passes when slack = rhs - lhs >= -(1e-6 |rhs| + 1e-12):
// strictly below the O(h^2) discretization scale, safely above round-off.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chemolab/constants.hpp"
#include "chemolab/errors.hpp"
#include "chemolab/grid.hpp"
#include "chemolab/stepper.hpp"

namespace chemolab {

struct LedgerEntry {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool pass = false;

    LedgerEntry() = default;
    LedgerEntry(std::string n, double l, double r)
        : name(std::move(n)), lhs(l), rhs(r), slack(r - l) {
        pass = slack >= -(1e-6 * std::fabs(rhs) + 1e-12);
    }
};

struct DiagnosticsConfig {
    std::vector<double> p_list = {2.0, 4.0};
    double q = 0.5;
    double mass0 = 0.0;      // int u0, for the mass upper bound
    double t_late = 0.0;     // first time at which V_FLOOR_ETA is checked
    bool v_lower_enabled = true;  // harness enables it for alpha = beta = 1
};

struct DiagnosticsSample {
    double t = 0.0;
    double mass = 0.0;
    std::vector<std::pair<double, double>> lp;  // (p, int u^p)
    double lq = 0.0;                            // int u^q
    double min_u = 0.0, max_u = 0.0;
    double min_v = 0.0, max_v = 0.0;
    double grad_u_max = 0.0;
    double grad_v_l2sq = 0.0;
    std::optional<double> energy;  // undefined while min u <= 1e-14
    double dist_sup = 0.0;         // max |u - u*|
    double l2sq_dev = 0.0;         // int (u - u*)^2
    std::vector<LedgerEntry> ledger;

    double lp_value(double p) const {
        for (const auto& [pp, val] : lp)
            if (pp == p) return val;
        return std::numeric_limits<double>::quiet_NaN();
    }
};

/// E = int [u - u* - u* ln(u/u*)]; requires min u > 1e-14.  Nonnegative by
/// convexity of the integrand, which vanishes only at u = u*.
inline double energy(const ScalarField& u, double r, double mu) {
    if (!(r > 0.0) || !(mu > 0.0))
        throw InvalidInput("energy: r and mu must be positive");
    if (!(u.min() > 1e-14))
        throw UndefinedEnergy("energy: min u <= 1e-14, logarithm not representable");
    const double ustar = r / mu;
    double e = integrate_map(u, [&](double s) { return s - ustar - ustar * std::log(s / ustar); });
    return e < 0.0 ? 0.0 : e;  // shave quadrature round-off at the minimum
}

inline DiagnosticsSample sample(double t, const ScalarField& u, const ScalarField& v,
                                const Params& params, const ThresholdReport& thresholds,
                                const DiagnosticsConfig& cfg) {
    DiagnosticsSample s;
    s.t = t;
    s.mass = integrate(u);
    for (double p : cfg.p_list)
        s.lp.emplace_back(p, integrate_map(u, [&](double x) { return std::pow(x, p); }));
    s.lq = integrate_map(u, [&](double x) { return std::pow(x, cfg.q); });
    s.min_u = u.min();
    s.max_u = u.max();
    s.min_v = v.min();
    s.max_v = v.max();

    auto [gux, guy] = gradient_centered(u);
    for (std::size_t k = 0; k < gux.values.size(); ++k)
        s.grad_u_max = std::max(s.grad_u_max,
                                std::hypot(gux.values[k], guy.values[k]));
    auto [gvx, gvy] = gradient_centered(v);
    {
        ScalarField g2(v.grid);
        for (std::size_t k = 0; k < g2.values.size(); ++k)
            g2.values[k] = gvx.values[k] * gvx.values[k] + gvy.values[k] * gvy.values[k];
        s.grad_v_l2sq = integrate(g2);
    }

    const double ustar = params.steady_u();
    const double vstar = params.steady_v();
    s.dist_sup = std::max(std::fabs(s.max_u - ustar), std::fabs(s.min_u - ustar));
    s.l2sq_dev = integrate_map(u, [&](double x) { return (x - ustar) * (x - ustar); });
    if (s.min_u > 1e-14) s.energy = energy(u, params.r, params.mu);

    // --- inequality ledger ---
    if (cfg.v_lower_enabled)
        s.ledger.emplace_back("V_LOWER", thresholds.delta0 * s.mass, s.min_v);

    const double ba = params.beta / params.alpha;
    for (double p : {1.0, 2.0, 4.0}) {
        const double vp = integrate_map(v, [&](double x) { return std::pow(x, p); });
        const double up = integrate_map(u, [&](double x) { return std::pow(x, p); });
        s.ledger.emplace_back("VP_UPPER_p" + std::to_string(static_cast<int>(p)), vp,
                              std::pow(ba, p) * up);
    }

    s.ledger.emplace_back("MASS_UPPER", s.mass,
                          std::max(cfg.mass0, params.r * u.grid.area / params.mu));

    const double vdev = integrate_map(v, [&](double x) { return (x - vstar) * (x - vstar); });
    s.ledger.emplace_back("V_DEV", vdev, ba * ba * s.l2sq_dev);

    s.ledger.emplace_back("GRAD_V", s.grad_v_l2sq,
                          params.beta * params.beta / (4.0 * params.alpha) * s.l2sq_dev);

    if (s.min_v > 0.0) {
        ScalarField rel(v.grid);
        for (std::size_t k = 0; k < rel.values.size(); ++k) {
            const double g2 = gvx.values[k] * gvx.values[k] + gvy.values[k] * gvy.values[k];
            rel.values[k] = g2 / (v.values[k] * v.values[k]);
        }
        s.ledger.emplace_back("GRAD_V_REL", integrate(rel),
                              params.beta * params.mu / (4.0 * params.r) / s.min_v *
                                  s.l2sq_dev);
    }

    if (s.energy && s.min_u >= 0.5 * ustar && s.max_u <= 2.0 * ustar) {
        s.ledger.emplace_back("ENERGY_SANDWICH_LO",
                              params.mu / (4.0 * params.r) * s.l2sq_dev, *s.energy);
        s.ledger.emplace_back("ENERGY_SANDWICH_HI", *s.energy,
                              params.mu / params.r * s.l2sq_dev);
    }

    if (t >= cfg.t_late)
        s.ledger.emplace_back("V_FLOOR_ETA", thresholds.mu_tilde.v_floor, s.min_v);

    return s;
}

/// | (E(t) - E(t-dt))/dt - RHS | with
/// RHS = -(r/mu) int u^-2 |grad u|^2 + (r chi/mu) int (u^-1/v^lambda) grad u . grad v
///       - mu int (u - u*)^2,
/// assembled from centered gradients on the current fields; O(dt + h^2).
inline double energy_derivative_check(const ScalarField& u, const ScalarField& v,
                                      const Params& params, double e_prev, double e_curr,
                                      double dt) {
    if (!(dt > 0.0)) throw InvalidInput("energy_derivative_check: dt must be positive");
    if (!(u.min() > 1e-14))
        throw UndefinedEnergy("energy_derivative_check: min u <= 1e-14");
    auto [gux, guy] = gradient_centered(u);
    auto [gvx, gvy] = gradient_centered(v);
    ScalarField t1(u.grid), t2(u.grid);
    for (std::size_t k = 0; k < u.values.size(); ++k) {
        const double uu = u.values[k];
        const double gu2 = gux.values[k] * gux.values[k] + guy.values[k] * guy.values[k];
        t1.values[k] = gu2 / (uu * uu);
        t2.values[k] = (gux.values[k] * gvx.values[k] + guy.values[k] * gvy.values[k]) /
                       (uu * std::pow(v.values[k], params.lambda));
    }
    const double ustar = params.steady_u();
    const double dev2 = integrate_map(u, [&](double x) { return (x - ustar) * (x - ustar); });
    const double rhs = -params.r / params.mu * integrate(t1) +
                       params.r * params.chi / params.mu * integrate(t2) -
                       params.mu * dev2;
    return std::fabs((e_curr - e_prev) / dt - rhs);
}

/// Least-squares decay rate of ln y over the points with y in [lo, hi].
/// Returns the negated slope, so positive means decay.
inline double fit_decay_rate(const std::vector<std::pair<double, double>>& series,
                             double lo, double hi) {
    if (!(lo > 0.0) || !(hi >= lo))
        throw InvalidInput("fit_decay_rate: need 0 < lo <= hi");
    std::vector<std::pair<double, double>> pts;
    for (const auto& [t, y] : series)
        if (y >= lo && y <= hi) pts.emplace_back(t, std::log(y));
    if (pts.size() < 5)
        throw InsufficientData("fit_decay_rate: fewer than 5 points inside the window");
    double st = 0.0, sy = 0.0;
    for (const auto& [t, y] : pts) {
        st += t;
        sy += y;
    }
    const double tbar = st / pts.size(), ybar = sy / pts.size();
    double num = 0.0, den = 0.0;
    for (const auto& [t, y] : pts) {
        num += (t - tbar) * (y - ybar);
        den += (t - tbar) * (t - tbar);
    }
    if (!(den > 0.0))
        throw InsufficientData("fit_decay_rate: all in-window points share one time");
    return -num / den;
}

}  // namespace chemolab
