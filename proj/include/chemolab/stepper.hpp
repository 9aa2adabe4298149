#pragma once

// Positivity-preserving IMEX step for
//
//   u_t = Delta u - chi div(u v^(-lambda) grad v) + r u - mu u^2
//
// Diffusion and the quadratic sink are implicit (the sink linearized as
// -mu u^n u^(n+1)), advection and growth explicit with conservative upwind
// fluxes.  The implicit matrix I + dt mu diag(u^n) - dt Delta_h is an
// M-matrix, so the update stays nonnegative whenever the explicit part does,
// which holds under the advective outflow CFL condition enforced here.
//
// The driver adapts dt from that CFL limit, solves the signal equation each
// step, and terminates with a blow-up verdict when the density crosses u_cap,
// the signal crosses v_floor, or the required step collapses below dt_min
// (the two branches of the finite-time breakdown dichotomy, plus step
// collapse as its numerical shadow).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "chemolab/elliptic.hpp"
#include "chemolab/errors.hpp"
#include "chemolab/grid.hpp"

namespace chemolab {

/// All model and scheme parameters.
struct Params {
    double chi = 1.0;
    double r = 1.0;
    double mu = 1.0;
    double alpha = 1.0;
    double beta = 1.0;
    double lambda = 0.5;  // sensitivity exponent, in (0,1)

    Grid grid;

    double dt_init = 1e-3;
    double dt_min = 1e-9;
    double dt_max = 1e-1;
    double cfl_safety = 0.5;
    double t_end = 1.0;

    double u_cap = 1e8;
    double v_floor = 1e-12;

    EllipticConfig elliptic;

    double steady_u() const { return r / mu; }
    double steady_v() const { return beta * r / (alpha * mu); }

    void validate() const {
        // chi, r, mu may be zero: that switches the respective term off, which
        // the closed-form reference runs (pure logistic, pure diffusion) use.
        if (!(chi >= 0.0) || !(r >= 0.0) || !(mu >= 0.0) || !(alpha > 0.0) || !(beta > 0.0))
            throw InvalidInput("Params: need chi, r, mu >= 0 and alpha, beta > 0");
        if (!(lambda > 0.0) || !(lambda < 1.0))
            throw InvalidInput("Params: lambda must lie in (0,1)");
        if (!(dt_min > 0.0) || !(dt_min <= dt_init) || !(dt_init <= dt_max))
            throw InvalidInput("Params: need 0 < dt_min <= dt_init <= dt_max");
        if (!(cfl_safety > 0.0) || cfl_safety > 1.0)
            throw InvalidInput("Params: cfl_safety must lie in (0,1]");
        if (!(t_end > 0.0)) throw InvalidInput("Params: t_end must be positive");
        if (!(u_cap > 0.0) || !(v_floor > 0.0))
            throw InvalidInput("Params: u_cap and v_floor must be positive");
        if (grid.nx < 4) throw InvalidInput("Params: grid is not initialized");
        elliptic.validate();
    }
};

enum class RunStatus { Completed, BlowUpSuspected, SolverFailure };

inline const char* to_string(RunStatus s) {
    switch (s) {
        case RunStatus::Completed: return "Completed";
        case RunStatus::BlowUpSuspected: return "BlowUpSuspected";
        default: return "SolverFailure";
    }
}

struct RunOutcome {
    RunStatus status = RunStatus::Completed;
    std::string reason;
    double t_final = 0.0;
};

/// Face-normal chemotactic velocity w = chi * v^(-lambda) * grad v.
/// The face sensitivity uses the arithmetic mean of the adjacent cell values
/// of v raised to -lambda; boundary faces carry zero velocity.
/// lambda = 0 is admitted so the plain chi*grad(v) limit can be probed.
inline FaceField chemotactic_velocity(const ScalarField& v, double chi, double lambda) {
    if (!(lambda >= 0.0) || !(lambda < 1.0))
        throw InvalidInput("chemotactic_velocity: lambda must lie in [0,1)");
    if (!(v.min() > 0.0))
        throw SingularSensitivity("chemotactic_velocity: signal must be strictly positive");
    const Grid& g = v.grid;
    FaceField w(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const double vl = v.at(i - 1, j), vr = v.at(i, j);
            const double sens = lambda == 0.0 ? 1.0 : std::pow(0.5 * (vl + vr), -lambda);
            w.fx(i, j) = chi * sens * (vr - vl) / g.hx;
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double vl = v.at(i, j - 1), vr = v.at(i, j);
            const double sens = lambda == 0.0 ? 1.0 : std::pow(0.5 * (vl + vr), -lambda);
            w.fy(i, j) = chi * sens * (vr - vl) / g.hy;
        }
    return w;
}

namespace detail {

/// Conservative upwind divergence of the advective flux F = w u_upwind.
inline ScalarField upwind_divergence(const ScalarField& u, const FaceField& w) {
    const Grid& g = u.grid;
    auto flux = [](double vel, double up, double down) {
        return vel >= 0.0 ? vel * up : vel * down;
    };
    std::vector<double> fx(static_cast<std::size_t>(g.nx + 1) * g.ny, 0.0);
    std::vector<double> fy(static_cast<std::size_t>(g.nx) * (g.ny + 1), 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i)
            fx[static_cast<std::size_t>(j) * (g.nx + 1) + i] =
                flux(w.fx(i, j), u.at(i - 1, j), u.at(i, j));
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            fy[static_cast<std::size_t>(j) * g.nx + i] =
                flux(w.fy(i, j), u.at(i, j - 1), u.at(i, j));
    ScalarField out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double fe = fx[static_cast<std::size_t>(j) * (g.nx + 1) + i + 1];
            const double fw = fx[static_cast<std::size_t>(j) * (g.nx + 1) + i];
            const double fn = fy[static_cast<std::size_t>(j + 1) * g.nx + i];
            const double fs = fy[static_cast<std::size_t>(j) * g.nx + i];
            out.at(i, j) = (fe - fw) / g.hx + (fn - fs) / g.hy;
        }
    return out;
}

}  // namespace detail

/// Largest dt for which the explicit upwind part cannot create negatives:
/// dt * (total outflow rate of any cell) <= 1.  Infinity when w == 0.
inline double cfl_positivity_limit(const FaceField& w) {
    const Grid& g = w.grid;
    double worst = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double out = 0.0;
            out += std::max(w.fx(i + 1, j), 0.0) / g.hx;   // east outflow
            out += std::max(-w.fx(i, j), 0.0) / g.hx;      // west outflow
            out += std::max(w.fy(i, j + 1), 0.0) / g.hy;   // north outflow
            out += std::max(-w.fy(i, j), 0.0) / g.hy;      // south outflow
            worst = std::max(worst, out);
        }
    return worst > 0.0 ? 1.0 / worst : std::numeric_limits<double>::infinity();
}

/// One IMEX step.  Solves
///   (I + dt mu diag(u^n) - dt Delta_h) u^(n+1)
///       = u^n - dt D_upwind(u^n, w) + dt r u^n
/// with w = chemotactic_velocity(v).  Requires dt within the positivity CFL
/// limit and dt*r <= 1; the result is nonnegative and conserves the discrete
/// mass balance d/dt int u = r int u^n - mu int u^n u^(n+1) up to the inner
/// solver tolerance.
inline ScalarField imex_step(const ScalarField& u, const ScalarField& v,
                             const Params& p, double dt) {
    if (!(dt > 0.0)) throw InvalidInput("imex_step: dt must be positive");
    const Grid& g = u.grid;
    ScalarField un = detail::clamp_nonnegative(u, "imex_step");

    FaceField w = chemotactic_velocity(v, p.chi, p.lambda);
    const double dt_cfl = cfl_positivity_limit(w);
    if (dt > dt_cfl * (1.0 + 1e-12))
        throw CflViolation("imex_step: dt exceeds the advective positivity limit");
    if (dt * p.r > 1.0 + 1e-12)
        throw CflViolation("imex_step: dt*r exceeds 1");

    ScalarField div = detail::upwind_divergence(un, w);
    std::vector<double> b(g.cell_count());
    for (std::size_t k = 0; k < b.size(); ++k)
        b[k] = un.values[k] * (1.0 + dt * p.r) - dt * div.values[k];

    const double cx = dt / (g.hx * g.hx);
    const double cy = dt / (g.hy * g.hy);
    auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
        out.resize(x.size());
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const std::size_t k = g.idx(i, j);
                const double c = x[k];
                double acc = (1.0 + dt * p.mu * un.values[k]) * c;
                if (i > 0) acc += cx * (c - x[g.idx(i - 1, j)]);
                if (i < g.nx - 1) acc += cx * (c - x[g.idx(i + 1, j)]);
                if (j > 0) acc += cy * (c - x[g.idx(i, j - 1)]);
                if (j < g.ny - 1) acc += cy * (c - x[g.idx(i, j + 1)]);
                out[k] = acc;
            }
    };

    ScalarField unew = un;  // warm start: the step is a small correction
    auto run = detail::conjugate_gradient(apply, b, unew.values, 1e-12,
                                          40 * (g.nx + g.ny), 1e-13);
    if (!run.converged)
        throw NonConvergence("imex_step: inner conjugate-gradient solve did not converge");

    // The exact solution of the M-matrix system is nonnegative; shave the
    // iterate's round-off negatives.
    for (double& x : unew.values)
        if (x < 0.0) x = 0.0;
    unew.require_finite("imex_step");
    return unew;
}

/// Per-sample callback invoked at multiples of the sampling interval.
using Sampler = std::function<void(double t, const ScalarField& u, const ScalarField& v)>;

struct SimulationResult {
    RunOutcome outcome;
    ScalarField u;
    ScalarField v;
    long steps = 0;
};

/// Advance from u0 to t_end, adapting dt and sampling at multiples of `every`.
inline SimulationResult simulate(const ScalarField& u0, const Params& p,
                                 const Sampler& sampler, double every) {
    p.validate();
    if (!(every > 0.0)) throw InvalidInput("simulate: sampling interval must be positive");
    if (!u0.grid.same_layout(p.grid))
        throw InvalidInput("simulate: u0 grid does not match Params.grid");

    SimulationResult res;
    res.u = detail::clamp_nonnegative(u0, "simulate");
    if (!(integrate(res.u) > 0.0))
        throw InvalidInput("simulate: initial data must carry positive mass");

    auto blow_up = [&](const char* why, double t) {
        res.outcome = {RunStatus::BlowUpSuspected, why, t};
        return res;
    };

    try {
        res.v = solve_signal(res.u, p.alpha, p.beta, p.elliptic);
    } catch (const std::exception& e) {
        res.outcome = {RunStatus::SolverFailure, e.what(), 0.0};
        return res;
    }
    if (res.u.max() > p.u_cap) return blow_up("u_cap exceeded", 0.0);
    if (res.v.min() < p.v_floor) return blow_up("v_floor crossed", 0.0);

    double t = 0.0;
    long sample_index = 0;
    if (sampler) sampler(0.0, res.u, res.v);

    const double t_eps = 1e-12 * p.t_end;
    bool first_step = true;
    while (t < p.t_end - t_eps) {
        FaceField w = chemotactic_velocity(res.v, p.chi, p.lambda);
        double dt_req = std::min(p.cfl_safety * cfl_positivity_limit(w), p.dt_max);
        if (p.r > 0.0) dt_req = std::min(dt_req, 0.5 / p.r);
        if (first_step) dt_req = std::min(dt_req, p.dt_init);
        if (dt_req < p.dt_min) return blow_up("dt underflow", t);

        // land exactly on the next sampling instant / final time
        double t_target = std::min((sample_index + 1) * every, p.t_end);
        bool hits_target = false;
        double dt = dt_req;
        if (t + dt >= t_target - t_eps) {
            dt = t_target - t;
            hits_target = true;
        }

        try {
            res.u = imex_step(res.u, res.v, p, dt);
            res.v = solve_signal(res.u, p.alpha, p.beta, p.elliptic, &res.v);
        } catch (const std::exception& e) {
            res.outcome = {RunStatus::SolverFailure, e.what(), t};
            return res;
        }
        ++res.steps;
        first_step = false;
        t = hits_target ? t_target : t + dt;
        if (res.u.min() < 0.0) {
            res.outcome = {RunStatus::SolverFailure, "positivity lost", t};
            return res;
        }

        if (res.u.max() > p.u_cap) return blow_up("u_cap exceeded", t);
        if (res.v.min() < p.v_floor) return blow_up("v_floor crossed", t);

        if (hits_target) {
            if (t_target == (sample_index + 1) * every) ++sample_index;
            if (sampler) sampler(t, res.u, res.v);
        }
    }

    res.outcome = {RunStatus::Completed, "", t};
    return res;
}

}  // namespace chemolab
