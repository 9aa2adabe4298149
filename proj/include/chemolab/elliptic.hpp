#pragma once

// Signal equation solve: 0 = Delta v - alpha v + beta u with homogeneous
// Neumann data, i.e. v = beta (alpha I - Delta)^(-1) u.  The discrete
// operator is symmetric positive definite (the Neumann Laplacian is negative
// semidefinite), so plain conjugate gradients converge; each time step warm
// starts from the previous signal field.

#include <cmath>
#include <cstddef>
#include <vector>

#include "chemolab/errors.hpp"
#include "chemolab/grid.hpp"

namespace chemolab {

struct EllipticConfig {
    double rel_tol = 1e-10;  // residual 2-norm relative to the right-hand side
    int max_iter = 0;        // 0 -> 10*(nx+ny)

    void validate() const {
        if (!(rel_tol > 0.0) || rel_tol > 1e-2)
            throw InvalidInput("EllipticConfig: rel_tol must lie in (0, 1e-2]");
        if (max_iter < 0)
            throw InvalidInput("EllipticConfig: max_iter must be >= 1 (or 0 for default)");
    }

    int iter_budget(const Grid& g) const {
        return max_iter > 0 ? max_iter : 10 * (g.nx + g.ny);
    }
};

/// (alpha I - Delta_h) f.  Symmetric and coercive: <f,Af> >= alpha <f,f>.
inline ScalarField apply_helmholtz(const ScalarField& f, double alpha) {
    if (!(alpha > 0.0)) throw InvalidInput("apply_helmholtz: alpha must be positive");
    ScalarField lap = laplacian_neumann(f);
    ScalarField out(f.grid);
    for (std::size_t k = 0; k < out.values.size(); ++k)
        out.values[k] = alpha * f.values[k] - lap.values[k];
    return out;
}

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    long double s = 0.0L;
    for (std::size_t k = 0; k < a.size(); ++k)
        s += static_cast<long double>(a[k]) * b[k];
    return static_cast<double>(s);
}

inline double sum(const std::vector<double>& a) {
    long double s = 0.0L;
    for (double v : a) s += v;
    return static_cast<double>(s);
}

inline double sum_abs(const std::vector<double>& a) {
    long double s = 0.0L;
    for (double v : a) s += std::fabs(v);
    return static_cast<double>(s);
}

struct CgResult {
    int iterations = 0;
    bool converged = false;
    double rel_residual = 0.0;
};

/// Conjugate gradients for an SPD operator given as apply(x, out).
/// Stops when ||r||_2 <= rel_tol*||b||_2 and, if mean_tol > 0, additionally
/// |sum r| <= mean_tol * sum|b|.  The mean criterion pins the constant mode,
/// which carries the discrete mass balance of the implicit steps.
template <class Apply>
CgResult conjugate_gradient(const Apply& apply, const std::vector<double>& b,
                            std::vector<double>& x, double rel_tol, int max_iter,
                            double mean_tol = 0.0) {
    const std::size_t n = b.size();
    const double bnorm = std::sqrt(dot(b, b));
    CgResult res;
    if (bnorm == 0.0) {
        x.assign(n, 0.0);
        res.converged = true;
        return res;
    }
    const double babs = mean_tol > 0.0 ? sum_abs(b) : 0.0;

    std::vector<double> r(n), p(n), ap(n);
    apply(x, ap);
    for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - ap[k];
    p = r;
    double rr = dot(r, r);

    auto satisfied = [&]() {
        if (std::sqrt(rr) > rel_tol * bnorm) return false;
        if (mean_tol > 0.0 && std::fabs(sum(r)) > mean_tol * babs) return false;
        return true;
    };

    // the recursive residual can drift from b - Ax, so convergence is only
    // accepted after a true-residual refresh (which also restarts the search
    // direction if the refreshed residual fails the test)
    bool fresh = false;
    for (int it = 0; it <= max_iter; ++it) {
        if (satisfied()) {
            if (!fresh) {
                apply(x, ap);
                for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - ap[k];
                rr = dot(r, r);
                fresh = true;
                if (satisfied()) {
                    res.converged = true;
                    break;
                }
                p = r;
            } else {
                res.converged = true;
                break;
            }
        }
        if (it == max_iter) break;
        apply(p, ap);
        const double pap = dot(p, ap);
        if (!(pap > 0.0)) break;  // operator lost definiteness: give up
        const double step = rr / pap;
        for (std::size_t k = 0; k < n; ++k) {
            x[k] += step * p[k];
            r[k] -= step * ap[k];
        }
        const double rr_new = dot(r, r);
        const double dir = rr_new / rr;
        for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + dir * p[k];
        rr = rr_new;
        res.iterations = it + 1;
        fresh = false;
    }
    res.rel_residual = std::sqrt(rr) / bnorm;
    return res;
}

/// Clamp round-off negatives (>= -1e-13 * scale) to zero; reject worse.
inline ScalarField clamp_nonnegative(const ScalarField& u, const char* who) {
    const double scale = std::max(1.0, u.max_abs());
    ScalarField out = u;
    for (double& v : out.values) {
        if (v < 0.0) {
            if (v < -1e-13 * scale)
                throw InvalidInput(std::string(who) + ": input has negative entries beyond round-off");
            v = 0.0;
        }
    }
    return out;
}

}  // namespace detail

/// Solve (alpha I - Delta_h) v = beta u for u >= 0 with positive mass.
/// Postconditions: relative residual <= cfg.rel_tol, v > 0 everywhere
/// (M-matrix maximum principle), alpha*integrate(v) = beta*integrate(u)
/// up to the residual tolerance.
inline ScalarField solve_signal(const ScalarField& u, double alpha, double beta,
                                const EllipticConfig& cfg = {},
                                const ScalarField* warm_start = nullptr) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw InvalidInput("solve_signal: alpha and beta must be positive");
    cfg.validate();
    u.require_finite("solve_signal");

    ScalarField uc = detail::clamp_nonnegative(u, "solve_signal");
    if (!(integrate(uc) > 0.0))
        throw InvalidInput("solve_signal: integrate(u) must be positive");

    const Grid& g = uc.grid;
    std::vector<double> b(uc.values);
    for (double& v : b) v *= beta;

    ScalarField v = (warm_start && warm_start->grid.same_layout(g)) ? *warm_start
                                                                    : ScalarField(g, 0.0);
    auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
        ScalarField xf(g, x);
        ScalarField ax = apply_helmholtz(xf, alpha);
        out = std::move(ax.values);
    };

    const int budget = cfg.iter_budget(g);
    auto run = detail::conjugate_gradient(apply, b, v.values, cfg.rel_tol, budget);
    if (!run.converged)
        throw NonConvergence("solve_signal: conjugate gradients exhausted its iteration budget");

    // The exact discrete solution is strictly positive; a nonpositive minimum
    // can only come from an under-converged iterate, so it counts as failure.
    if (!(v.min() > 0.0)) {
        auto retry = detail::conjugate_gradient(apply, b, v.values, cfg.rel_tol * 1e-3, budget);
        if (!retry.converged || !(v.min() > 0.0))
            throw NonConvergence("solve_signal: iterate failed the positivity postcondition");
    }
    v.require_finite("solve_signal");
    return v;
}

}  // namespace chemolab
