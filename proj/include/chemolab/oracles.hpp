#pragma once

// Closed-form references used by tests and acceptance runs.  Nothing here
// touches the solver code paths: the logistic solution is the spatially
// homogeneous trajectory, the eigenmode pair solves the continuum signal
// equation by construction, and delta0_bessel evaluates the heat-kernel
// constant through the modified-Bessel identity
//   int_0^inf t^(nu-1) exp(-t - a/t) dt = 2 a^(nu/2) K_nu(2 sqrt(a)),
// nu = 1 - N/2, a = diam^2/4, which collapses to e^(-d)/(4 pi d) for N = 3
// and K_0(d)/(2 pi) for N = 2.

#include <cmath>
#include <utility>

#include "chemolab/errors.hpp"
#include "chemolab/grid.hpp"

namespace chemolab::oracles {

struct LogisticParams {
    double c0 = 1.0;
    double r = 1.0;
    double mu = 1.0;

    void validate() const {
        if (!(c0 > 0.0) || !(r > 0.0) || !(mu > 0.0))
            throw InvalidInput("LogisticParams: all parameters must be positive");
    }
};

/// Exact solution of u' = r u - mu u^2:
///   u(t) = u* / (1 + ((u* - c0)/c0) e^{-rt}),  u* = r/mu.
inline double logistic_exact(const LogisticParams& p, double t) {
    p.validate();
    if (!(t >= 0.0)) throw InvalidInput("logistic_exact: t must be >= 0");
    const double ustar = p.r / p.mu;
    return ustar / (1.0 + (ustar - p.c0) / p.c0 * std::exp(-p.r * t));
}

/// Analytic pair solving 0 = v'' - alpha v + beta u for the x-directed mode
///   u(x) = c + amp cos(k pi x / lx),
///   v(x) = beta c / alpha + beta amp cos(k pi x / lx) / (alpha + (k pi/lx)^2).
struct EigenmodeSignal {
    int k = 1;
    double amp = 0.0;
    double c = 1.0;
    double alpha = 1.0;
    double beta = 1.0;
    double lx = 1.0;

    EigenmodeSignal(int k_, double amp_, double c_, double alpha_, double beta_, double lx_)
        : k(k_), amp(amp_), c(c_), alpha(alpha_), beta(beta_), lx(lx_) {
        if (k < 0) throw InvalidInput("EigenmodeSignal: mode index must be >= 0");
        if (!(c > 0.0) || !(alpha > 0.0) || !(beta > 0.0) || !(lx > 0.0))
            throw InvalidInput("EigenmodeSignal: c, alpha, beta, lx must be positive");
        if (!(std::fabs(amp) < c))
            throw InvalidAmplitude("EigenmodeSignal: |amp| must be < c to keep u positive");
    }

    double wavenumber() const { return k * std::acos(-1.0) / lx; }
    double v_amplitude() const {
        const double kk = wavenumber();
        return beta * amp / (alpha + kk * kk);
    }

    double u_at(double x) const { return c + amp * std::cos(wavenumber() * x); }
    double v_at(double x) const {
        return beta * c / alpha + v_amplitude() * std::cos(wavenumber() * x);
    }

    /// Sample the pair at the cell centers of a grid.
    std::pair<ScalarField, ScalarField> project(const Grid& g) const {
        ScalarField u(g), v(g);
        u.assign([&](double x, double) { return u_at(x); });
        v.assign([&](double x, double) { return v_at(x); });
        return {std::move(u), std::move(v)};
    }
};

inline EigenmodeSignal eigenmode_signal(int k, double amp, double c, double alpha,
                                        double beta, double lx) {
    return EigenmodeSignal(k, amp, c, alpha, beta, lx);
}

/// Bessel-identity evaluation of delta0, independent of the quadrature route.
inline double delta0_bessel(int n_dim, double diam) {
    if (!(diam > 0.0)) throw InvalidInput("delta0_bessel: diam must be positive");
    const double pi = std::acos(-1.0);
    if (n_dim == 3) return std::exp(-diam) / (4.0 * pi * diam);
    if (n_dim == 2) return std::cyl_bessel_k(0.0, diam) / (2.0 * pi);
    throw Unsupported("delta0_bessel: closed forms cover n_dim in {2,3} only");
}

}  // namespace chemolab::oracles
