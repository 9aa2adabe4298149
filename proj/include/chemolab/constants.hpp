#pragma once

// Explicit constants and parameter thresholds of the model:
//
//   delta0(N, d)  = int_0^inf (4 pi t)^(-N/2) exp(-(t + d^2/(4t))) dt
//   mu1*(p,lambda,chi,beta), mu2*(N,...), mu3*(N,...)   boundedness thresholds
//   mu4*(q,lambda,chi,alpha,beta,r,eta,delta0,|Omega|)  stability threshold
//   mu~ (mu_tilde)                                      energy-decay defect
//
// plus the classification of a parameter set against the regime conditions
// mu > mu1*, mu > mu2*, mu > mu3* > mu2*, mu > max{mu3*, mu4*}.  Everything
// here is a pure function of its arguments; the dimension N is independent
// of the 2-D simulation grid so the N-dependence can be explored directly.

#include <cmath>
#include <optional>
#include <string>

#include "chemolab/errors.hpp"

namespace chemolab {
namespace detail {

// Adaptive Simpson refinement on [a,b] given endpoint/midpoint values.
template <class F>
double simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace detail

/// Heat-kernel domain constant delta0.  Substituting t = e^s turns the
/// integral into one over the whole line with doubly-exponential decay;
/// adaptive Simpson then reaches absolute accuracy well below 1e-12.
inline double delta0(int n_dim, double diam) {
    if (n_dim < 2) throw DomainViolation("delta0: dimension must be >= 2");
    if (!(diam > 0.0)) throw InvalidInput("delta0: diam must be positive");
    const double a = 0.25 * diam * diam;
    const double half_n = 0.5 * n_dim;
    const double log4pi = std::log(4.0 * std::acos(-1.0));
    auto integrand = [&](double s) {
        // (4 pi e^s)^(-N/2) * exp(-(e^s + a e^{-s})) * e^s
        const double es = std::exp(s);
        const double expo = (1.0 - half_n) * s - half_n * log4pi - es - a / es;
        return expo < -745.0 ? 0.0 : std::exp(expo);
    };
    // the integrand is negligible once e^s or a e^{-s} passes ~750
    const double s_hi = 8.0;
    const double s_lo = -(std::log(760.0 / a) + 8.0);
    return detail::adaptive_simpson(integrand, std::min(s_lo, -8.0), s_hi, 1e-14);
}

/// mu1*(p, lambda, chi, beta): L^p-boundedness threshold.
inline double mu1_star(double p, double lambda, double chi, double beta) {
    if (!(lambda > 0.0) || !(lambda < 1.0))
        throw DomainViolation("mu1_star: lambda must lie in (0,1)");
    if (!(chi >= 0.0) || !(beta > 0.0))
        throw InvalidInput("mu1_star: need chi >= 0 and beta > 0");
    if (!(p > 1.0 + lambda))
        throw DomainViolation("mu1_star: requires p > 1 + lambda");
    const double oml = 1.0 - lambda;
    const double bracket =
        std::pow(4.0 * lambda, 1.0 / oml) *
            std::pow(2.0 * std::pow(p, 4) * (p + lambda) / std::pow(p - 1.0 - lambda, 3),
                     (p + 1.0) / (2.0 * p * oml)) +
        1.0;
    const double chi_free = beta * oml * std::pow(lambda, lambda / oml) * (p - 1.0) *
                            std::pow(p, (2.0 * lambda - 1.0) / oml) *
                            std::pow(2.0, -lambda / oml) * bracket;
    return std::pow(chi, 1.0 / oml) * chi_free;
}

/// mu2*(N, lambda, chi, beta): global-boundedness threshold.  Undefined for
/// N <= 2(1+lambda); in particular every N = 2 case is a domain violation
/// (the N-2 prefactor vanishes but the inner fractional power does not exist).
inline double mu2_star(int n_dim, double lambda, double chi, double beta) {
    if (!(lambda > 0.0) || !(lambda < 1.0))
        throw DomainViolation("mu2_star: lambda must lie in (0,1)");
    if (!(chi >= 0.0) || !(beta > 0.0))
        throw InvalidInput("mu2_star: need chi >= 0 and beta > 0");
    const double N = n_dim;
    if (!(N > 2.0 * (1.0 + lambda)))
        throw DomainViolation("mu2_star: requires N > 2(1 + lambda)");
    const double oml = 1.0 - lambda;
    const double bracket =
        std::pow(4.0 * lambda, 1.0 / oml) *
            std::pow(std::pow(N, 4) * (N + 2.0 * lambda) /
                         (2.0 * std::pow(N - 2.0 * (1.0 + lambda), 3)),
                     (N + 2.0) / (2.0 * N * oml)) +
        1.0;
    const double chi_free = beta * oml * std::pow(lambda, lambda / oml) * (N - 2.0) *
                            std::pow(N, (2.0 * lambda - 1.0) / oml) *
                            std::pow(2.0, -2.0 * lambda / oml) * bracket;
    return std::pow(chi, 1.0 / oml) * chi_free;
}

/// mu3*(N, lambda, chi, beta): uniform-boundedness/persistence threshold,
/// defined for all N >= 2 (2N - 1 - lambda > 0).
inline double mu3_star(int n_dim, double lambda, double chi, double beta) {
    if (!(lambda > 0.0) || !(lambda < 1.0))
        throw DomainViolation("mu3_star: lambda must lie in (0,1)");
    if (!(chi >= 0.0) || !(beta > 0.0))
        throw InvalidInput("mu3_star: need chi >= 0 and beta > 0");
    if (n_dim < 2) throw DomainViolation("mu3_star: requires N >= 2");
    const double N = n_dim;
    const double oml = 1.0 - lambda;
    const double bracket =
        std::pow(4.0 * lambda, 1.0 / oml) *
            std::pow(32.0 * std::pow(N, 4) * (2.0 * N + lambda) /
                         std::pow(2.0 * N - 1.0 - lambda, 3),
                     (2.0 * N + 1.0) / (4.0 * N * oml)) +
        1.0;
    const double chi_free = 0.5 * beta * oml * std::pow(lambda, lambda / oml) *
                            (2.0 * N - 1.0) * std::pow(N, (2.0 * lambda - 1.0) / oml) *
                            bracket;
    return std::pow(chi, 1.0 / oml) * chi_free;
}

struct Mu4Result {
    double value = 0.0;
    int branch = 0;  // 1 or 2: which bracketed power attained the minimum
    double branch1 = 0.0;
    double branch2 = 0.0;
};

/// mu4*: stability threshold, the minimum of two bracketed powers.
inline Mu4Result mu4_star(double q, double lambda, double chi, double alpha,
                          double beta, double r, double eta, double delta0_val,
                          double area) {
    if (!(q > 0.0) || !(q < 1.0)) throw DomainViolation("mu4_star: q must lie in (0,1)");
    if (!(lambda > 0.0) || !(lambda < 1.0))
        throw DomainViolation("mu4_star: lambda must lie in (0,1)");
    if (!(chi >= 0.0) || !(alpha > 0.0) || !(beta > 0.0) || !(r > 0.0) || !(eta > 0.0) ||
        !(delta0_val > 0.0) || !(area > 0.0))
        throw InvalidInput("mu4_star: arguments must be positive (chi may be zero)");
    const double s = std::pow(eta, 1.0 / q) * delta0_val * area;
    const double r_pow = std::pow(r, 1.0 - 2.0 * lambda);
    Mu4Result out;
    out.branch1 = std::pow(beta * chi / alpha * r_pow / std::pow(2.0, 2.0 + lambda) *
                               std::pow(s, -lambda),
                           1.0 / (1.0 - lambda));
    out.branch2 = std::pow(std::pow(beta, 2.0 - lambda) * r_pow /
                               std::pow(alpha, 1.0 - lambda) * chi * chi /
                               std::pow(2.0, 4.0 + lambda) * std::pow(s, -lambda),
                           1.0 / (2.0 - 2.0 * lambda));
    out.branch = out.branch1 <= out.branch2 ? 1 : 2;
    out.value = std::min(out.branch1, out.branch2);
    return out;
}

struct MuTildeResult {
    double value = 0.0;
    int branch = 0;
    double branch1 = 0.0;
    double branch2 = 0.0;
    double v_floor = 0.0;      // (2r/mu) eta^(1/q) delta0 |Omega|
    double mu_minus = 0.0;     // mu - mu~
    bool decay_positive = false;  // mu - mu~ > 0, needed for energy decay
};

/// mu~ = min of the two Young-estimate coefficients, built on the eventual
/// signal floor inf v >= (2r/mu) eta^(1/q) delta0 |Omega|.
inline MuTildeResult mu_tilde(double mu, double r, double chi, double alpha,
                              double beta, double lambda, double q, double eta,
                              double delta0_val, double area) {
    if (!(q > 0.0) || !(q < 1.0)) throw DomainViolation("mu_tilde: q must lie in (0,1)");
    if (!(lambda > 0.0) || !(lambda < 1.0))
        throw DomainViolation("mu_tilde: lambda must lie in (0,1)");
    if (!(mu > 0.0) || !(r > 0.0) || !(chi >= 0.0) || !(alpha > 0.0) || !(beta > 0.0) ||
        !(eta > 0.0) || !(delta0_val > 0.0) || !(area > 0.0))
        throw InvalidInput("mu_tilde: arguments must be positive (chi may be zero)");
    MuTildeResult out;
    out.v_floor = 2.0 * r / mu * std::pow(eta, 1.0 / q) * delta0_val * area;
    const double inv_floor = 1.0 / out.v_floor;
    out.branch1 = beta * beta * chi * chi / (16.0 * alpha) *
                  std::pow(inv_floor, 2.0 * lambda);
    out.branch2 = beta * chi * chi / 16.0 * std::pow(mu / r, lambda) *
                  std::pow(beta / alpha, 1.0 - lambda) * std::pow(inv_floor, lambda);
    out.branch = out.branch1 <= out.branch2 ? 1 : 2;
    out.value = std::min(out.branch1, out.branch2);
    out.mu_minus = mu - out.value;
    out.decay_positive = out.mu_minus > 0.0;
    return out;
}

/// Inputs for a full threshold evaluation.
struct ThresholdInputs {
    int n_dim = 2;
    double p = 2.0;
    double q = 0.5;
    double lambda = 0.5;
    double chi = 1.0;
    double alpha = 1.0;
    double beta = 1.0;
    double r = 1.0;
    double mu = 1.0;
    double eta = 1.0;
    double lx = 1.0;
    double ly = 1.0;
};

/// Either a finite nonnegative value or the reason it is undefined.
struct ThresholdValue {
    std::optional<double> value;
    std::string error;

    bool defined() const { return value.has_value(); }
};

struct ThresholdReport {
    ThresholdInputs in;
    double delta0 = 0.0;
    double diam = 0.0;
    double area = 0.0;
    ThresholdValue mu1;
    ThresholdValue mu2;
    ThresholdValue mu3;
    ThresholdValue mu4;
    int mu4_branch = 0;
    MuTildeResult mu_tilde;
    double rate_energy = 0.0;  // r (mu - mu~) / mu
    double rate_sup = 0.0;     // rate_energy / (N + 2)
    // regime conditions: mu > mu1*, mu > mu2*, mu > mu3* (> mu2* when defined),
    // mu > max{mu3*, mu4*}
    bool cond_mu1 = false;
    bool cond_mu2 = false;
    bool cond_mu3 = false;
    bool cond_mu3_mu4 = false;
};

inline ThresholdReport evaluate_thresholds(const ThresholdInputs& in) {
    ThresholdReport rep;
    rep.in = in;
    if (!(in.lx > 0.0) || !(in.ly > 0.0))
        throw InvalidInput("evaluate_thresholds: domain sides must be positive");
    rep.area = in.lx * in.ly;
    rep.diam = std::sqrt(in.lx * in.lx + in.ly * in.ly);
    rep.delta0 = delta0(in.n_dim, rep.diam);

    auto capture = [](auto&& fn) {
        ThresholdValue tv;
        try {
            tv.value = fn();
        } catch (const DomainViolation& e) {
            tv.error = e.what();
        }
        return tv;
    };
    rep.mu1 = capture([&] { return mu1_star(in.p, in.lambda, in.chi, in.beta); });
    rep.mu2 = capture([&] { return mu2_star(in.n_dim, in.lambda, in.chi, in.beta); });
    rep.mu3 = capture([&] { return mu3_star(in.n_dim, in.lambda, in.chi, in.beta); });
    rep.mu4 = capture([&] {
        auto m4 = mu4_star(in.q, in.lambda, in.chi, in.alpha, in.beta, in.r, in.eta,
                           rep.delta0, rep.area);
        rep.mu4_branch = m4.branch;
        return m4.value;
    });
    rep.mu_tilde = mu_tilde(in.mu, in.r, in.chi, in.alpha, in.beta, in.lambda, in.q,
                            in.eta, rep.delta0, rep.area);
    rep.rate_energy = in.r * rep.mu_tilde.mu_minus / in.mu;
    rep.rate_sup = rep.rate_energy / (in.n_dim + 2);

    rep.cond_mu1 = rep.mu1.defined() && in.mu > *rep.mu1.value;
    rep.cond_mu2 = rep.mu2.defined() && in.mu > *rep.mu2.value;
    // the mu3* > mu2* clause is checked only where mu2* exists
    rep.cond_mu3 = rep.mu3.defined() && in.mu > *rep.mu3.value &&
                   (!rep.mu2.defined() || *rep.mu3.value > *rep.mu2.value);
    rep.cond_mu3_mu4 = rep.mu3.defined() && rep.mu4.defined() &&
                       in.mu > std::max(*rep.mu3.value, *rep.mu4.value);
    return rep;
}

}  // namespace chemolab
