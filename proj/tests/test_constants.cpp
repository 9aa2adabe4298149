#include "catch2/catch_amalgamated.hpp"

#include <chrono>
#include <cmath>

#include "chemolab/constants.hpp"
#include "chemolab/oracles.hpp"

using namespace chemolab;

namespace {

// Reference values computed independently with 50-digit arithmetic.
constexpr double kDelta0_3_1 = 0.029274915762159580;     // e^-1/(4 pi)
constexpr double kDelta0_2_1 = 0.067008120508497137;     // K0(1)/(2 pi)
constexpr double kDelta0_3_2 = 0.0053848198254621574;    // e^-2/(8 pi)
constexpr double kDelta0_2_r2 = 0.038060664938979489;    // K0(sqrt 2)/(2 pi)
constexpr double kDelta0_2_05 = 0.14712586467430190;
constexpr double kDelta0_3_05 = 0.096532352630053908;
constexpr double kDelta0_2_2 = 0.018126772835967563;
constexpr double kDelta0_3_r2 = 0.013680122671372325;

constexpr double kMu1_2_05_1_1 = 8095.5558100310511;
constexpr double kMu2_4_05_1_1 = 8095.5558100310511;
constexpr double kMu3_2_05_1_1 = 771.13526960581292;
constexpr double kMu4_example = 0.17073698897129782;     // second branch
constexpr double kMu4_branch1 = 0.46641791044776119;
constexpr double kMuTilde_example = 0.17073698897129782; // mu = 1 fixture

double rel_err(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace


TEST_CASE("delta0: quadrature hits the closed forms to 1e-10 relative", "[constants]") {
    CHECK(rel_err(delta0(3, 1.0), kDelta0_3_1) <= 1e-10);
    CHECK(rel_err(delta0(2, 1.0), kDelta0_2_1) <= 1e-10);
    CHECK(rel_err(delta0(3, 2.0), kDelta0_3_2) <= 1e-10);
    CHECK(rel_err(delta0(2, std::sqrt(2.0)), kDelta0_2_r2) <= 1e-10);
    CHECK(rel_err(delta0(2, 0.5), kDelta0_2_05) <= 1e-10);
    CHECK(rel_err(delta0(3, 0.5), kDelta0_3_05) <= 1e-10);
    CHECK(rel_err(delta0(2, 2.0), kDelta0_2_2) <= 1e-10);
    CHECK(rel_err(delta0(3, std::sqrt(2.0)), kDelta0_3_r2) <= 1e-10);
}

TEST_CASE("delta0: agrees with the Bessel-identity oracle to 1e-8", "[constants]") {
    const double diams[] = {0.5, 1.0, std::sqrt(2.0), 2.0};
    for (int n : {2, 3})
        for (double d : diams)
            CHECK(rel_err(delta0(n, d), oracles::delta0_bessel(n, d)) <= 1e-8);
}

TEST_CASE("delta0: strictly decreasing in diam, fast to evaluate", "[constants]") {
    CHECK(delta0(2, 2.0) < delta0(2, 1.0));
    CHECK(delta0(3, 1.5) < delta0(3, 0.75));

    const auto t0 = std::chrono::steady_clock::now();
    double sink = 0.0;
    for (int i = 0; i < 20; ++i) sink += delta0(2 + (i % 2), 0.5 + 0.1 * i);
    CHECK(sink > 0.0);
    const auto t1 = std::chrono::steady_clock::now();
    const double ms_per_eval =
        std::chrono::duration<double, std::milli>(t1 - t0).count() / 20.0;
    CHECK(ms_per_eval < 10.0);
}

TEST_CASE("threshold formulas match the high-precision fixtures to 1e-10", "[constants]") {
    CHECK(rel_err(mu1_star(2.0, 0.5, 1.0, 1.0), kMu1_2_05_1_1) <= 1e-10);
    CHECK(rel_err(mu2_star(4, 0.5, 1.0, 1.0), kMu2_4_05_1_1) <= 1e-10);
    CHECK(rel_err(mu3_star(2, 0.5, 1.0, 1.0), kMu3_2_05_1_1) <= 1e-10);

    auto m4 = mu4_star(0.5, 0.5, 1.0, 1.0, 1.0, 1.0, 1.0, 0.067, 1.0);
    CHECK(rel_err(m4.value, kMu4_example) <= 1e-10);
    CHECK(m4.branch == 2);
    CHECK(rel_err(m4.branch1, kMu4_branch1) <= 1e-10);

    auto mt = mu_tilde(1.0, 1.0, 1.0, 1.0, 1.0, 0.5, 0.5, 1.0, 0.067, 1.0);
    CHECK(rel_err(mt.value, kMuTilde_example) <= 1e-10);
    CHECK(mt.v_floor == Catch::Approx(0.134).epsilon(1e-12));
}

TEST_CASE("mu1*: scaling structure", "[constants]") {
    const double base = mu1_star(2.0, 0.5, 1.0, 1.0);
    // beta is a plain prefactor
    CHECK(mu1_star(2.0, 0.5, 1.0, 2.0) / base == Catch::Approx(2.0).epsilon(1e-14));
    // chi enters once as chi^(1/(1-lambda))
    for (double c : {0.5, 2.0, 7.0}) {
        const double ratio = mu1_star(2.0, 0.5, c, 1.0) / base;
        CHECK(ratio == Catch::Approx(std::pow(c, 1.0 / (1.0 - 0.5))).epsilon(4e-16));
    }
}

TEST_CASE("mu4*: eta-monotone, r-free at lambda = 1/2", "[constants]") {
    auto base = mu4_star(0.5, 0.5, 1.0, 1.0, 1.0, 1.0, 0.5, 0.067, 1.0);
    auto more_eta = mu4_star(0.5, 0.5, 1.0, 1.0, 1.0, 1.0, 0.9, 0.067, 1.0);
    CHECK(more_eta.value < base.value);

    // r^(1-2*lambda) = r^0 = 1: both branches are r-free
    auto r1 = mu4_star(0.5, 0.5, 1.0, 1.0, 1.0, 1.0, 1.0, 0.067, 1.0);
    auto r3 = mu4_star(0.5, 0.5, 1.0, 1.0, 1.0, 3.0, 1.0, 0.067, 1.0);
    CHECK(r1.value == r3.value);
}

TEST_CASE("mu_tilde: vanishes with chi, decreasing in delta0", "[constants]") {
    auto chi0 = mu_tilde(1.0, 1.0, 0.0, 1.0, 1.0, 0.5, 0.5, 1.0, 0.067, 1.0);
    CHECK(chi0.value == 0.0);
    CHECK(chi0.decay_positive);

    auto small_chi = mu_tilde(1.0, 1.0, 1e-6, 1.0, 1.0, 0.5, 0.5, 1.0, 0.067, 1.0);
    CHECK(small_chi.value < 1e-11);

    auto d_small = mu_tilde(1.0, 1.0, 1.0, 1.0, 1.0, 0.5, 0.5, 1.0, 0.02, 1.0);
    auto d_large = mu_tilde(1.0, 1.0, 1.0, 1.0, 1.0, 0.5, 0.5, 1.0, 0.2, 1.0);
    CHECK(d_large.value < d_small.value);
}

TEST_CASE("domain violations surface instead of silent values", "[constants]") {
    CHECK_THROWS_AS(mu2_star(2, 0.5, 1.0, 1.0), DomainViolation);
    CHECK_THROWS_AS(mu2_star(3, 0.6, 1.0, 1.0), DomainViolation);  // N <= 2(1+lambda)
    CHECK_THROWS_AS(mu1_star(1.2, 0.5, 1.0, 1.0), DomainViolation);
    CHECK_THROWS_AS(mu1_star(2.0, 1.5, 1.0, 1.0), DomainViolation);
    CHECK_THROWS_AS(mu3_star(1, 0.5, 1.0, 1.0), DomainViolation);
    CHECK_THROWS_AS(delta0(1, 1.0), DomainViolation);
}

TEST_CASE("ordering mu3* > mu2* on a 100-point lattice in its consistency region", "[constants]") {
    // the ordering is not universal (mu2* blows up as N -> 2(1+lambda));
    // this lattice sits inside the region where the assumption is consistent
    int points = 0;
    for (int N : {5, 6, 7, 8, 10})
        for (double lam : {0.1, 0.25, 0.4, 0.55, 0.7})
            for (double chi : {0.5, 2.0})
                for (double beta : {1.0, 3.0}) {
                    const double m2 = mu2_star(N, lam, chi, beta);
                    const double m3 = mu3_star(N, lam, chi, beta);
                    CHECK(m3 > m2);
                    ++points;
                }
    CHECK(points == 100);
}

TEST_CASE("evaluate_thresholds: report wiring", "[constants]") {
    ThresholdInputs in;
    in.n_dim = 2;
    in.mu = 1000.0;
    ThresholdReport rep = evaluate_thresholds(in);

    CHECK(rep.diam == Catch::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(!rep.mu2.defined());   // N = 2 carries the domain-error marker
    CHECK(!rep.mu2.error.empty());
    CHECK(rep.mu1.defined());
    CHECK(rep.mu3.defined());
    CHECK(rep.rate_sup == rep.rate_energy / (in.n_dim + 2));
    CHECK(rep.cond_mu3);         // mu = 1000 > mu3* ~ 771, mu2* clause vacuous
    CHECK(rep.cond_mu3_mu4);
    CHECK(!rep.cond_mu1);        // mu1*(p=2) ~ 8095 > 1000

    in.n_dim = 4;
    in.mu = 10000.0;
    ThresholdReport rep4 = evaluate_thresholds(in);
    CHECK(rep4.mu2.defined());
    CHECK(rep4.cond_mu1);
    CHECK(rep4.cond_mu2);
    CHECK(rep4.rate_sup == rep4.rate_energy / 6.0);
}

