#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "sspec/branch.hpp"
#include "sspec/quadrature.hpp"
#include "sspec/specfun.hpp"

using namespace sspec;
using doctest::Approx;

// ---------------------------------------------------------------------------
// test-only quadrature oracles for the integral representations
// ---------------------------------------------------------------------------

// Gamma(z) = int_0^inf e^{-s} s^{z-1} ds, Re z > 0
static cplx gamma_integral(cplx z) {
    return integrate_to_inf<cplx>(
        [&](double s) { return std::exp(-s) * std::pow(cplx(s), z - 1.0); }, 0.0, 1e-12, 1.0);
}

// Gamma(l+1) W_{0,l+1/2}(x) = e^{-x/2} x^{l+1} int_0^inf e^{-tx} t^l (1+t)^l dt,  x > 0
static double w0_integral(int ell, double x) {
    double I = integrate_to_inf<double>(
        [&](double t) { return std::exp(-t * x) * std::pow(t, ell) * std::pow(1.0 + t, ell); },
        0.0, 1e-12, 1.0 / x);
    return std::exp(-0.5 * x) * std::pow(x, ell + 1) * I;
}

// M_{0,l+1/2}(2 r e) = C(l) (2 r e)^{l+1} int_{-1}^{1} e^{r t e} (1-t^2)^l dt
static cplx m0_integral(int ell, double r, cplx eps) {
    cplx I = integrate_adaptive<cplx>(
        [&](double t) { return std::exp(r * t * eps) * std::pow(1.0 - t * t, ell); }, -1.0, 1.0,
        1e-13);
    double C = std::pow(2.0, -(2 * ell + 1)) * factorial(2 * ell + 1) /
               (factorial(ell) * factorial(ell));
    cplx x = 2.0 * r * eps, xp = 1.0;
    for (int k = 0; k <= ell; ++k) xp *= x;
    return C * xp * I;
}

// ---------------------------------------------------------------------------

TEST_CASE("log_gamma classical values") {
    CHECK(std::abs(log_gamma(cplx(1.0)) - 0.0) < 1e-14);
    CHECK(std::abs(log_gamma(cplx(5.0)) - std::log(24.0)) < 1e-14);
    CHECK(std::abs(log_gamma(cplx(0.5)) - std::log(std::sqrt(pi))) < 1e-14);
    CHECK_THROWS_AS(log_gamma(cplx(-3.0)), domain_error);
}

TEST_CASE("log_gamma matches the integral representation for Re z > 0") {
    for (cplx z : {cplx(2.3, 0.7), cplx(0.8, -1.1), cplx(6.0, 2.0)}) {
        cplx g = std::exp(log_gamma(z));
        cplx gi = gamma_integral(z);
        CHECK(std::abs(g - gi) / std::abs(gi) < 1e-10);
    }
}

TEST_CASE("kummer_phi basic values") {
    CHECK(std::abs(kummer_phi({2.0, 3.0}, cplx(0.0)) - 1.0) == 0.0);
    CHECK(std::abs(kummer_phi({1.0, 1.0}, cplx(1.0)) - std::exp(1.0)) < 1e-14);
    CHECK(std::abs(kummer_phi({1.0, 2.0}, cplx(1.0)) - (std::exp(1.0) - 1.0)) < 1e-14);
    CHECK_THROWS_AS(kummer_phi({1.0, cplx(-2.0)}, cplx(1.0)), domain_error);
}

TEST_CASE("kummer reflection consistency over random admissible parameters") {
    std::mt19937 rng(20260809);
    std::uniform_real_distribution<double> U(-2.0, 4.0), X(0.2, 8.0);
    for (int it = 0; it < 200; ++it) {
        cplx alpha(U(rng), 0.5 * U(rng));
        cplx c(2.0 + std::abs(U(rng)), 0.3 * U(rng));
        cplx x(X(rng), 0.5 * X(rng));
        cplx lhs = kummer_phi({alpha, c}, x);
        cplx rhs = std::exp(x) * kummer_phi({c - alpha, c}, -x);
        CHECK(std::abs(lhs - rhs) / std::abs(lhs) < 1e-12);
    }
}

TEST_CASE("kummer small-argument laws") {
    // Phi -> 1 with first-order rate; x^{c-1} Psi -> Gamma(c-1)/Gamma(alpha)
    int ell = 2;
    cplx alpha(ell + 1.0), c(2.0 * ell + 2.0);
    double prev_phi = 1.0, prev_psi = 1.0;
    for (int k = 2; k <= 6; ++k) {
        double x = std::pow(10.0, -k);
        double dev_phi = std::abs(kummer_phi({alpha, c}, cplx(x)) - 1.0);
        // Psi from the closed form: Psi(l+1, 2l+2, x) = e^{x/2} x^{-(l+1)} W0(x)
        cplx psi = std::exp(0.5 * x) * std::pow(cplx(x), -(ell + 1.0)) * whittaker_w0(ell, cplx(x));
        cplx lim = gamma_fn(c - 1.0) * recip_gamma(alpha);
        double dev_psi = std::abs(std::pow(cplx(x), c - 1.0) * psi - lim);
        if (k > 2) {
            CHECK(dev_phi < 0.2 * prev_phi); // at least first order in x
            CHECK(dev_psi < 0.2 * prev_psi);
        }
        prev_phi = dev_phi;
        prev_psi = dev_psi;
    }
}

TEST_CASE("tricomi_psi_closed examples and quadrature cross-check") {
    // l = 0: W_{0,1/2}(x) = e^{-x/2}
    for (double x : {0.3, 1.0, 4.0}) {
        CHECK(std::abs(tricomi_psi_closed(0, cplx(x)) - std::exp(-0.5 * x)) < 1e-15);
    }
    // l = 1, x = 2: e^{-1} 2^{-1} (Gamma(3) + 2 Gamma(2)) = 2/e
    CHECK(std::abs(tricomi_psi_closed(1, cplx(2.0)) - 2.0 / std::exp(1.0)) < 1e-14);
    // l = 2: against the integral representation
    for (double x : {1.0, 5.0, 10.0}) {
        double ref = w0_integral(2, x);
        CHECK(std::abs(tricomi_psi_closed(2, cplx(x)).real() - ref) / ref < 1e-10);
    }
    CHECK_THROWS_AS(tricomi_psi_closed(1, cplx(0.0)), domain_error);
}

TEST_CASE("closed form vs integral representation across l and a log grid") {
    for (int ell = 0; ell <= 6; ++ell) {
        for (double x = 0.1; x <= 50.0; x *= 2.1544346900318837) {
            double ref = w0_integral(ell, x);
            double got = tricomi_psi_closed(ell, cplx(x)).real();
            CHECK(std::abs(got - ref) / std::abs(ref) < 1e-9);
        }
    }
}

TEST_CASE("whittaker_m closed cases") {
    // kappa = 0, l = 0: M_{0,1/2}(x) = 2 sinh(x/2)
    for (double x : {0.7, 2.0, 9.0}) {
        CHECK(std::abs(whittaker_m(0.0, 0, cplx(x)) - 2.0 * std::sinh(0.5 * x)) / (2.0 * std::sinh(0.5 * x)) < 1e-13);
    }
    // root of sin: M_{0,1/2}(2 pi i) = 2i sin(pi) = 0
    CHECK(std::abs(whittaker_m(0.0, 0, cplx(0.0, 2.0 * pi))) < 1e-12);
    // kappa = 0, l = 1, x = 1 against the (2.7)-(2.8) style quadrature
    {
        cplx eps(0.5, 0.0); // x = 2 r eps = 1 with r = 1
        cplx ref = m0_integral(1, 1.0, eps);
        cplx got = whittaker_m(0.0, 1, cplx(1.0));
        CHECK(std::abs(got - ref) / std::abs(ref) < 1e-10);
    }
}

TEST_CASE("whittaker_m matches the integral representation on the imaginary axis") {
    for (int ell : {0, 1, 2}) {
        for (double ae : {3.0, 11.0, 26.0}) {
            cplx eps(0.0, ae);
            double r = 0.5;
            cplx ref = m0_integral(ell, r, eps);
            cplx got = whittaker_m(0.0, ell, 2.0 * r * eps);
            CHECK(std::abs(got - ref) / std::abs(ref) < 1e-8);
        }
    }
}

TEST_CASE("large-argument two-exponential law with the phi factor") {
    // M_{0,l+1/2}(2 r eps) ~ e^{i pi l/2} G(2l+2)/G(l+1)
    //      (-e^{i pi l/2} e^{-r eps} phi(eps) + e^{-i pi l/2} e^{r eps} phi(-eps))
    auto two_exp = [](int ell, double r, cplx eps) {
        cplx phase = std::exp(cplx(0.0, 0.5 * pi * ell));
        cplx c = phase * factorial(2 * ell + 1) / factorial(ell);
        return c * (-phase * std::exp(-r * eps) * phi_asymptotic_factor(r, eps, ell) +
                    std::exp(r * eps) * phi_asymptotic_factor(r, -eps, ell) / phase);
    };
    double r = 1.0;
    // l <= 1: the factor is exact (the expansion terminates)
    for (int ell : {0, 1}) {
        cplx eps(0.0, 60.0);
        cplx ref = whittaker_m(0.0, ell, 2.0 * r * eps);
        CHECK(std::abs(two_exp(ell, r, eps) - ref) / std::abs(ref) < 1e-10);
    }
    // l >= 2: error O(1/eps^2): halving |eps| scales the error by >= 3
    for (int ell : {2, 3}) {
        for (double ae : {50.0, 100.0}) {
            cplx e1(0.0, ae), e2(0.0, 2.0 * ae);
            double err1 = std::abs(two_exp(ell, r, e1) - whittaker_m(0.0, ell, 2.0 * r * e1)) /
                          std::abs(whittaker_m(0.0, ell, 2.0 * r * e1));
            double err2 = std::abs(two_exp(ell, r, e2) - whittaker_m(0.0, ell, 2.0 * r * e2)) /
                          std::abs(whittaker_m(0.0, ell, 2.0 * r * e2));
            CHECK(err1 / err2 >= 3.0);
        }
    }
}

TEST_CASE("phi_asymptotic_factor values") {
    CHECK(phi_asymptotic_factor(1.0, cplx(1.0), 0) == cplx(1.0));
    CHECK(phi_asymptotic_factor(1.0, cplx(1.0), 1) == cplx(2.0));
    // l=2, r eps = 3i: 1 + 6/(6i) = 1 - i
    CHECK(std::abs(phi_asymptotic_factor(1.0, cplx(0.0, 3.0), 2) - cplx(1.0, -1.0)) < 1e-15);
    CHECK_THROWS_AS(phi_asymptotic_factor(1.0, cplx(0.0), 0), domain_error);
}

TEST_CASE("generic tricomi_psi routes agree") {
    // non-integer c: connection formula vs quadrature vs closed family
    cplx alpha(0.917, -0.4), c(2.83, 0.0), x(0.0, 6.0);
    cplx conn = tricomi_psi(alpha, c, x);
    // force the quadrature path by se param c exactly integer-adjacent? instead
    // cross-check against the integral computed directly here
    cplx w = std::exp(cplx(0.0, -pi / 4));
    int k = 3;
    auto f = [&](double v) -> cplx {
        cplx t = w * std::pow(v, k);
        return std::exp(-x * t) * std::pow(t, alpha - 1.0) * std::pow(1.0 + t, c - alpha - 1.0) *
               (w * double(k) * std::pow(v, k - 1));
    };
    cplx quad = recip_gamma(alpha) * integrate_to_inf<cplx>(f, 0.0, 1e-12, 0.7);
    CHECK(std::abs(conn - quad) / std::abs(quad) < 1e-9);

    // integer c: quadrature path must reproduce the closed integer family
    for (int ell : {1, 2}) {
        cplx xx(0.0, 5.0);
        cplx got = tricomi_psi(cplx(ell + 1.0), cplx(2.0 * ell + 2.0), xx);
        cplx ref = std::exp(0.5 * xx) * std::pow(xx, -(ell + 1.0)) * whittaker_w0(ell, xx);
        CHECK(std::abs(got - ref) / std::abs(ref) < 1e-9);
    }
}

TEST_CASE("branched energies") {
    auto s = schrodinger_branch(cplx(4.0));
    CHECK(std::abs(s.eps - cplx(0.0, 2.0)) < 1e-15); // arg eps = pi/2 for z > 0

    auto d1 = dirac_branch(1.0, cplx(2.0));
    CHECK(std::arg(d1.eps) == Approx(pi / 2));
    CHECK(std::abs(d1.eps * d1.eps - (1.0 - 4.0)) < 1e-14);
    auto d2 = dirac_branch(1.0, cplx(-2.0));
    CHECK(std::arg(d2.eps) == Approx(-pi / 2));
    auto d3 = dirac_branch(1.0, cplx(0.5));
    CHECK(d3.eps.real() > 0.0);
    CHECK(std::abs(d3.eps * d3.eps - (1.0 - 0.25)) < 1e-14);
    CHECK(std::abs(d3.sqrt_m_plus * d3.sqrt_m_minus - d3.eps) < 1e-14);
}
