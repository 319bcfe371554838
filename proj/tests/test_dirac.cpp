#include <doctest.h>

#include <cmath>

#include "sspec/dirac.hpp"

using namespace sspec;
using doctest::Approx;

namespace {

// endpoint values of the regular solution via fresh integrations (used for
// finite-difference residual checks of the defining system)
std::pair<cplx, cplx> reg_at(const DiracParams& p, const BranchedEnergy& en, double a) {
    auto s = integrate_regular_dirac(p, en, a, 1e-12);
    return {s.f1.back(), s.f2.back()};
}

} // namespace

TEST_CASE("free_basis: Q limits at rho -> 0") {
    DiracParams p{2, 1.0, PotentialSpec::zero()};
    auto en = dirac_branch(1.0, cplx(2.5));
    double r = 1e-6 / std::abs(2.0 * en.eps);
    auto b = free_basis(p, en, r);
    CHECK(std::abs(b.Q1 - 1.0) < 1e-5);
    CHECK(std::abs(b.Q2 + 1.0) < 1e-5); // the sign that keeps f2 ~ r^l dominant
}

TEST_CASE("free_basis: Wronskian identity det U0 = Gamma(2l)/(eps Gamma(l))") {
    for (int ell : {1, 2, 3}) {
        DiracParams p{ell, 1.0, PotentialSpec::zero()};
        for (double z : {1.5, 2.5, 6.0}) {
            auto en = dirac_branch(1.0, cplx(z));
            cplx ref = factorial(2 * ell - 1) / (en.eps * factorial(ell - 1));
            cplx first = 0.0;
            for (double r = 1e-3; r <= 10.0; r *= 3.1623) {
                auto b = free_basis(p, en, r);
                cplx det = b.det();
                CHECK(std::abs(det - ref) / std::abs(ref) < 1e-9);
                if (first == 0.0) first = det;
                CHECK(std::abs(det - first) / std::abs(first) < 1e-9);
            }
        }
    }
}

TEST_CASE("free_basis columns satisfy the free system (numerical derivative)") {
    DiracParams p{1, 1.0, PotentialSpec::zero()};
    auto en = dirac_branch(1.0, cplx(2.0));
    const double z = 2.0, m = 1.0;
    for (double r : {0.4, 1.3}) {
        const double h = 1e-6;
        auto bm = free_basis(p, en, r - h), b0 = free_basis(p, en, r), bp = free_basis(p, en, r + h);
        auto check_col = [&](cplx f1m, cplx f1, cplx f1p, cplx f2m, cplx f2, cplx f2p) {
            cplx d1 = (f1p - f1m) / (2 * h), d2 = (f2p - f2m) / (2 * h);
            cplx r1 = d1 + (p.ell / r) * f1 - (z + m) * f2;
            cplx r2 = d2 - (p.ell / r) * f2 + (z - m) * f1;
            double sc = std::max(std::abs(f1), std::abs(f2));
            CHECK(std::abs(r1) / sc < 1e-9);
            CHECK(std::abs(r2) / sc < 1e-9);
        };
        check_col(bm.F1, b0.F1, bp.F1, bm.F2, b0.F2, bp.F2);
        check_col(bm.F1t, b0.F1t, bp.F1t, bm.F2t, b0.F2t, bp.F2t);
    }
}

TEST_CASE("free_basis: regular column approaches the two-exponential asymptote") {
    // F0 ~ G(2l+1)/(2 eps G(l+1)) col[((-1)^l e^{-re} - e^{re}) sqrt(m+z),
    //                               -((-1)^l e^{-re} + e^{re}) sqrt(m-z)]
    auto asym_err = [&](int ell, double rho_mag) {
        // envelope over one oscillation period (the remainder is oscillatory)
        DiracParams p{ell, 1.0, PotentialSpec::zero()};
        double z = 3.0;
        auto en = dirac_branch(1.0, cplx(z));
        double s = std::abs(en.eps);
        double worst = 0.0;
        for (int k = 0; k < 8; ++k) {
            double r = rho_mag / (2.0 * s) + k * pi / (8.0 * s);
            auto b = free_basis(p, en, r);
            double sgn = ell % 2 == 0 ? 1.0 : -1.0;
            cplx c = factorial(2 * ell) / (2.0 * en.eps * factorial(ell));
            cplx a1 = c * (sgn * std::exp(-r * en.eps) - std::exp(r * en.eps)) * en.sqrt_m_plus;
            cplx a2 = -c * (sgn * std::exp(-r * en.eps) + std::exp(r * en.eps)) * en.sqrt_m_minus;
            double sc = std::max(std::abs(a1), std::abs(a2));
            worst = std::max(worst, std::max(std::abs(b.F1 - a1), std::abs(b.F2 - a2)) / sc);
        }
        return worst;
    };
    // leading correction ~ l(l+1)/rho: ~5% envelope at |rho| = 50 for l = 1
    double e50 = asym_err(1, 50.0), e200 = asym_err(1, 200.0);
    CHECK(e50 < 0.06);
    CHECK(e200 < e50);
    CHECK(asym_err(2, 200.0) < asym_err(2, 50.0));
}

TEST_CASE("integrate_regular_dirac: q = 0 reproduces the regular basis column") {
    DiracParams p{1, 1.0, PotentialSpec::zero()};
    for (double z : {1.8, 3.5}) {
        auto en = dirac_branch(1.0, cplx(z));
        auto sol = integrate_regular_dirac(p, en, 2.5, 1e-12);
        double amp = 0;
        for (std::size_t i = 0; i < sol.r.size(); ++i)
            amp = std::max({amp, std::abs(sol.f1[i]), std::abs(sol.f2[i])});
        for (std::size_t i = 0; i < sol.r.size(); i += 9) {
            auto b = free_basis(p, en, sol.r[i]);
            CHECK(std::abs(sol.f1[i] - b.F1) / amp < 1e-9);
            CHECK(std::abs(sol.f2[i] - b.F2) / amp < 1e-9);
        }
    }
}

TEST_CASE("integrate_regular_dirac: constant q equals an energy shift up to scale") {
    const double c = 0.4, z = 2.2, m = 1.0;
    DiracParams pc{1, m, PotentialSpec::constant(c)};
    DiracParams p0{1, m, PotentialSpec::zero()};
    auto enc = dirac_branch(m, cplx(z));
    auto en0 = dirac_branch(m, cplx(z - c));
    cplx ratio0 = 0.0;
    for (double a : {0.7, 1.4, 2.1}) {
        auto [f1c, f2c] = reg_at(pc, enc, a);
        auto [f10, f20] = reg_at(p0, en0, a);
        cplx ratio = f2c / f20;
        if (ratio0 == 0.0) ratio0 = ratio;
        CHECK(std::abs(f1c / f10 - ratio0) / std::abs(ratio0) < 1e-8);
        CHECK(std::abs(ratio - ratio0) / std::abs(ratio0) < 1e-8);
    }
}

TEST_CASE("integrate_regular_dirac: defining system residual for a gaussian bump") {
    DiracParams p{1, 1.0, PotentialSpec::gaussian(1.0, 0.3, 0.8)};
    const double z = 2.0, m = 1.0, h = 1e-5;
    auto en = dirac_branch(m, cplx(z));
    for (double a : {0.6, 1.1, 1.9}) {
        auto [f1m, f2m] = reg_at(p, en, a - h);
        auto [f1, f2] = reg_at(p, en, a);
        auto [f1p, f2p] = reg_at(p, en, a + h);
        double q = p.potential(a);
        cplx r1 = (f1p - f1m) / (2 * h) + (p.ell / a) * f1 - (z + m - q) * f2;
        cplx r2 = (f2p - f2m) / (2 * h) - (p.ell / a) * f2 + (z - m - q) * f1;
        double sc = std::max(std::abs(f1), std::abs(f2));
        CHECK(std::abs(r1) / sc < 1e-8);
        CHECK(std::abs(r2) / sc < 1e-8);
    }
}

TEST_CASE("volterra representation agrees with the ODE route at low z") {
    // F(r) = F0(r) - int_0^r U0(r) U0(t)^{-1} Vhat(t) F(t) dt, solved by
    // Picard iteration on a uniform grid; oracle for the integrator path.
    DiracParams p{1, 1.0, PotentialSpec::gaussian(0.8, 0.25, 0.5)};
    const double z = 1.6, a = 1.4;
    auto en = dirac_branch(p.m, cplx(z));
    const int N = 3000;
    std::vector<double> rs(N + 1);
    std::vector<cplx> F1(N + 1), F2(N + 1), G1(N + 1), G2(N + 1);
    double r0 = std::max(1e-6, 1e-4 * a);
    for (int i = 0; i <= N; ++i) rs[i] = r0 + (a - r0) * i / N;
    std::vector<DiracBasis> basis(N + 1);
    for (int i = 0; i <= N; ++i) basis[i] = free_basis(p, en, rs[i]);
    for (int i = 0; i <= N; ++i) { F1[i] = basis[i].F1; F2[i] = basis[i].F2; }
    cplx det = factorial(2 * p.ell - 1) / (en.eps * factorial(p.ell - 1));
    for (int iter = 0; iter < 12; ++iter) {
        std::vector<cplx> k1(N + 1), k2(N + 1); // U0(t)^{-1} Vhat(t) F(t)
        for (int j = 0; j <= N; ++j) {
            double q = p.potential(rs[j]);
            // Vhat = [[0, q], [-q, 0]]
            cplx w1 = q * F2[j], w2 = -q * F1[j];
            const auto& b = basis[j];
            // U0^{-1} = 1/det [[F2t, -F1t], [-F2, F1]]
            k1[j] = (b.F2t * w1 - b.F1t * w2) / det;
            k2[j] = (-b.F2 * w1 + b.F1 * w2) / det;
        }
        std::vector<cplx> I1(N + 1), I2(N + 1);
        I1[0] = I2[0] = 0.0;
        double h = (a - r0) / N;
        for (int i = 1; i <= N; ++i) {
            I1[i] = I1[i - 1] + 0.5 * h * (k1[i - 1] + k1[i]);
            I2[i] = I2[i - 1] + 0.5 * h * (k2[i - 1] + k2[i]);
        }
        for (int i = 0; i <= N; ++i) {
            G1[i] = basis[i].F1 - (basis[i].F1 * I1[i] + basis[i].F1t * I2[i]);
            G2[i] = basis[i].F2 - (basis[i].F2 * I1[i] + basis[i].F2t * I2[i]);
        }
        F1.swap(G1);
        F2.swap(G2);
    }
    auto [f1, f2] = reg_at(p, en, a);
    CHECK(std::abs(F1[N] - f1) / std::abs(f1) < 1e-5);
    CHECK(std::abs(F2[N] - f2) / std::abs(f2) < 1e-5);
}

TEST_CASE("J-transformation symmetry on the first-order system") {
    // if (f1,f2) solves with (l, q, z), then (f2,f1) solves with (-l, -q, -z)
    const int ell = 1;
    const double m = 1.0, z = 2.3, r0 = 1e-4, a = 1.7;
    auto q = [](double r) { return 0.3 * std::sin(r); };
    auto run = [&](int l, double zz, double sgn_q, State<double, 2> y) {
        auto rhs = [&](double r, const State<double, 2>& s, State<double, 2>& d) {
            double qv = sgn_q * q(r);
            d[0] = -(l / r) * s[0] + (zz + m - qv) * s[1];
            d[1] = (l / r) * s[1] - (zz - m - qv) * s[0];
        };
        integrate_ode<double, 2>(rhs, r0, a, y, {1e-12, 1e-14});
        return y;
    };
    State<double, 2> start{1e-5, 0.7};
    auto fwd = run(ell, z, 1.0, start);
    auto swapped = run(-ell, -z, -1.0, {start[1], start[0]});
    CHECK(swapped[0] == Approx(fwd[1]).epsilon(1e-9));
    CHECK(swapped[1] == Approx(fwd[0]).epsilon(1e-9));
}

TEST_CASE("eigenvalues_bc: free residual decays across index windows") {
    DiracParams p{1, 1.0, PotentialSpec::zero()};
    auto spec = eigenvalues_bc(p, pi, 0.5 * pi, 1, 40, 1e-10);
    auto res = [&](int n) {
        return std::abs(pi * spec.z[n - 1] - pi * (n + 0.5 * p.ell));
    };
    double early = 0, late = 0;
    for (int n = 3; n <= 6; ++n) early = std::max(early, res(n));
    for (int n = 20; n <= 40; ++n) late = std::max(late, res(n));
    CHECK(late < early);
}

TEST_CASE("eigenvalues_bc: psi = 0 and psi = pi/2 interlace") {
    DiracParams p{1, 1.0, PotentialSpec::zero()};
    auto s0 = eigenvalues_bc(p, pi, 0.0, 1, 6, 1e-10);
    auto sh = eigenvalues_bc(p, pi, 0.5 * pi, 1, 6, 1e-10);
    for (int i = 0; i < 6; ++i) {
        CHECK(s0.z[i] < sh.z[i]);
        if (i + 1 < 6) CHECK(sh.z[i] < s0.z[i + 1]);
    }
}

TEST_CASE("eigenvalues_bc rejects bad windows") {
    DiracParams p{1, 1.0, PotentialSpec::zero()};
    CHECK_THROWS_AS(eigenvalues_bc(p, pi, 2.0, 1, 3), domain_error);
    CHECK_THROWS_AS(eigenvalues_bc(p, pi, 0.0, 3, 1), domain_error);
}

TEST_CASE("estimate_defect_dirac: free and constant potentials") {
    DiracParams p0{1, 1.0, PotentialSpec::zero()};
    auto s0 = eigenvalues_bc(p0, pi, 0.5 * pi, 1, 40, 1e-10);
    auto e0 = estimate_defect_dirac(s0, pi, 1, 0.5 * pi);
    CHECK(std::abs(e0.delta) < 5e-3);

    const double c = 0.1;
    DiracParams pc{1, 1.0, PotentialSpec::constant(c)};
    auto sc = eigenvalues_bc(pc, pi, 0.5 * pi, 1, 40, 1e-10);
    auto ec = estimate_defect_dirac(sc, pi, 1, 0.5 * pi);
    CHECK(std::abs(ec.delta - c * pi) / (c * pi) < 0.02);
}

TEST_CASE("estimate_defect_dirac: q = sin on [0, pi] gives 2") {
    DiracParams p{1, 1.0, PotentialSpec::sine()};
    auto s = eigenvalues_bc(p, pi, 0.5 * pi, 1, 40, 1e-10);
    auto e = estimate_defect_dirac(s, pi, 1, 0.5 * pi);
    CHECK(std::abs(e.delta - 2.0) / 2.0 < 0.05);
}

TEST_CASE("boundary-form phase shift equals minus the defect (constant q)") {
    // Theorem-5.1-style check: the phase of F1 at fixed r shifts by -delta(r)
    // against the free solution, with an O(1/z) remainder.
    const double m = 1.0, a = 2.0, c = 0.2;
    DiracParams pc{1, m, PotentialSpec::constant(c)};
    DiracParams p0{1, m, PotentialSpec::zero()};
    auto phase = [&](const DiracParams& p, double z) {
        auto en = dirac_branch(m, cplx(z));
        auto sol = integrate_regular_dirac(p, en, a, 1e-11);
        cplx f1 = sol.f1.back();
        cplx f2 = sol.f2.back();
        // derivative from the system itself
        cplx d1 = -(p.ell / a) * f1 + (z + m - p.potential(a)) * f2;
        double s = std::sqrt(z * z - m * m);
        return std::atan((s * f1 / d1).real());
    };
    std::vector<double> zs{25.0, 50.0, 100.0}, dphi, xs, ws;
    for (double z : zs) {
        double d = phase(pc, z) - phase(p0, z);
        while (d > 0.5 * pi) d -= pi;
        while (d < -0.5 * pi) d += pi;
        dphi.push_back(d);
        xs.push_back(1.0 / z);
        ws.push_back(z * z);
    }
    double fitted = extrapolate_poly_fit(xs, dphi, ws, 1);
    CHECK(std::abs(-fitted - c * a) / (c * a) < 0.02);
}

TEST_CASE("tail_defect_solution: zero potential gives (i, 1) exactly") {
    DiracParams p{1, 1.0, PotentialSpec::zero()};
    auto td = tail_defect_solution(p, 0.8, {10.0, 50.0});
    CHECK(std::abs(td.delta_exact) == 0.0);
    for (std::size_t i = 0; i < td.z_values.size(); ++i) {
        CHECK(std::abs(td.v2[i] - cplx(1.0, 0.0)) < 2e-2);
        CHECK(std::abs(td.delta_est[i]) < 1e-2);
    }
    CHECK(std::abs(td.delta_extrapolated) < 1e-3);
}

TEST_CASE("tail_defect_solution: tail integral pi flips the limit vector") {
    // gaussian with integral pi centred well past r; from r = 0.8 the phase
    // factor is e^{-i pi} = -1
    double amp = pi / (0.4 * std::sqrt(2.0 * pi));
    DiracParams p{1, 1.0, PotentialSpec::gaussian(3.0, 0.4, amp)};
    auto td = tail_defect_solution(p, 0.8, {50.0, 250.0});
    CHECK(td.delta_exact == Approx(pi).epsilon(1e-6));
    CHECK(std::abs(td.limit1 - cplx(0.0, -1.0)) < 1e-6);
    CHECK(std::abs(td.limit2 - cplx(-1.0, 0.0)) < 1e-6);
    CHECK(std::abs(td.v2.back() - td.limit2) < 5e-3);
}

TEST_CASE("tail_defect_solution: gaussian tail error decreases in z") {
    DiracParams p{1, 1.0, PotentialSpec::gaussian(2.0, 0.35, 1.2)};
    double r = 0.9;
    auto td = tail_defect_solution(p, r, {10.0, 50.0, 250.0});
    std::vector<double> errs;
    for (std::size_t i = 0; i < td.z_values.size(); ++i) {
        errs.push_back(std::hypot(std::abs(td.v1[i] - td.limit1), std::abs(td.v2[i] - td.limit2)));
    }
    CHECK(errs[1] < errs[0]);
    CHECK(errs[2] < errs[1]);
    CHECK(std::abs(td.delta_extrapolated - td.delta_exact) / td.delta_exact < 0.01);
}

TEST_CASE("potential matrix layout") {
    DiracParams p{2, 1.5, PotentialSpec::zero()};
    auto V = potential_matrix(p, 2.0, 0.3);
    CHECK(V[0][0] == Approx(-1.0));
    CHECK(V[1][1] == Approx(1.0));
    CHECK(V[0][1] == Approx(1.2));
    CHECK(V[1][0] == Approx(1.8));
}
