#pragma once

#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "sspec/branch.hpp"
#include "sspec/errors.hpp"
#include "sspec/numeric.hpp"
#include "sspec/ode.hpp"
#include "sspec/potential.hpp"
#include "sspec/specfun.hpp"
#include "sspec/spectrum.hpp"

namespace sspec {

/// Radial Dirac system
///   (d/dr + l/r) f1 - (z + m - q) f2 = 0
///   (d/dr - l/r) f2 + (z - m - q) f1 = 0
/// with l >= 1 after the symmetry reduction to positive angular numbers.
struct DiracParams {
    int ell = 1;
    double m = 1.0;
    PotentialSpec potential = PotentialSpec::zero();

    void validate() const {
        if (ell < 1) throw domain_error("DiracParams: ell must be >= 1 (reduced form)");
        if (!(m > 0)) throw domain_error("DiracParams: mass must be positive");
    }
};

/// Free basis at one radius: columns of U0 are the regular (F1,F2) and
/// non-regular (F1t,F2t) solutions; Q values are the underlying
/// hypergeometric factors.
struct DiracBasis {
    double r = 0;
    cplx eps;
    cplx F1, F2;    // regular column
    cplx F1t, F2t;  // non-regular column
    cplx Q1, Q2, Q1t, Q2t;
    cplx det() const { return F1 * F2t - F1t * F2; }
};

namespace detail {

// ---- stable closed forms for Phi(l, 2l+1, rho) and Phi(l+1, 2l+1, rho) ----
//
// For |rho| <= 12 the Kummer series is accurate; beyond that the integral
// representations int_{-1}^{1} e^{t rho/2} (1-t^2)^{l-1} (1 -+ t) dt evaluate
// exactly through the polynomial antiderivative, which stays stable on the
// imaginary axis where the series cancels catastrophically.

struct EndpointDerivs {
    std::vector<double> at_plus1, at_minus1; // p^(j)(+-1)
};

inline EndpointDerivs poly_endpoint_derivs(std::vector<double> coeff) {
    EndpointDerivs out;
    auto eval = [](const std::vector<double>& c, double x) {
        double v = 0;
        for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
        return v;
    };
    std::vector<double> d = std::move(coeff);
    while (!d.empty()) {
        out.at_plus1.push_back(eval(d, 1.0));
        out.at_minus1.push_back(eval(d, -1.0));
        std::vector<double> nd;
        for (std::size_t i = 1; i < d.size(); ++i) nd.push_back(double(i) * d[i]);
        d = std::move(nd);
    }
    return out;
}

// coefficient array of (1-t^2)^{l-1} * (1 - sign*t)
inline std::vector<double> dirac_poly(int ell, int sign) {
    std::vector<double> base{1.0};
    for (int k = 0; k < ell - 1; ++k) {
        std::vector<double> next(base.size() + 2, 0.0);
        for (std::size_t i = 0; i < base.size(); ++i) {
            next[i] += base[i];
            next[i + 2] -= base[i];
        }
        base = std::move(next);
    }
    std::vector<double> out(base.size() + 1, 0.0);
    for (std::size_t i = 0; i < base.size(); ++i) {
        out[i] += base[i];
        out[i + 1] -= sign * base[i];
    }
    return out;
}

inline const EndpointDerivs& dirac_endpoint_table(int ell, int sign) {
    static std::map<std::pair<int, int>, EndpointDerivs> cache;
    auto key = std::make_pair(ell, sign);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, poly_endpoint_derivs(dirac_poly(ell, sign))).first;
    return it->second;
}

// e^{rho/2} * int_{-1}^{1} p(t) e^{t rho/2} dt via the antiderivative
inline cplx exp_weighted_integral(const EndpointDerivs& d, cplx rho) {
    cplx s = 0.5 * rho;
    cplx inv = 1.0 / s, powj = inv;
    cplx erho = std::exp(rho);
    cplx sum = 0.0;
    double sgn = 1.0;
    for (std::size_t j = 0; j < d.at_plus1.size(); ++j) {
        sum += sgn * powj * (erho * d.at_plus1[j] - d.at_minus1[j]);
        powj *= inv;
        sgn = -sgn;
    }
    return sum;
}

inline cplx phi_dirac(int ell, int which, cplx rho) {
    // which = 0 -> Phi(l, 2l+1, rho), which = 1 -> Phi(l+1, 2l+1, rho)
    if (std::abs(rho) <= 12.0)
        return kummer_phi({cplx(double(ell + which)), cplx(2.0 * ell + 1.0)}, rho);
    double C = std::pow(2.0, -2 * ell) * factorial(2 * ell) /
               (factorial(ell) * factorial(ell - 1));
    return C * exp_weighted_integral(dirac_endpoint_table(ell, which == 0 ? 1 : -1), rho);
}

// Psi(l, 2l+1, rho) and Psi(l+1, 2l+1, rho): exact finite sums for all rho != 0
inline cplx psi_dirac(int ell, int which, cplx rho) {
    int top = which == 0 ? ell : ell - 1;
    cplx sum = 0.0, rp = 1.0;
    for (int i = 0; i <= top; ++i) {
        sum += binomial(top, i) * factorial(2 * ell - i - 1) * rp;
        rp *= rho;
    }
    cplx r2l = 1.0;
    for (int k = 0; k < 2 * ell; ++k) r2l *= rho;
    return sum / (r2l * factorial(ell - 1 + which));
}

} // namespace detail

/// Free-solution basis U0(r) built from the confluent-hypergeometric factors
///   Q1 = Phi(l,2l+1,rho), Q2 = -Phi(l+1,2l+1,rho),
///   Q1t = Psi(l,2l+1,rho), Q2t = l Psi(l+1,2l+1,rho),  rho = 2 r eps.
/// det U0 = Gamma(2l)/(eps Gamma(l)) independently of r.
inline DiracBasis free_basis(const DiracParams& params, const BranchedEnergy& energy, double r) {
    params.validate();
    if (!(r > 0)) throw domain_error("free_basis: r must be positive");
    const int ell = params.ell;
    cplx rho = 2.0 * r * energy.eps;
    if (rho == 0.0) throw domain_error("free_basis: 2 r eps = 0");
    DiracBasis b;
    b.r = r;
    b.eps = energy.eps;
    b.Q1 = detail::phi_dirac(ell, 0, rho);
    b.Q2 = -detail::phi_dirac(ell, 1, rho);
    b.Q1t = detail::psi_dirac(ell, 0, rho);
    b.Q2t = double(ell) * detail::psi_dirac(ell, 1, rho);
    cplx pre = std::exp(-0.5 * rho), rp = r;
    for (int k = 0; k < ell - 1; ++k) rp *= rho;
    pre *= rp;
    b.F1 = energy.sqrt_m_plus * pre * (b.Q1 + b.Q2);
    b.F2 = -energy.sqrt_m_minus * pre * (b.Q1 - b.Q2);
    b.F1t = energy.sqrt_m_plus * pre * (b.Q1t + b.Q2t);
    b.F2t = -energy.sqrt_m_minus * pre * (b.Q1t - b.Q2t);
    return b;
}

struct DiracSolutionSample {
    std::vector<double> r;
    std::vector<cplx> f1, f2;
};

namespace detail {

// series start f2 = r^l (b0 + b1 r + b2 r^2 + b3 r^3), f1 = r^{l+1}(a0 + ...)
template <class Scalar>
inline void dirac_series_start(const PotentialSpec& q, int ell, double m, double z, Scalar b0,
                               double r0, Scalar& f1, Scalar& f2) {
    auto [q0, q1, q2] = q.taylor_origin();
    Scalar a0 = (z + m - q0) * b0 / (2.0 * ell + 1.0);
    Scalar b1 = Scalar(0.0);
    Scalar a1 = -q1 * b0 / (2.0 * ell + 2.0);
    Scalar b2 = -(z - m - q0) * a0 / 2.0;
    Scalar a2 = ((z + m - q0) * b2 - q1 * b1 - q2 * b0) / (2.0 * ell + 3.0);
    Scalar b3 = (-(z - m - q0) * a1 + q1 * a0) / 3.0;
    Scalar a3 = ((z + m - q0) * b3 - q1 * b2 - q2 * b1) / (2.0 * ell + 4.0);
    double rl = std::pow(r0, ell);
    f2 = rl * (b0 + r0 * (b1 + r0 * (b2 + r0 * b3)));
    f1 = rl * r0 * (a0 + r0 * (a1 + r0 * (a2 + r0 * a3)));
}

} // namespace detail

/// Regular solution of the full system on [r0, a], normalized to match the
/// free basis column (F ~ F0 for q = 0).  Integrates the first-order system
/// from a series start; equivalent to the Volterra representation.
inline DiracSolutionSample integrate_regular_dirac(const DiracParams& params,
                                                   const BranchedEnergy& energy, double a,
                                                   double rtol = 1e-11) {
    params.validate();
    if (!(a > 0)) throw domain_error("integrate_regular_dirac: endpoint must be positive");
    if (std::abs(energy.eps * energy.eps - (cplx(params.m * params.m) - energy.z * energy.z)) >
        1e-10 * (1.0 + std::abs(energy.z * energy.z)))
        throw domain_error("integrate_regular_dirac: branch-inconsistent energy");
    const int ell = params.ell;
    const double m = params.m;
    if (std::abs(energy.z.imag()) > 0)
        throw domain_error("integrate_regular_dirac: real energies only");
    const double z = energy.z.real();
    const double r0 = std::max(1e-6, 1e-4 * a);

    cplx b0 = -2.0 * energy.sqrt_m_minus;
    for (int k = 0; k < ell - 1; ++k) b0 *= 2.0 * energy.eps;
    cplx f1, f2;
    detail::dirac_series_start<cplx>(params.potential, ell, m, z, b0, r0, f1, f2);

    DiracSolutionSample out;
    out.r.push_back(r0);
    out.f1.push_back(f1);
    out.f2.push_back(f2);
    if (a <= r0) return out;

    State<cplx, 2> y{f1, f2};
    OdeOptions opt;
    opt.rtol = rtol;
    opt.atol = 1e-13 * std::max(std::abs(f1), std::abs(f2));
    auto rhs = [&](double r, const State<cplx, 2>& s, State<cplx, 2>& d) {
        double q = params.potential(r);
        d[0] = -(ell / r) * s[0] + (z + m - q) * s[1];
        d[1] = (ell / r) * s[1] - (z - m - q) * s[0];
    };
    auto cb = [&](double r, State<cplx, 2>& s) -> bool {
        out.r.push_back(r);
        out.f1.push_back(s[0]);
        out.f2.push_back(s[1]);
        opt.atol = 1e-13 * std::max({std::abs(s[0]), std::abs(s[1]), 1e-30});
        return false;
    };
    integrate_ode<cplx, 2>(rhs, r0, a, y, opt, cb);
    return out;
}

enum class BoundaryReading {
    f1_sin_f2_cos, // F1 sin(psi) + F2 cos(psi) = 0
    f2_sin_f1_cos  // swapped reading of the boundary form
};

namespace detail {

struct DiracShot {
    double g;   // normalized boundary form at r = a
    double amp; // max component amplitude
};

inline DiracShot dirac_shoot(const DiracParams& params, double z, double a, double psi,
                             BoundaryReading reading, double rtol) {
    const int ell = params.ell;
    const double m = params.m;
    const double r0 = std::max(1e-6, 1e-4 * a);
    double f1, f2;
    dirac_series_start<double>(params.potential, ell, m, z, 1.0, r0, f1, f2);
    State<double, 2> y{f1, f2};
    double amp = std::max(std::abs(f1), std::abs(f2));
    OdeOptions opt;
    opt.rtol = rtol;
    opt.atol = 1e-13 * std::max(amp, 1e-30);
    auto rhs = [&](double r, const State<double, 2>& s, State<double, 2>& d) {
        double q = params.potential(r);
        d[0] = -(ell / r) * s[0] + (z + m - q) * s[1];
        d[1] = (ell / r) * s[1] - (z - m - q) * s[0];
    };
    auto cb = [&](double, State<double, 2>& s) -> bool {
        amp = std::max({amp, std::abs(s[0]), std::abs(s[1])});
        opt.atol = 1e-13 * std::max({std::abs(s[0]), std::abs(s[1]), 1e-30});
        return false;
    };
    integrate_ode<double, 2>(rhs, r0, a, y, opt, cb);
    double form = reading == BoundaryReading::f1_sin_f2_cos
                      ? y[0] * std::sin(psi) + y[1] * std::cos(psi)
                      : y[1] * std::sin(psi) + y[0] * std::cos(psi);
    return {form / std::max(amp, 1e-300), amp};
}

} // namespace detail

/// Eigenvalues of the boundary problem F1(a) sin(psi) + F2(a) cos(psi) = 0 on
/// the z > m branch, indexed against the counting law
/// a z_n = pi(n + l/2) + psi - pi/2 + delta(a) + o(1).
inline EigenSpectrum eigenvalues_bc(const DiracParams& params, double a, double psi, int n_lo,
                                    int n_hi, double rtol = 1e-10,
                                    BoundaryReading reading = BoundaryReading::f1_sin_f2_cos) {
    params.validate();
    if (!(a > 0)) throw domain_error("eigenvalues_bc: endpoint must be positive");
    if (std::abs(psi) > 0.5 * pi + 1e-12)
        throw domain_error("eigenvalues_bc: psi must lie in [-pi/2, pi/2]");
    if (n_lo < 1 || n_hi < n_lo) throw domain_error("eigenvalues_bc: bad index window");
    const double delta_hint = params.potential.integral_from_zero(a);
    auto g = [&](double z) { return detail::dirac_shoot(params, z, a, psi, reading, rtol).g; };

    EigenSpectrum spec;
    spec.first_index = n_lo;
    const double spacing = pi / a;
    for (int n = n_lo; n <= n_hi; ++n) {
        double zc = (pi * (n + 0.5 * params.ell) + psi - 0.5 * pi + delta_hint) / a;
        double lo = std::max(zc - 0.5 * spacing, params.m * (1.0 + 1e-9));
        double hi = zc + 0.5 * spacing;
        if (hi <= lo) throw bracketing_error("eigenvalues_bc: window collapsed below z = m");
        // scan the window; exactly one sign crossing is expected
        const int K = 8;
        std::vector<double> zs(K + 1), gs(K + 1);
        for (int k = 0; k <= K; ++k) {
            zs[k] = lo + (hi - lo) * k / K;
            gs[k] = g(zs[k]);
        }
        int crossings = 0, at = -1;
        for (int k = 0; k < K; ++k)
            if (gs[k] == 0.0 || (gs[k] > 0) != (gs[k + 1] > 0)) { ++crossings; at = k; }
        if (crossings != 1)
            throw bracketing_error("eigenvalues_bc: window for n=" + std::to_string(n) +
                                   " contains " + std::to_string(crossings) + " roots");
        double zn = brent_root(g, zs[at], zs[at + 1], 0.0, 1e-14);
        spec.z.push_back(zn);
        spec.residual.push_back(std::abs(g(zn)));
    }
    spec.validate();
    return spec;
}

/// Inversion of the boundary counting law: per-level
/// delta_n = a z_n - pi(n + l/2) - psi + pi/2, extrapolated over large n.
inline DefectEstimate estimate_defect_dirac(const EigenSpectrum& spectrum, double a, int ell,
                                            double psi) {
    const int m = int(spectrum.size());
    if (m < 5) throw domain_error("estimate_defect_dirac: need at least 5 levels");
    std::vector<double> idx(m), per(m);
    for (int i = 0; i < m; ++i) {
        double n = spectrum.index(i);
        idx[i] = n;
        per[i] = a * spectrum.z[i] - pi * (n + 0.5 * ell) - psi + 0.5 * pi;
    }
    return detail::extrapolate_defect(idx, std::move(per));
}

/// Result of the tail-defect check at one radius.
struct TailDefect {
    double delta_exact = 0.0;             // integral of q over [r, inf)
    cplx limit1, limit2;                  // e^{-i delta} (i, 1)
    std::vector<double> z_values;
    std::vector<cplx> v1, v2;             // normalized solution components per z
    std::vector<double> delta_est;        // phase estimates per z
    double delta_extrapolated = 0.0;
};

/// Solve the system backward from beyond the potential tail with the free
/// decaying column as data, normalize by -2 sqrt(m+z) e^{r eps}, and compare
/// with the z -> infinity limit e^{-i delta(r)} (i, 1).
inline TailDefect tail_defect_solution(const DiracParams& params, double r,
                                       const std::vector<double>& z_over_m = {10.0, 50.0, 250.0},
                                       double rtol = 1e-11) {
    params.validate();
    if (!(r > 0)) throw domain_error("tail_defect_solution: r must be positive");
    TailDefect out;
    out.delta_exact = params.potential.tail_integral(r);
    cplx ph = std::exp(cplx(0.0, -out.delta_exact));
    out.limit1 = ph * cplx(0.0, 1.0);
    out.limit2 = ph;

    // cutoff beyond which the tail integral is negligible
    double R = std::max(r + 1.0, 2.0);
    int guard = 0;
    while (std::abs(params.potential.tail_integral(R)) > 1e-12) {
        R *= 1.5;
        if (++guard > 80) throw solver_error("tail_defect_solution: potential tail does not decay");
    }

    for (double zf : z_over_m) {
        double z = zf * params.m;
        auto en = dirac_branch(params.m, cplx(z));
        auto basis = free_basis(params, en, R);
        State<cplx, 2> y{basis.F1t, basis.F2t};
        OdeOptions opt;
        opt.rtol = rtol;
        opt.atol = 1e-14 * std::max(std::abs(y[0]), std::abs(y[1]));
        auto rhs = [&](double rr, const State<cplx, 2>& s, State<cplx, 2>& d) {
            double q = params.potential(rr);
            d[0] = -(params.ell / rr) * s[0] + (z + params.m - q) * s[1];
            d[1] = (params.ell / rr) * s[1] - (z - params.m - q) * s[0];
        };
        integrate_ode<cplx, 2>(rhs, R, r, y, opt);
        cplx norm = -2.0 * en.sqrt_m_plus * std::exp(r * en.eps);
        cplx v1 = norm * y[0], v2 = norm * y[1];
        out.z_values.push_back(z);
        out.v1.push_back(v1);
        out.v2.push_back(v2);
        out.delta_est.push_back(-std::arg(v2));
    }
    std::vector<double> xs, ws;
    for (double z : out.z_values) {
        xs.push_back(1.0 / z);
        ws.push_back(z * z);
    }
    out.delta_extrapolated =
        xs.size() >= 2 ? extrapolate_poly_fit(xs, out.delta_est, ws, 1) : out.delta_est.back();
    return out;
}

/// The matrix V of the first-order form f' = (i z sigma2 + V) f:
/// diag(-l/r, l/r), off-diagonal (m - q, m + q).
inline std::array<std::array<double, 2>, 2> potential_matrix(const DiracParams& params, double r,
                                                             double q_value) {
    return {{{-double(params.ell) / r, params.m - q_value},
             {params.m + q_value, double(params.ell) / r}}};
}

} // namespace sspec
