#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "sspec/errors.hpp"
#include "sspec/numeric.hpp"
#include "sspec/potential.hpp"
#include "sspec/spectrum.hpp"
#include "sspec/sturm.hpp"

namespace sspec {

/// Radial Dirichlet problem: y'' + (z - l(l+1)/r^2 - q) y = 0, y(0)=y(a)=0.
struct RadialProblem {
    PotentialSpec potential;
    int ell = 0;
    double a = 1.0;

    void validate() const {
        if (ell < 0) throw domain_error("RadialProblem: ell must be >= 0");
        if (!(a > 0)) throw domain_error("RadialProblem: endpoint must be positive");
        if (a > potential.span_max() * (1 + 1e-12))
            throw domain_error("RadialProblem: endpoint outside potential grid span");
    }
};

struct SolutionSample {
    std::vector<double> r, u, du;
};

namespace detail {

/// Frobenius start u = r^{l+1}(1 + c1 r + c2 r^2 + c3 r^3), coefficients from
/// the local expansion q ~ q0 + q1 r + q2 r^2.  c1 vanishes for integrable q.
/// Rescaled so u(r0) = r0^{l+1} exactly.
inline std::pair<double, double> frobenius_start(const PotentialSpec& q, int ell, double z,
                                                 double r0) {
    auto [q0, q1, q2] = q.taylor_origin();
    (void)q2;
    double c1 = 0.0;
    double c2 = (q0 - z) / (4.0 * ell + 6.0);
    double c3 = q1 / (6.0 * ell + 12.0);
    double S = 1.0 + r0 * (c1 + r0 * (c2 + r0 * c3));
    double Sp = c1 + r0 * (2.0 * c2 + r0 * 3.0 * c3);
    double rl = std::pow(r0, ell + 1);
    double u = rl;                                  // normalized
    double up = rl * ((ell + 1.0) / r0 + Sp / S);   // (r^{l+1} S)'/S at r0
    return {u, up};
}

inline double origin_cut(double a) { return std::max(1e-6, 1e-4 * a); }

} // namespace detail

/// Integrate the regular solution u ~ r^{l+1} from the origin to a for a
/// given z; samples are the accepted integrator steps.
inline SolutionSample integrate_regular(const RadialProblem& prob, double z, double rtol = 1e-11) {
    prob.validate();
    if (!std::isfinite(z)) throw domain_error("integrate_regular: non-finite z");
    const double r0 = detail::origin_cut(prob.a);
    auto [u0, up0] = detail::frobenius_start(prob.potential, prob.ell, z, r0);
    const double ll1 = double(prob.ell) * (prob.ell + 1.0);
    SolutionSample out;
    out.r.push_back(r0);
    out.u.push_back(u0);
    out.du.push_back(up0);
    State<double, 2> y{u0, up0};
    OdeOptions opt;
    opt.rtol = rtol;
    opt.atol = 1e-13 * std::max(std::abs(u0), 1e-30);
    auto rhs = [&](double r, const State<double, 2>& s, State<double, 2>& d) {
        d[0] = s[1];
        d[1] = (ll1 / (r * r) + prob.potential(r) - z) * s[0];
    };
    auto cb = [&](double r, State<double, 2>& s) -> bool {
        out.r.push_back(r);
        out.u.push_back(s[0]);
        out.du.push_back(s[1]);
        opt.atol = 1e-13 * std::max({std::abs(s[0]), std::abs(s[1]), 1e-30});
        return false;
    };
    integrate_ode<double, 2>(rhs, r0, prob.a, y, opt, cb);
    return out;
}

/// sqrt(z_n) predicted by the defect law:
///   (pi/a)(n + l/2) + (a d - l(l+1)) / (2 (n + l/2) pi a).
inline double asymptotic_sqrt_z(int n, double a, int ell, double delta) {
    if (n < 1) throw domain_error("asymptotic_sqrt_z: n must be >= 1");
    double nn = n + 0.5 * ell;
    return (pi / a) * nn + (a * delta - double(ell) * (ell + 1.0)) / (2.0 * nn * pi * a);
}

/// Asymptotic location of the n-th positive root of M_{0,l+1/2}(2iz):
///   pi(n + l/2) - l(l+1)/(pi(2n+l)).
inline double whittaker_zero_asymptotic(int n, int ell) {
    if (n < 1) throw domain_error("whittaker_zero_asymptotic: n must be >= 1");
    return pi * (n + 0.5 * ell) - double(ell) * (ell + 1.0) / (pi * (2.0 * n + ell));
}

/// First n_max Dirichlet eigenvalues, indexed by interior node count.
inline EigenSpectrum eigenvalues_dirichlet(const RadialProblem& prob, int n_max,
                                           double rtol = 1e-11) {
    prob.validate();
    if (n_max < 1) throw domain_error("eigenvalues_dirichlet: n_max must be >= 1");
    const double r0 = detail::origin_cut(prob.a);
    const double ll1 = double(prob.ell) * (prob.ell + 1.0);
    const double delta_hint = prob.potential.integral_from_zero(prob.a);
    auto V = [&](double r) { return ll1 / (r * r) + prob.potential(r); };
    auto init = [&](double z) { return detail::frobenius_start(prob.potential, prob.ell, z, r0); };

    EigenSpectrum spec;
    spec.first_index = 1;
    const double halfwin = 0.5 * pi / prob.a;
    auto signed_sq = [](double s) { return s * std::abs(s); };
    for (int n = 1; n <= n_max; ++n) {
        double s_pred = asymptotic_sqrt_z(n, prob.a, prob.ell, delta_hint);
        double z_lo = signed_sq(s_pred - halfwin);
        double z_hi = signed_sq(s_pred + halfwin);
        double resid = 0.0;
        double zn = dirichlet_eigenvalue(V, init, r0, prob.a, n, z_lo, z_hi, rtol, &resid);
        spec.z.push_back(zn);
        spec.residual.push_back(resid);
    }
    spec.validate();
    return spec;
}

/// Per-level defect estimates inverted from the sqrt(z_n) law, extrapolated
/// to n -> infinity by a weighted fit in 1/n over the top third of levels.
inline DefectEstimate estimate_defect(const EigenSpectrum& spectrum, double a, int ell) {
    const int m = int(spectrum.size());
    if (m < 5) throw domain_error("estimate_defect: need at least 5 levels");
    std::vector<double> idx(m), per(m);
    for (int i = 0; i < m; ++i) {
        double n = spectrum.index(i);
        double nn = n + 0.5 * ell;
        double sq = std::sqrt(spectrum.z[i]);
        idx[i] = n;
        per[i] = (2.0 * nn * pi * a * (sq - pi * nn / a) + double(ell) * (ell + 1.0)) / a;
    }
    return detail::extrapolate_defect(idx, std::move(per));
}

} // namespace sspec
