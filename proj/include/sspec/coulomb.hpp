#pragma once

#include <cmath>
#include <vector>

#include "sspec/branch.hpp"
#include "sspec/dirac.hpp"
#include "sspec/errors.hpp"
#include "sspec/numeric.hpp"
#include "sspec/ode.hpp"
#include "sspec/potential.hpp"
#include "sspec/specfun.hpp"

namespace sspec {

/// Coulomb-type extension: Schrodinger picks up a +2a/r term, the Dirac
/// system an a/r term with the effective origin exponent
/// omega = sqrt(l^2 - a^2).
struct CoulombParams {
    double a_coul = 0.0;
    int ell = 0;
    double m = 1.0; // Dirac only

    double omega() const { return std::sqrt(double(ell) * ell - a_coul * a_coul); }

    void validate_schrodinger() const {
        if (a_coul == 0.0) throw domain_error("CoulombParams: a_coul must be nonzero");
        if (ell < 0) throw domain_error("CoulombParams: ell must be >= 0");
    }
    void validate_dirac() const {
        if (a_coul == 0.0) throw domain_error("CoulombParams: a_coul must be nonzero");
        if (ell < 1) throw domain_error("CoulombParams: ell must be >= 1 (reduced form)");
        if (!(m > 0)) throw domain_error("CoulombParams: mass must be positive");
        if (!(double(ell) * ell > a_coul * a_coul))
            throw domain_error("CoulombParams: need l^2 > a^2 (subcritical)");
    }
};

namespace detail {

// d/dx of W_{kappa, l+1/2}(x) through Psi'(a,c,x) = -a Psi(a+1,c+1,x)
inline cplx whittaker_w_deriv(cplx kappa, int ell, cplx x) {
    cplx c(2.0 * ell + 2.0), alpha = cplx(ell + 1.0) - kappa;
    cplx psi = tricomi_psi(alpha, c, x);
    cplx dpsi = -alpha * tricomi_psi(alpha + 1.0, c + 1.0, x);
    cplx xp = 1.0;
    for (int k = 0; k <= ell; ++k) xp *= x;
    return std::exp(-0.5 * x) * xp * ((-0.5 + (ell + 1.0) / x) * psi + dpsi);
}

} // namespace detail

/// The free pair of the Coulomb Schrodinger equation:
///   u1 = (2 eps)^{-(l+1)} M_{a/eps, l+1/2}(2 r eps)   (regular)
///   u2 = (2 eps)^{l}      W_{a/eps, l+1/2}(2 r eps)   (decaying)
inline std::pair<cplx, cplx> coulomb_schrodinger_pair(const CoulombParams& params,
                                                      const BranchedEnergy& energy, double r) {
    params.validate_schrodinger();
    if (!(r > 0)) throw domain_error("coulomb_schrodinger_pair: r must be positive");
    cplx eps = energy.eps;
    cplx x = 2.0 * r * eps;
    if (x == 0.0) throw domain_error("coulomb_schrodinger_pair: 2 r eps = 0");
    cplx kappa = params.a_coul / eps;
    cplx pw_m = 1.0, pw_p = 1.0;
    for (int k = 0; k <= params.ell; ++k) pw_m *= 2.0 * eps;        // (2eps)^{l+1}
    for (int k = 0; k < params.ell; ++k) pw_p *= 2.0 * eps;         // (2eps)^{l}
    cplx u1 = whittaker_m(kappa, params.ell, x) / pw_m;
    cplx c(2.0 * params.ell + 2.0), alpha = cplx(params.ell + 1.0) - kappa;
    cplx xp = 1.0;
    for (int k = 0; k <= params.ell; ++k) xp *= x;
    cplx w = std::exp(-0.5 * x) * xp * tricomi_psi(alpha, c, x);
    cplx u2 = pw_p * w;
    return {u1, u2};
}

struct CoulombDecaying {
    std::vector<double> r;
    std::vector<cplx> u, du;
    double cutoff = 0.0; // R actually used
};

/// Decaying solution of y'' + (z + 2a/r - l(l+1)/r^2 - q) y = 0 obtained by
/// integrating backward from a cutoff R past the potential support with
/// (u2, u2') as data; equivalent to the tail Volterra equation.  Doubling R
/// must not move the solution (cutoff sensitivity check).
inline CoulombDecaying coulomb_schrodinger_decaying(const CoulombParams& params,
                                                    const BranchedEnergy& energy,
                                                    const PotentialSpec& q,
                                                    const std::vector<double>& r_eval,
                                                    double rtol = 1e-11, bool check_cutoff = true) {
    params.validate_schrodinger();
    if (r_eval.empty()) throw domain_error("coulomb_schrodinger_decaying: empty evaluation grid");
    for (std::size_t i = 0; i < r_eval.size(); ++i) {
        if (!(r_eval[i] > 0)) throw domain_error("coulomb_schrodinger_decaying: r must be positive");
        if (i > 0 && r_eval[i] <= r_eval[i - 1])
            throw domain_error("coulomb_schrodinger_decaying: grid must increase");
    }
    double R = std::max(r_eval.back() + 1.0, 2.0);
    int guard = 0;
    while (std::abs(q.tail_integral(R)) > 1e-12) {
        R *= 1.5;
        if (++guard > 80)
            throw solver_error("coulomb_schrodinger_decaying: potential tail does not decay");
    }

    auto solve_from = [&](double Rcut) {
        cplx eps = energy.eps;
        cplx pw_p = 1.0;
        for (int k = 0; k < params.ell; ++k) pw_p *= 2.0 * eps;
        cplx x = 2.0 * Rcut * eps;
        cplx cc(2.0 * params.ell + 2.0), alpha = cplx(params.ell + 1.0) - params.a_coul / eps;
        cplx xp = 1.0;
        for (int k = 0; k <= params.ell; ++k) xp *= x;
        cplx u0 = pw_p * std::exp(-0.5 * x) * xp * tricomi_psi(alpha, cc, x);
        cplx du0 = pw_p * 2.0 * eps * detail::whittaker_w_deriv(params.a_coul / eps, params.ell, x);
        State<cplx, 2> y{u0, du0};
        const double ll1 = double(params.ell) * (params.ell + 1.0);
        cplx z = energy.z;
        auto rhs = [&](double rr, const State<cplx, 2>& s, State<cplx, 2>& d) {
            d[0] = s[1];
            d[1] = -(z + 2.0 * params.a_coul / rr - ll1 / (rr * rr) - q(rr)) * s[0];
        };
        OdeOptions opt;
        opt.rtol = rtol;
        opt.atol = 1e-14 * std::max(std::abs(u0), std::abs(du0));
        std::vector<cplx> vals, dvals;
        double cur = Rcut;
        for (std::size_t k = r_eval.size(); k-- > 0;) {
            integrate_ode<cplx, 2>(rhs, cur, r_eval[k], y, opt);
            cur = r_eval[k];
            vals.push_back(y[0]);
            dvals.push_back(y[1]);
        }
        std::reverse(vals.begin(), vals.end());
        std::reverse(dvals.begin(), dvals.end());
        return std::make_pair(vals, dvals);
    };

    auto [vals, dvals] = solve_from(R);
    if (check_cutoff) {
        auto [vals2, dvals2] = solve_from(2.0 * R);
        (void)dvals2;
        for (std::size_t i = 0; i < vals.size(); ++i) {
            double sc = std::max(std::abs(vals[i]), 1e-300);
            if (std::abs(vals[i] - vals2[i]) / sc > 1e-7)
                throw solver_error("coulomb_schrodinger_decaying: cutoff-sensitive solution");
        }
    }
    CoulombDecaying out;
    out.r = r_eval;
    out.u = std::move(vals);
    out.du = std::move(dvals);
    out.cutoff = R;
    return out;
}

/// Free basis of the Coulomb Dirac system.  Regular pair built from
///   Q1 = alpha1 Phi(w - a z/eps, 2w+1, rho), Q2 = alpha2 Phi(w+1 - a z/eps, .)
/// with (alpha1 + alpha2)/(alpha1 - alpha2) = -(a/(w+l)) sqrt((m-z)/(m+z)) and
/// alpha1 - alpha2 = 2 (the a -> 0 limit is then literally the plain basis).
/// Non-regular pair from Psi with prefactors A1 = 1,
/// A2 = (l eps + a m)/eps, which the system itself forces.
inline DiracBasis coulomb_dirac_basis(const CoulombParams& params, const BranchedEnergy& energy,
                                      double r) {
    params.validate_dirac();
    if (!(r > 0)) throw domain_error("coulomb_dirac_basis: r must be positive");
    const double w = params.omega();
    cplx eps = energy.eps;
    cplx rho = 2.0 * r * eps;
    if (rho == 0.0) throw domain_error("coulomb_dirac_basis: 2 r eps = 0");
    cplx az = params.a_coul * energy.z / eps;
    cplx cc(2.0 * w + 1.0);
    cplx ratio = -(params.a_coul / (w + params.ell)) * energy.sqrt_m_minus / energy.sqrt_m_plus;
    cplx a1 = ratio + 1.0, a2 = ratio - 1.0;
    DiracBasis b;
    b.r = r;
    b.eps = eps;
    b.Q1 = a1 * kummer_phi({cplx(w) - az, cc}, rho);
    b.Q2 = a2 * kummer_phi({cplx(w + 1.0) - az, cc}, rho);
    cplx A2 = (double(params.ell) * eps + params.a_coul * params.m) / eps;
    b.Q1t = tricomi_psi(cplx(w) - az, cc, rho);
    b.Q2t = A2 * tricomi_psi(cplx(w + 1.0) - az, cc, rho);
    cplx pre = std::exp(-0.5 * rho) * std::pow(rho, cplx(w - 1.0)) * r;
    b.F1 = energy.sqrt_m_plus * pre * (b.Q1 + b.Q2);
    b.F2 = -energy.sqrt_m_minus * pre * (b.Q1 - b.Q2);
    b.F1t = energy.sqrt_m_plus * pre * (b.Q1t + b.Q2t);
    b.F2t = -energy.sqrt_m_minus * pre * (b.Q1t - b.Q2t);
    return b;
}

/// Tail-defect estimate for the Coulomb Dirac system: solve backward from
/// past the q-support with the non-regular column as data, normalize by
/// -2 sqrt(m+z) e^{r eps} (2 r eps)^{i a}, extract the phase of the second
/// component, and extrapolate delta(r) -> int_r^inf q over the z list.
inline TailDefect coulomb_dirac_defect(const CoulombParams& params, const PotentialSpec& q,
                                       double r, const std::vector<double>& z_over_m = {10.0, 50.0,
                                                                                        250.0},
                                       double rtol = 1e-11) {
    params.validate_dirac();
    if (!(r > 0)) throw domain_error("coulomb_dirac_defect: r must be positive");
    TailDefect out;
    out.delta_exact = q.tail_integral(r);
    cplx ph = std::exp(cplx(0.0, -out.delta_exact));
    out.limit1 = ph * cplx(0.0, 1.0);
    out.limit2 = ph;

    double R = std::max(r + 1.0, 2.0);
    int guard = 0;
    while (std::abs(q.tail_integral(R)) > 1e-12) {
        R *= 1.5;
        if (++guard > 80) throw solver_error("coulomb_dirac_defect: potential tail does not decay");
    }

    for (double zf : z_over_m) {
        double z = zf * params.m;
        auto en = dirac_branch(params.m, cplx(z));
        auto basis = coulomb_dirac_basis(params, en, R);
        State<cplx, 2> y{basis.F1t, basis.F2t};
        OdeOptions opt;
        opt.rtol = rtol;
        opt.atol = 1e-14 * std::max(std::abs(y[0]), std::abs(y[1]));
        auto rhs = [&](double rr, const State<cplx, 2>& s, State<cplx, 2>& d) {
            double qv = q(rr) - params.a_coul / rr;
            d[0] = -(params.ell / rr) * s[0] + (z + params.m - qv) * s[1];
            d[1] = (params.ell / rr) * s[1] - (z - params.m - qv) * s[0];
        };
        integrate_ode<cplx, 2>(rhs, R, r, y, opt);
        cplx norm = -2.0 * en.sqrt_m_plus * std::exp(r * en.eps) *
                    std::pow(2.0 * r * en.eps, cplx(0.0, params.a_coul));
        cplx v1 = norm * y[0], v2 = norm * y[1];
        out.z_values.push_back(z);
        out.v1.push_back(v1);
        out.v2.push_back(v2);
        out.delta_est.push_back(-std::arg(v2));
    }
    // wrapped phases must track each other along z; a jump signals |delta|
    // reaching the +-pi boundary without a continuation path
    for (std::size_t i = 1; i < out.delta_est.size(); ++i) {
        if (std::abs(out.delta_est[i] - out.delta_est[i - 1]) > 0.5 * pi)
            throw solver_error("coulomb_dirac_defect: phase-unwrap ambiguity across z list");
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

} // namespace sspec
