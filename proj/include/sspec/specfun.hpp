#pragma once

#include <cmath>
#include <complex>

#include "sspec/errors.hpp"
#include "sspec/numeric.hpp"
#include "sspec/quadrature.hpp"

namespace sspec {

/// Kummer parameter pair (first and second parameter of Phi / Psi).
struct HypergeoParams {
    cplx alpha;
    cplx c;
};

namespace detail {

inline bool near_nonpositive_integer(cplx z, double tol = 1e-12) {
    if (std::abs(z.imag()) > tol) return false;
    double r = std::round(z.real());
    return r <= 0.0 && std::abs(z.real() - r) <= tol;
}

} // namespace detail

/// Principal-branch log Gamma.  Argument is pushed right until Stirling's
/// series applies; reflection handles Re z < 0.5.
inline cplx log_gamma(cplx z) {
    if (detail::near_nonpositive_integer(z))
        throw domain_error("log_gamma: pole at nonpositive integer");
    if (z.real() < 0.5) {
        // log Gamma(z) = log pi - log sin(pi z) - log Gamma(1 - z)
        return std::log(cplx(pi)) - std::log(std::sin(pi * z)) - log_gamma(1.0 - z);
    }
    cplx shift = 0.0;
    while (z.real() < 12.0) {
        shift += std::log(z);
        z += 1.0;
    }
    // Stirling series coefficients B_{2k} / (2k (2k-1))
    static const double stirling[] = {1.0 / 12, -1.0 / 360, 1.0 / 1260, -1.0 / 1680,
                                      1.0 / 1188, -691.0 / 360360, 1.0 / 156, -3617.0 / 122400};
    cplx w2 = 1.0 / (z * z), ser = 0.0, zi = 1.0 / z;
    for (double ckt : stirling) {
        ser += ckt * zi;
        zi *= w2;
    }
    cplx lg = (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * pi) + ser;
    return lg - shift;
}

inline cplx gamma_fn(cplx z) { return std::exp(log_gamma(z)); }

/// 1/Gamma(z); finite everywhere (zero at the poles of Gamma).
inline cplx recip_gamma(cplx z) {
    if (detail::near_nonpositive_integer(z)) return 0.0;
    return std::exp(-log_gamma(z));
}

namespace detail {

inline cplx kummer_series(cplx alpha, cplx c, cplx x, int cap = 10000) {
    cplx term = 1.0, sum = 1.0;
    for (int n = 0; n < cap; ++n) {
        term *= (alpha + double(n)) / (c + double(n)) * x / double(n + 1);
        sum += term;
        if (std::abs(term) < 1e-16 * std::abs(sum)) return sum;
    }
    throw convergence_error("kummer_phi: series cap reached");
}

// Large-|x| expansion, stopping at the smallest term of each (divergent)
// series.  The branch factor e^{+-i pi alpha} follows the sign of Im x.
inline cplx kummer_asymptotic(cplx alpha, cplx c, cplx x) {
    auto tail = [](cplx p1, cplx p2, cplx ix) {
        cplx term = 1.0, sum = 1.0;
        double best = 1e300;
        for (int k = 0; k < 60; ++k) {
            term *= (p1 + double(k)) * (p2 + double(k)) / double(k + 1) * ix;
            if (std::abs(term) > best) break;
            best = std::abs(term);
            sum += term;
        }
        return sum;
    };
    cplx s1 = tail(alpha, alpha - c + 1.0, -1.0 / x);
    cplx s2 = tail(c - alpha, 1.0 - alpha, 1.0 / x);
    double sgn = x.imag() >= 0.0 ? 1.0 : -1.0;
    cplx pre1 = gamma_fn(c) * recip_gamma(c - alpha) * std::pow(x, -alpha) *
                std::exp(cplx(0.0, sgn * pi) * alpha);
    cplx pre2 = gamma_fn(c) * recip_gamma(alpha) * std::exp(x) * std::pow(x, alpha - c);
    return pre1 * s1 + pre2 * s2;
}

} // namespace detail

/// Confluent hypergeometric Phi(alpha, c, x) (Kummer's M).  Re x < 0 goes
/// through the reflection Phi(alpha,c,x) = e^x Phi(c-alpha,c,-x); large |x|
/// through the two-sector expansion.
inline cplx kummer_phi(const HypergeoParams& p, cplx x) {
    if (detail::near_nonpositive_integer(p.c))
        throw domain_error("kummer_phi: second parameter is a nonpositive integer");
    if (x == 0.0) return 1.0;
    if (x.real() < 0.0) return std::exp(x) * kummer_phi({p.c - p.alpha, p.c}, -x);
    if (std::abs(x) > 18.0) return detail::kummer_asymptotic(p.alpha, p.c, x);
    return detail::kummer_series(p.alpha, p.c, x);
}

/// Gamma(l+1) * W_{0, l+1/2}(x) as the exact finite sum
///   e^{-x/2} x^{-l} sum_{p=0}^{l} C(l,p) Gamma(2l-p+1) x^p.
inline cplx tricomi_psi_closed(int ell, cplx x) {
    if (ell < 0) throw domain_error("tricomi_psi_closed: ell must be >= 0");
    if (x == 0.0) throw domain_error("tricomi_psi_closed: x = 0");
    cplx sum = 0.0, xp = 1.0;
    for (int p = 0; p <= ell; ++p) {
        sum += binomial(ell, p) * factorial(2 * ell - p) * xp;
        xp *= x;
    }
    cplx xml = 1.0;
    for (int k = 0; k < ell; ++k) xml *= x;
    return std::exp(-0.5 * x) / xml * sum;
}

/// W_{0, l+1/2}(x) itself.
inline cplx whittaker_w0(int ell, cplx x) { return tricomi_psi_closed(ell, x) / factorial(ell); }

/// Whittaker M_{kappa, l+1/2}(x) = e^{-x/2} x^{l+1} Phi(l+1-kappa, 2l+2, x).
/// For integer l the power x^{c/2} is an integer power, so no branch enters.
inline cplx whittaker_m(cplx kappa, int ell, cplx x) {
    if (ell < 0) throw domain_error("whittaker_m: ell must be >= 0");
    if (x == 0.0) throw domain_error("whittaker_m: x = 0");
    cplx xp = 1.0;
    for (int k = 0; k <= ell; ++k) xp *= x;
    return std::exp(-0.5 * x) * xp * kummer_phi({cplx(ell + 1.0) - kappa, cplx(2.0 * ell + 2.0)}, x);
}

/// Two-term large-energy factor 1 + l(l+1)/(2 r eps).
inline cplx phi_asymptotic_factor(double r, cplx eps, int ell) {
    cplx re = r * eps;
    if (re == 0.0) throw domain_error("phi_asymptotic_factor: r*eps = 0");
    return 1.0 + double(ell) * double(ell + 1) / (2.0 * re);
}

/// General Tricomi Psi(alpha, c, x) for the parameter families the Coulomb
/// solvers need (Re alpha > 0 for the integral route).  Route selection:
/// large |x| -> asymptotic series; c safely away from integers -> two-Phi
/// connection; otherwise the Laplace integral on a rotated ray.
inline cplx tricomi_psi(cplx alpha, cplx c, cplx x) {
    if (x == 0.0) throw domain_error("tricomi_psi: x = 0");
    if (std::abs(x) >= 40.0) {
        cplx term = 1.0, sum = 1.0;
        double best = 1e300;
        for (int k = 0; k < 80; ++k) {
            term *= -(alpha + double(k)) * (alpha - c + 1.0 + double(k)) / (double(k + 1) * x);
            if (std::abs(term) > best) break;
            best = std::abs(term);
            sum += term;
        }
        return std::pow(x, -alpha) * sum;
    }
    double cdist = std::abs(c.real() - std::round(c.real())) + std::abs(c.imag());
    if (cdist > 0.05) {
        cplx t1 = gamma_fn(1.0 - c) * recip_gamma(alpha - c + 1.0) * kummer_phi({alpha, c}, x);
        cplx t2 = gamma_fn(c - 1.0) * recip_gamma(alpha) * std::pow(x, 1.0 - c) *
                  kummer_phi({alpha - c + 1.0, 2.0 - c}, x);
        return t1 + t2;
    }
    if (alpha.real() <= 0.0)
        throw domain_error("tricomi_psi: integral route needs Re alpha > 0");
    // Psi = 1/Gamma(alpha) int_0^inf e^{-x t} t^{alpha-1} (1+t)^{c-alpha-1} dt
    // on the ray t = e^{-i theta} s; substitution s = v^k tames the t^{alpha-1}
    // endpoint when Re alpha < 2.
    double theta = x.imag() > 0 ? pi / 4 : (x.imag() < 0 ? -pi / 4 : 0.0);
    cplx w = std::exp(cplx(0.0, -theta));
    int k = std::max(1, int(std::ceil(2.0 / alpha.real())));
    cplx decay = x * w;
    double first = std::pow(1.0 / std::max(decay.real(), 1e-3), 1.0 / k);
    auto f = [&](double v) -> cplx {
        cplx t = w * std::pow(v, k);
        return std::exp(-x * t) * std::pow(t, alpha - 1.0) * std::pow(1.0 + t, c - alpha - 1.0) *
               (w * double(k) * std::pow(v, k - 1));
    };
    cplx integral = integrate_to_inf<cplx>(f, 0.0, 1e-12, first);
    return recip_gamma(alpha) * integral;
}

/// Whittaker W_{kappa, mu}(x) through the general Psi.
inline cplx whittaker_w(cplx kappa, cplx mu, cplx x) {
    cplx c = 2.0 * mu + 1.0;
    cplx alpha = mu + 0.5 - kappa;
    return std::exp(-0.5 * x) * std::pow(x, 0.5 * c) * tricomi_psi(alpha, c, x);
}

} // namespace sspec
