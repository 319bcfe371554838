#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "sspec/errors.hpp"
#include "sspec/numeric.hpp"
#include "sspec/potential.hpp"
#include "sspec/spectrum.hpp"
#include "sspec/sturm.hpp"

namespace sspec {

/// Rectangular box 0 <= x_i <= a_i.
struct BoxDomain {
    std::vector<double> sides;

    void validate() const {
        if (sides.empty()) throw domain_error("BoxDomain: need k >= 1 sides");
        for (double s : sides)
            if (!(s > 0)) throw domain_error("BoxDomain: sides must be positive");
    }
    int dim() const { return int(sides.size()); }

    // volume-type coefficients: V_k = prod a_i, V_{k-1} = V_k sum 1/a_i,
    // V_{k-2} = V_k sum_{i<j} 1/(a_i a_j); V_{-1} = 0, V_0 = 1
    double v_k() const {
        double p = 1;
        for (double s : sides) p *= s;
        return p;
    }
    double v_km1() const {
        if (dim() == 0) return 0;
        double sum = 0;
        for (double s : sides) sum += 1.0 / s;
        return v_k() * sum;
    }
    double v_km2() const {
        if (dim() < 2) return dim() == 1 ? 0.0 : 0.0;
        double sum = 0;
        for (std::size_t i = 0; i < sides.size(); ++i)
            for (std::size_t j = i + 1; j < sides.size(); ++j) sum += 1.0 / (sides[i] * sides[j]);
        return v_k() * sum;
    }
};

struct StatSumReport {
    double T = 0;
    double z_direct = 0;
    double z_asymptotic = 0;
    double residual = 0; // z_direct - z_asymptotic
};

/// Direct sum with a bound on the dropped tail.
struct PartitionSum {
    double value = 0;
    double tail_bound = 0;
};

/// Statistical sum over a finite spectrum; fails if the listed levels do not
/// reach the truncation threshold (term < 1e-18 * running sum).
inline double partition_sum(const EigenSpectrum& spectrum, double T) {
    if (!(T > 0)) throw domain_error("partition_sum: T must be positive");
    if (spectrum.size() == 0) throw domain_error("partition_sum: empty spectrum");
    KahanSum s;
    double last_term = 0;
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        if (i > 0 && spectrum.z[i] <= spectrum.z[i - 1])
            throw convergence_error("partition_sum: levels do not grow");
        last_term = std::exp(-spectrum.z[i] / T);
        s.add(last_term);
        if (last_term < 1e-18 * s.value()) return s.value();
    }
    throw convergence_error("partition_sum: spectrum too short for this temperature");
}

/// Statistical sum for an analytic level law z(n), n = 1, 2, ...; the dropped
/// tail is bounded by the geometric majorant term_N * r / (1 - r) with
/// r = exp(-(z(N+1) - z(N))/T), valid for convex increasing laws.
inline PartitionSum partition_sum_law(const std::function<double(int)>& law, double T,
                                      long n_cap = 50000000) {
    if (!(T > 0)) throw domain_error("partition_sum_law: T must be positive");
    KahanSum s;
    double prev_z = -1e300;
    for (long n = 1; n <= n_cap; ++n) {
        double z = law(int(n));
        if (z <= prev_z) throw convergence_error("partition_sum_law: levels do not grow");
        prev_z = z;
        double term = std::exp(-z / T);
        s.add(term);
        if (n > 1 && term < 1e-18 * s.value()) {
            double gap = z - law(int(n - 1));
            double r = std::exp(-gap / T);
            return {s.value(), term * r / std::max(1.0 - r, 1e-16)};
        }
    }
    throw convergence_error("partition_sum_law: term cap reached");
}

/// Separable multidimensional sum by index-tuple enumeration with geometric
/// pruning; the deterministic order makes the result reproducible bit-for-bit.
inline double partition_sum_box(const std::vector<std::function<double(int)>>& laws, double T) {
    if (laws.empty()) throw domain_error("partition_sum_box: need at least one law");
    if (!(T > 0)) throw domain_error("partition_sum_box: T must be positive");
    KahanSum total;
    std::function<void(std::size_t, double)> rec = [&](std::size_t dim, double acc) {
        for (int n = 1;; ++n) {
            double z = acc + laws[dim](n);
            double term = std::exp(-z / T);
            if (term < 1e-18 * std::max(total.value(), 1e-300) && n > 1) break;
            if (dim + 1 == laws.size())
                total.add(term);
            else
                rec(dim + 1, z);
            if (n > 100000000) throw convergence_error("partition_sum_box: runaway enumeration");
        }
    };
    rec(0, 0.0);
    return total.value();
}

/// Both sides of the theta identity
///   sum e^{-n^2/z} = -1/2 + sqrt(z pi)/2 + sqrt(z pi) sum e^{-z n^2 pi^2}.
inline std::pair<double, double> theta_identity_check(double z) {
    if (!(z > 0)) throw domain_error("theta_identity_check: z must be positive");
    KahanSum lhs;
    for (int n = 1;; ++n) {
        double t = std::exp(-double(n) * n / z);
        lhs.add(t);
        if (t < 1e-16 * std::max(lhs.value(), 1e-300) || t == 0.0) break;
    }
    KahanSum tail;
    for (int n = 1;; ++n) {
        double t = std::exp(-z * double(n) * n * pi * pi);
        tail.add(t);
        if (t < 1e-16 * std::max(tail.value(), 1e-300) || t == 0.0) break;
    }
    double sq = std::sqrt(z * pi);
    double rhs = -0.5 + 0.5 * sq + sq * tail.value();
    return {lhs.value(), rhs};
}

/// Three-term 1-D expansion (a/2) sqrt(T/pi) - 1/2 - delta/(2 sqrt(T pi)).
/// The sign of the defect term follows from z_n = (pi n/a)^2 + delta/a + o(1):
/// raising the levels lowers the sum (the same sign the anharmonic expansion
/// carries), and the direct-summation oracle confirms it.
inline double asympt_1d(double T, double a, double delta) {
    if (!(T > 0)) throw domain_error("asympt_1d: T must be positive");
    return 0.5 * a * std::sqrt(T / pi) - 0.5 - delta / (2.0 * std::sqrt(T * pi));
}

/// Box expansion (T/4pi)^{k/2} (V_k - sqrt(pi/T) V_{k-1} + (pi/T) V_{k-2}
///                              - delta_G / T), the product of k corrected
/// 1-D expansions collected to the stated orders.
inline double asympt_multidim(double T, const BoxDomain& box, double delta_g) {
    box.validate();
    if (!(T > 0)) throw domain_error("asympt_multidim: T must be positive");
    const int k = box.dim();
    double bracket = box.v_k() - std::sqrt(pi / T) * box.v_km1() + (pi / T) * box.v_km2() -
                     delta_g / T;
    return std::pow(T / (4.0 * pi), 0.5 * k) * bracket;
}

/// Anharmonic expansions: k = 1 gives T/2 - 1/4 - delta/(2 sqrt(T pi));
/// k > 1 gives (T/2)^k (1 - k/(2T) - delta_G/(T sqrt(T pi))).
inline double asympt_anharmonic(double T, double delta, int k) {
    if (!(T > 0)) throw domain_error("asympt_anharmonic: T must be positive");
    if (k < 1) throw domain_error("asympt_anharmonic: k must be >= 1");
    if (k == 1) return 0.5 * T - 0.25 - delta / (2.0 * std::sqrt(T * pi));
    return std::pow(0.5 * T, k) *
           (1.0 - 0.5 * k / T - delta / (T * std::sqrt(T * pi)));
}

struct AnharmonicOptions {
    double rtol = 1e-11;
    double L = 0.0;          // 0 = pick from the top level's turning point
    bool force_numeric = false;
    bool truncation_check = true;
};

/// Dirichlet levels of -y'' + (x^2/4 + q) y = z y on the half line, computed
/// on [0, L] with a matched two-sided shot.  q = 0 short-circuits to the
/// level law 2n - 1/2 unless force_numeric is set.
inline EigenSpectrum anharmonic_levels(const PotentialSpec& q, int n_max,
                                       const AnharmonicOptions& opt = {}) {
    if (n_max < 1) throw domain_error("anharmonic_levels: n_max must be >= 1");
    if (q.kind() == PotentialSpec::Kind::sine ||
        (q.kind() == PotentialSpec::Kind::constant && q(0.0) != 0.0))
        throw domain_error("anharmonic_levels: potential violates the weighted tail condition");
    EigenSpectrum spec;
    spec.first_index = 1;
    if (q.is_zero() && !opt.force_numeric) {
        for (int n = 1; n <= n_max; ++n) {
            spec.z.push_back(2.0 * n - 0.5);
            spec.residual.push_back(0.0);
        }
        return spec;
    }
    double z_top = 2.0 * n_max + 2.0;
    double L = opt.L > 0 ? opt.L : std::max(20.0, 2.0 * std::sqrt(z_top) + 8.0);
    auto V = [&](double x) { return 0.25 * x * x + q(x); };
    auto level = [&](int n, double Luse) {
        double zc = 2.0 * n - 0.5;
        double xm = std::min(std::max(2.0, 1.2 * std::sqrt(zc)), Luse - 2.0);
        double res = 0;
        double zn = matched_eigenvalue(V, Luse, xm, n, zc - 0.9, zc + 0.9, opt.rtol, &res);
        return std::make_pair(zn, res);
    };
    for (int n = 1; n <= n_max; ++n) {
        auto [zn, res] = level(n, L);
        spec.z.push_back(zn);
        spec.residual.push_back(res);
    }
    if (opt.truncation_check) {
        auto [z2, res2] = level(n_max, 2.0 * L);
        (void)res2;
        if (std::abs(z2 - spec.z.back()) > 1e-8)
            throw solver_error("anharmonic_levels: level sensitive to domain truncation");
    }
    spec.validate();
    return spec;
}

/// Fit the level-law correction: (z_n - (2n - 1/2)) pi sqrt(2n) -> delta.
inline DefectEstimate anharmonic_delta_fit(const EigenSpectrum& spec, int n_lo, int n_hi) {
    std::vector<double> xs, ys, ws, per;
    std::vector<double> idx;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        int n = spec.index(i);
        if (n < n_lo || n > n_hi) continue;
        double y = (spec.z[i] - (2.0 * n - 0.5)) * pi * std::sqrt(2.0 * n);
        idx.push_back(n);
        per.push_back(y);
        xs.push_back(1.0 / std::sqrt(double(n)));
        ys.push_back(y);
        ws.push_back(n);
    }
    if (xs.size() < 5) throw domain_error("anharmonic_delta_fit: need at least 5 levels in window");
    DefectEstimate est;
    est.delta = extrapolate_poly_fit(xs, ys, ws, 1);
    double d0 = extrapolate_poly_fit(xs, ys, ws, 0);
    est.uncertainty = std::abs(est.delta - d0);
    est.per_level = std::move(per);
    return est;
}

// convenient level laws
inline std::function<double(int)> level_law_nsq() {
    return [](int n) { return double(n) * double(n); };
}
inline std::function<double(int)> level_law_box(double a, double c = 0.0) {
    return [a, c](int n) { return std::pow(pi * n / a, 2) + c; };
}
inline std::function<double(int)> level_law_anharmonic() {
    return [](int n) { return 2.0 * n - 0.5; };
}

} // namespace sspec
