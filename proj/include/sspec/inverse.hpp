#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "sspec/cache.hpp"
#include "sspec/dirac.hpp"
#include "sspec/errors.hpp"
#include "sspec/numeric.hpp"
#include "sspec/parallel.hpp"
#include "sspec/potential.hpp"
#include "sspec/schrodinger.hpp"

namespace sspec {

/// Samples of the quantum defect against the sliding endpoint.
///   from_origin: delta(a) = integral of q over [0, a]
///   tail:        delta(r) = integral of q over [r, inf)
struct DefectCurve {
    enum class Side { from_origin, tail };
    std::vector<double> endpoints;
    std::vector<double> values;
    Side side = Side::from_origin;

    void validate() const {
        if (endpoints.size() != values.size())
            throw domain_error("DefectCurve: size mismatch");
        if (endpoints.size() < 3) throw domain_error("DefectCurve: need at least 3 samples");
        for (std::size_t i = 1; i < endpoints.size(); ++i)
            if (!(endpoints[i] > endpoints[i - 1]))
                throw domain_error("DefectCurve: endpoints must increase strictly");
    }
};

struct SmoothingSpec {
    enum class Kind { none, savitzky_golay } kind = Kind::none;
    int window = 7;
    int order = 3;

    static SmoothingSpec none() { return {}; }
    static SmoothingSpec savitzky_golay(int window = 7, int order = 3) {
        SmoothingSpec s;
        s.kind = Kind::savitzky_golay;
        s.window = window;
        s.order = order;
        return s;
    }
};

namespace detail {

/// Least-squares polynomial smoothing on a sliding window (handles nonuniform
/// abscissae; edge points use one-sided windows of the same length).
inline std::vector<double> sg_smooth(const std::vector<double>& xs, const std::vector<double>& ys,
                                     int window, int order) {
    const int n = int(xs.size());
    if (window % 2 == 0 || window < 3) throw domain_error("sg_smooth: window must be odd >= 3");
    if (order < 1 || order >= window) throw domain_error("sg_smooth: order must be in [1, window)");
    if (n < window) throw domain_error("sg_smooth: not enough samples for the window");
    std::vector<double> out(n);
    const int half = window / 2;
    for (int i = 0; i < n; ++i) {
        int lo = std::max(0, std::min(i - half, n - window));
        // fit around xs[i] and evaluate at 0
        std::vector<double> X(window), Y(window), W(window, 1.0);
        for (int k = 0; k < window; ++k) {
            X[k] = xs[lo + k] - xs[i];
            Y[k] = ys[lo + k];
        }
        out[i] = extrapolate_poly_fit(X, Y, W, order);
    }
    return out;
}

/// Three-point Lagrange derivative (exact for quadratics, O(h^2) on
/// quasi-uniform grids); one-sided at the ends.
inline std::vector<double> derivative_3pt(const std::vector<double>& x,
                                          const std::vector<double>& f) {
    const int n = int(x.size());
    std::vector<double> d(n);
    auto lag = [&](int i0, int i1, int i2, int at) {
        double x0 = x[i0], x1 = x[i1], x2 = x[i2], xa = x[at];
        double d0 = (2 * xa - x1 - x2) / ((x0 - x1) * (x0 - x2));
        double d1 = (2 * xa - x0 - x2) / ((x1 - x0) * (x1 - x2));
        double d2 = (2 * xa - x0 - x1) / ((x2 - x0) * (x2 - x1));
        return f[i0] * d0 + f[i1] * d1 + f[i2] * d2;
    };
    d[0] = lag(0, 1, 2, 0);
    for (int i = 1; i + 1 < n; ++i) d[i] = lag(i - 1, i, i + 1, i);
    d[n - 1] = lag(n - 3, n - 2, n - 1, n - 1);
    return d;
}

} // namespace detail

/// Differentiate the defect curve: q = +d(delta)/da for curves grown from the
/// origin, q = -d(delta)/dr for tail curves.  Optional smoothing runs before
/// the difference stencil.
inline PotentialSpec recover_q_1d(const DefectCurve& curve,
                                  const SmoothingSpec& smoothing = SmoothingSpec::none()) {
    curve.validate();
    for (std::size_t i = 1; i < curve.endpoints.size(); ++i)
        if (curve.endpoints[i] - curve.endpoints[i - 1] < 1e-14)
            throw domain_error("recover_q_1d: degenerate endpoint spacing");
    std::vector<double> vals = curve.values;
    if (smoothing.kind == SmoothingSpec::Kind::savitzky_golay)
        vals = detail::sg_smooth(curve.endpoints, vals, smoothing.window, smoothing.order);
    std::vector<double> d = detail::derivative_3pt(curve.endpoints, vals);
    const double sign = curve.side == DefectCurve::Side::from_origin ? 1.0 : -1.0;
    for (double& v : d) v *= sign;
    return PotentialSpec::from_grid(curve.endpoints, d, Interp::linear);
}

/// Rectangular defect field delta(G(a1, a2)) = int over the box.
struct DefectField2D {
    std::vector<double> a1, a2;                // strictly increasing axes
    std::vector<std::vector<double>> values;   // values[i][j] at (a1[i], a2[j])

    void validate() const {
        if (a1.size() < 3 || a2.size() < 3)
            throw domain_error("DefectField2D: need at least a 3x3 lattice");
        for (std::size_t i = 1; i < a1.size(); ++i)
            if (!(a1[i] > a1[i - 1])) throw domain_error("DefectField2D: a1 must increase");
        for (std::size_t j = 1; j < a2.size(); ++j)
            if (!(a2[j] > a2[j - 1])) throw domain_error("DefectField2D: a2 must increase");
        if (values.size() != a1.size()) throw domain_error("DefectField2D: row count mismatch");
        for (const auto& row : values)
            if (row.size() != a2.size()) throw domain_error("DefectField2D: column count mismatch");
    }
};

/// Mixed derivative d^2/(da1 da2) of the cumulative field, i.e. the k = 2
/// instance of the axis-recursive stencil: differentiate rows, then columns.
inline std::vector<std::vector<double>> recover_q_multidim(const DefectField2D& field) {
    field.validate();
    const std::size_t n1 = field.a1.size(), n2 = field.a2.size();
    // along a2 first
    std::vector<std::vector<double>> d2(n1, std::vector<double>(n2));
    for (std::size_t i = 0; i < n1; ++i) d2[i] = detail::derivative_3pt(field.a2, field.values[i]);
    // then along a1
    std::vector<std::vector<double>> out(n1, std::vector<double>(n2));
    std::vector<double> col(n1);
    for (std::size_t j = 0; j < n2; ++j) {
        for (std::size_t i = 0; i < n1; ++i) col[i] = d2[i][j];
        auto dj = detail::derivative_3pt(field.a1, col);
        for (std::size_t i = 0; i < n1; ++i) out[i][j] = dj[i];
    }
    return out;
}

struct PipelineOptions {
    double rtol = 1e-10;
    SmoothingSpec smoothing = SmoothingSpec::none();
    std::string cache_dir;  // empty = no disk cache
    int threads = 0;        // 0 = max_threads()
};

struct PipelineReport {
    DefectCurve curve;
    std::vector<char> valid;             // per endpoint
    std::vector<double> recovered_grid;  // valid endpoints
    std::vector<double> recovered_q;
    std::vector<double> true_q;
    double l2_rel_error = 0.0;
    double max_error = 0.0;
};

namespace detail {

inline void finish_report(PipelineReport& rep, const PotentialSpec& q_true,
                          const SmoothingSpec& smoothing) {
    rep.curve.validate();
    auto rec = recover_q_1d(rep.curve, smoothing);
    rep.recovered_grid = rec.grid();
    rep.recovered_q = rec.values();
    double num = 0, den = 0;
    rep.max_error = 0;
    rep.true_q.resize(rep.recovered_grid.size());
    for (std::size_t i = 0; i < rep.recovered_grid.size(); ++i) {
        double qt = q_true(rep.recovered_grid[i]);
        rep.true_q[i] = qt;
        double e = rep.recovered_q[i] - qt;
        num += e * e;
        den += qt * qt;
        rep.max_error = std::max(rep.max_error, std::abs(e));
    }
    rep.l2_rel_error = den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

} // namespace detail

/// Forward spectra -> per-endpoint defect -> derivative, against the known
/// q_true.  Endpoint failures are masked, not fatal.
inline PipelineReport sliding_pipeline_schrodinger(const PotentialSpec& q_true, int ell,
                                                   const std::vector<double>& a_grid, int n_max,
                                                   const PipelineOptions& opt = {}) {
    if (a_grid.size() < 3) throw domain_error("sliding_pipeline_schrodinger: need >= 3 endpoints");
    if (n_max < 20) throw domain_error("sliding_pipeline_schrodinger: n_max must be >= 20");
    SpectrumCache cache(opt.cache_dir);
    const int n = int(a_grid.size());
    std::vector<double> deltas(n);
    std::vector<char> ok(n, 0);
    parallel_for(
        n,
        [&](int i) {
            double a = a_grid[i];
            try {
                Fnv1a h;
                q_true.hash_into(h);
                h.add(ell);
                h.add(a);
                h.add(n_max);
                h.add(opt.rtol);
                h.add(std::string("schrodinger_dirichlet_v1"));
                EigenSpectrum spec;
                if (auto hit = cache.load(h.value())) {
                    spec = std::move(*hit);
                } else {
                    spec = eigenvalues_dirichlet({q_true, ell, a}, n_max, opt.rtol);
                    cache.store(h.value(), spec);
                }
                deltas[i] = estimate_defect(spec, a, ell).delta;
                ok[i] = 1;
            } catch (const std::exception&) {
                ok[i] = 0;
            }
        },
        opt.threads);

    PipelineReport rep;
    rep.valid = ok;
    rep.curve.side = DefectCurve::Side::from_origin;
    for (int i = 0; i < n; ++i) {
        if (!ok[i]) continue;
        rep.curve.endpoints.push_back(a_grid[i]);
        rep.curve.values.push_back(deltas[i]);
    }
    detail::finish_report(rep, q_true, opt.smoothing);
    return rep;
}

/// Dirac variant over the boundary-problem defect; also returns nothing more
/// than the recovered q, since V is rebuilt entrywise from (l, m, q).
inline PipelineReport sliding_pipeline_dirac(const PotentialSpec& q_true, int ell, double m,
                                             double psi, const std::vector<double>& a_grid,
                                             int n_levels, const PipelineOptions& opt = {}) {
    if (a_grid.size() < 3) throw domain_error("sliding_pipeline_dirac: need >= 3 endpoints");
    if (n_levels < 5) throw domain_error("sliding_pipeline_dirac: need >= 5 levels");
    SpectrumCache cache(opt.cache_dir);
    const int n = int(a_grid.size());
    std::vector<double> deltas(n);
    std::vector<char> ok(n, 0);
    parallel_for(
        n,
        [&](int i) {
            double a = a_grid[i];
            try {
                Fnv1a h;
                q_true.hash_into(h);
                h.add(ell);
                h.add(m);
                h.add(psi);
                h.add(a);
                h.add(n_levels);
                h.add(opt.rtol);
                h.add(std::string("dirac_bc_v1"));
                EigenSpectrum spec;
                if (auto hit = cache.load(h.value())) {
                    spec = std::move(*hit);
                } else {
                    DiracParams params{ell, m, q_true};
                    spec = eigenvalues_bc(params, a, psi, 1, n_levels, opt.rtol);
                    cache.store(h.value(), spec);
                }
                deltas[i] = estimate_defect_dirac(spec, a, ell, psi).delta;
                ok[i] = 1;
            } catch (const std::exception&) {
                ok[i] = 0;
            }
        },
        opt.threads);

    PipelineReport rep;
    rep.valid = ok;
    rep.curve.side = DefectCurve::Side::from_origin;
    for (int i = 0; i < n; ++i) {
        if (!ok[i]) continue;
        rep.curve.endpoints.push_back(a_grid[i]);
        rep.curve.values.push_back(deltas[i]);
    }
    detail::finish_report(rep, q_true, opt.smoothing);
    return rep;
}

} // namespace sspec
