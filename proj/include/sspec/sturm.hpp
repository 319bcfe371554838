#pragma once

#include <cmath>
#include <functional>

#include "sspec/errors.hpp"
#include "sspec/numeric.hpp"
#include "sspec/ode.hpp"

namespace sspec {

/// One shot of y'' = (V(r) - z) y with node counting and amplitude tracking.
struct ShotResult {
    double y_end = 0, yp_end = 0;
    int nodes = 0;       // interior sign changes of y
    double amp = 0;      // max |y| along the trajectory (after rescalings)
    double rescale_log = 0; // accumulated log of applied rescalings
};

namespace detail {

template <class VF>
ShotResult shoot_linear(VF&& V, double z, double r_lo, double r_hi, double y0, double yp0,
                        double rtol) {
    State<double, 2> y{y0, yp0};
    double amp = std::abs(y0);
    double last_sign = y0 >= 0 ? 1.0 : -1.0;
    int nodes = 0;
    double rescale_log = 0.0;
    OdeOptions opt;
    opt.rtol = rtol;
    // The absolute floor must follow the running amplitude, otherwise the
    // error control collapses whenever y crosses zero.  cb updates opt.atol
    // through this alias on every accepted step.
    opt.atol = 1e-13 * std::max({std::abs(y0), std::abs(yp0), 1e-30});
    auto rhs = [&](double r, const State<double, 2>& s, State<double, 2>& d) {
        d[0] = s[1];
        d[1] = (V(r) - z) * s[0];
    };
    auto cb = [&](double, State<double, 2>& s) -> bool {
        double ay = std::abs(s[0]);
        amp = std::max(amp, ay);
        if (s[0] != 0.0) {
            double sign = s[0] > 0 ? 1.0 : -1.0;
            if (sign != last_sign) { ++nodes; last_sign = sign; }
        }
        double m = std::max(ay, std::abs(s[1]));
        opt.atol = 1e-13 * std::max(m, 1e-30);
        if (m > 1e100) {
            s[0] /= m; s[1] /= m;
            amp /= m;
            rescale_log += std::log(m);
            opt.atol = 1e-13;
            return true;
        }
        return false;
    };
    integrate_ode<double, 2>(rhs, r_lo, r_hi, y, opt, cb);
    ShotResult res;
    res.y_end = y[0];
    res.yp_end = y[1];
    res.nodes = nodes;
    res.amp = std::max(amp, 1e-300);
    res.rescale_log = rescale_log;
    return res;
}

} // namespace detail

/// Dirichlet eigenvalue of y'' = (V - z) y on [r_lo, r_hi] with a z-dependent
/// regular start.  The window [z_lo, z_hi] is a hint; it is widened and then
/// bisected on interior node counts so level n is never missed or confused
/// with a neighbour.  Returns z_n; *residual receives |y(r_hi)| / max|y|.
template <class VF, class Init>
double dirichlet_eigenvalue(VF&& V, Init&& init, double r_lo, double r_hi, int n, double z_lo,
                            double z_hi, double rtol = 1e-11, double* residual = nullptr) {
    if (n < 1) throw domain_error("dirichlet_eigenvalue: n must be >= 1");
    auto shot = [&](double z) {
        auto [y0, yp0] = init(z);
        return detail::shoot_linear(V, z, r_lo, r_hi, y0, yp0, rtol);
    };
    auto nodes_at = [&](double z) { return shot(z).nodes; };

    double width = std::max(z_hi - z_lo, 1e-6);
    int guard = 0;
    while (nodes_at(z_lo) > n - 1) {
        z_lo -= width;
        width *= 2;
        if (++guard > 60) throw bracketing_error("dirichlet_eigenvalue: cannot find lower bound");
    }
    guard = 0;
    width = std::max(z_hi - z_lo, 1e-6);
    while (nodes_at(z_hi) < n) {
        z_hi += width;
        width *= 2;
        if (++guard > 60) throw bracketing_error("dirichlet_eigenvalue: cannot find upper bound");
    }
    // shrink to a window where the count jumps n-1 -> n
    for (int it = 0; it < 200 && (nodes_at(z_lo) != n - 1 || nodes_at(z_hi) != n); ++it) {
        double mid = 0.5 * (z_lo + z_hi);
        if (nodes_at(mid) <= n - 1)
            z_lo = mid;
        else
            z_hi = mid;
        if (it == 199) throw bracketing_error("dirichlet_eigenvalue: node-count bisection failed");
    }
    auto miss = [&](double z) {
        auto s = shot(z);
        return s.y_end / s.amp;
    };
    double zn = brent_root(miss, z_lo, z_hi, 0.0, 1e-14);
    if (residual) *residual = std::abs(miss(zn));
    return zn;
}

/// Matched two-sided eigenvalue for problems on [0, L] whose right end sits
/// deep in a classically forbidden region (the inward sweep follows the
/// decaying solution, which is the stable direction).  Indexing uses the
/// interior node count of a full outward sweep, which is immune to nodes
/// sitting near the matching point; the renormalized shot keeps the signs
/// meaningful through the exponential growth.
template <class VF>
double matched_eigenvalue(VF&& V, double L, double x_match, int n, double z_lo, double z_hi,
                          double rtol = 1e-11, double* residual = nullptr) {
    auto nodes_at = [&](double z) {
        return detail::shoot_linear(V, z, 0.0, L, 0.0, 1.0, rtol).nodes;
    };
    auto miss = [&](double z) {
        auto out = detail::shoot_linear(V, z, 0.0, x_match, 0.0, 1.0, rtol);
        double k = std::sqrt(std::max(V(L) - z, 1e-12));
        auto in = detail::shoot_linear(V, z, L, x_match, 1.0, -k, rtol);
        double sc = std::max(out.amp, 1e-300) * std::max(std::abs(in.y_end), std::abs(in.yp_end));
        return (out.y_end * in.yp_end - out.yp_end * in.y_end) / sc;
    };

    double width = std::max(z_hi - z_lo, 1e-6);
    int guard = 0;
    while (nodes_at(z_lo) > n - 1) {
        z_lo -= width; width *= 2;
        if (++guard > 60) throw bracketing_error("matched_eigenvalue: cannot find lower bound");
    }
    guard = 0;
    while (nodes_at(z_hi) < n) {
        z_hi += width; width *= 2;
        if (++guard > 60) throw bracketing_error("matched_eigenvalue: cannot find upper bound");
    }
    for (int it = 0; it < 200 && (nodes_at(z_lo) != n - 1 || nodes_at(z_hi) != n); ++it) {
        double mid = 0.5 * (z_lo + z_hi);
        if (nodes_at(mid) <= n - 1)
            z_lo = mid;
        else
            z_hi = mid;
        if (it == 199) throw bracketing_error("matched_eigenvalue: node-count bisection failed");
    }
    double zn = brent_root(miss, z_lo, z_hi, 0.0, 1e-14);
    if (residual) *residual = std::abs(miss(zn));
    return zn;
}

} // namespace sspec
