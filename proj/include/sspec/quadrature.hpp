#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <vector>

#include "sspec/errors.hpp"
#include "sspec/numeric.hpp"

namespace sspec {

/// Gauss-Legendre nodes/weights on [-1,1], computed once per order by Newton
/// iteration on P_n (machine precision, no tables).
inline const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<double> x(n), w(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double xi = std::cos(pi * (i + 0.75) / (n + 0.5));
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1.0, p1 = xi;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
                p0 = p1; p1 = p2;
            }
            double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
            double dx = p1 / dp;
            xi -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = xi;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
            p0 = p1; p1 = p2;
        }
        double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
        x[i] = -xi;
        x[n - 1 - i] = xi;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
    }
    return cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first->second;
}

namespace detail {
template <class T, class F>
T gauss_panel(F&& f, double a, double b, int n) {
    const auto& [xs, ws] = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    T s{};
    for (int i = 0; i < n; ++i) s += T(ws[i] * half) * f(mid + half * xs[i]);
    return s;
}
} // namespace detail

/// Adaptive Gauss quadrature on [a,b] comparing 12- and 24-point panels.
/// Works for real or complex integrands (T = double / std::complex<double>).
template <class T, class F>
T integrate_adaptive(F&& f, double a, double b, double tol = 1e-11, int max_depth = 48) {
    struct Seg { double a, b; int depth; };
    std::vector<Seg> stack{{a, b, 0}};
    T total{};
    double scale = 0.0;
    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        T lo = detail::gauss_panel<T>(f, s.a, s.b, 12);
        T hi = detail::gauss_panel<T>(f, s.a, s.b, 24);
        double err = std::abs(hi - lo);
        scale = std::max(scale, std::abs(hi));
        if (err <= tol * std::max(1e-300, std::max(scale, std::abs(hi))) || s.depth >= max_depth) {
            if (s.depth >= max_depth && err > 1e3 * tol * std::max(scale, 1e-300))
                throw convergence_error("integrate_adaptive: refinement limit");
            total += hi;
        } else {
            double m = 0.5 * (s.a + s.b);
            stack.push_back({s.a, m, s.depth + 1});
            stack.push_back({m, s.b, s.depth + 1});
        }
    }
    return total;
}

/// Integral over [a, inf): geometric segmentation, stops when a segment is
/// negligible against the running total.
template <class T, class F>
T integrate_to_inf(F&& f, double a, double tol = 1e-11, double first_len = 1.0, int max_seg = 200) {
    T total{};
    double lo = a, len = first_len;
    for (int s = 0; s < max_seg; ++s) {
        T part = integrate_adaptive<T>(f, lo, lo + len, tol);
        total += part;
        if (s > 2 && std::abs(part) < 0.5 * tol * std::max(1e-300, std::abs(total))) return total;
        lo += len;
        len *= 2.0;
    }
    throw convergence_error("integrate_to_inf: tail did not decay");
}

} // namespace sspec
