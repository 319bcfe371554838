#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "sspec/errors.hpp"

namespace sspec {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;

/// Compensated (Neumaier) summation; keeps absolute error near one ulp of the
/// result independent of term count.
class KahanSum {
  public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
    return r;
}

inline double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

/// Brent's method on [a,b] with f(a)*f(b) <= 0.
template <class F>
double brent_root(F&& f, double a, double b, double xtol = 0.0, double rtol = 1e-14,
                  int max_iter = 200) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw bracketing_error("brent_root: endpoints do not bracket a root");
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * (xtol + rtol * std::abs(b));
        double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double s = fb / fa, p, q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                double qq = fa / fc, r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d; d = p / q;
            } else {
                d = xm; e = d;
            }
        } else {
            d = xm; e = d;
        }
        a = b; fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
        if ((fb > 0) == (fc > 0)) { c = a; fc = fa; d = b - a; e = d; }
    }
    throw convergence_error("brent_root: max iterations");
}

/// Weighted polynomial fit of y(x) with extrapolation to x = 0.
/// The Vandermonde system is centred and scaled before solving, so degrees up
/// to ~4 on narrow abscissa ranges stay well conditioned.
inline double extrapolate_poly_fit(const std::vector<double>& xs, const std::vector<double>& ys,
                                   const std::vector<double>& ws, int degree) {
    const int n = int(xs.size());
    const int k = degree + 1;
    if (n < k) throw domain_error("extrapolate_poly_fit: not enough data");
    double xbar = 0, wtot = 0;
    for (int i = 0; i < n; ++i) { xbar += ws[i] * xs[i]; wtot += ws[i]; }
    xbar /= wtot;
    double scale = 0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(xs[i] - xbar));
    if (scale == 0) scale = 1;

    // normal equations in the centred basis t^j, t = (x - xbar)/scale
    std::vector<double> G(k * k, 0.0), rhs(k, 0.0);
    for (int i = 0; i < n; ++i) {
        double t = (xs[i] - xbar) / scale;
        std::vector<double> phi(k);
        phi[0] = 1;
        for (int j = 1; j < k; ++j) phi[j] = phi[j - 1] * t;
        for (int p = 0; p < k; ++p) {
            rhs[p] += ws[i] * phi[p] * ys[i];
            for (int q = 0; q < k; ++q) G[p * k + q] += ws[i] * phi[p] * phi[q];
        }
    }
    // Gaussian elimination with partial pivoting
    std::vector<int> piv(k);
    for (int i = 0; i < k; ++i) piv[i] = i;
    for (int col = 0; col < k; ++col) {
        int best = col;
        for (int r = col + 1; r < k; ++r)
            if (std::abs(G[r * k + col]) > std::abs(G[best * k + col])) best = r;
        if (best != col) {
            for (int c = 0; c < k; ++c) std::swap(G[col * k + c], G[best * k + c]);
            std::swap(rhs[col], rhs[best]);
        }
        double d = G[col * k + col];
        if (d == 0.0) throw solver_error("extrapolate_poly_fit: singular system");
        for (int r = col + 1; r < k; ++r) {
            double m = G[r * k + col] / d;
            if (m == 0.0) continue;
            for (int c = col; c < k; ++c) G[r * k + c] -= m * G[col * k + c];
            rhs[r] -= m * rhs[col];
        }
    }
    std::vector<double> coef(k);
    for (int r = k - 1; r >= 0; --r) {
        double s = rhs[r];
        for (int c = r + 1; c < k; ++c) s -= G[r * k + c] * coef[c];
        coef[r] = s / G[r * k + r];
    }
    // evaluate at x = 0, i.e. t0 = -xbar/scale
    double t0 = -xbar / scale, v = 0, tp = 1;
    for (int j = 0; j < k; ++j) { v += coef[j] * tp; tp *= t0; }
    return v;
}

/// FNV-1a 64-bit, used for content-addressed spectrum caching.
class Fnv1a {
  public:
    void add_bytes(const void* data, std::size_t len) {
        const unsigned char* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h_ ^= p[i];
            h_ *= 0x100000001b3ULL;
        }
    }
    void add(double x) { add_bytes(&x, sizeof x); }
    void add(int x) { add_bytes(&x, sizeof x); }
    void add(const std::string& s) { add_bytes(s.data(), s.size()); }
    std::uint64_t value() const { return h_; }

  private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

} // namespace sspec
