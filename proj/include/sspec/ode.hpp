#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>

#include "sspec/errors.hpp"

namespace sspec {

template <class Scalar, int N>
using State = std::array<Scalar, N>;

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h0 = 0.0;       // 0 = choose automatically
    long max_steps = 4000000;
};

namespace detail {
inline double mag(double x) { return std::abs(x); }
inline double mag(const std::complex<double>& x) { return std::abs(x); }
} // namespace detail

/// Adaptive Dormand-Prince 5(4) with FSAL.  `f(t, y, dy)` fills the
/// derivative; `cb(t, y)` runs after every accepted step and may rescale `y`
/// (return true from cb when y was modified so the FSAL stage is refreshed).
/// Integrates from t0 to t1 in either direction.
template <class Scalar, int N, class F, class Cb>
void integrate_ode(F&& f, double t0, double t1, State<Scalar, N>& y, const OdeOptions& opt, Cb&& cb) {
    if (t0 == t1) return;
    const double dir = t1 > t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);

    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    using St = State<Scalar, N>;
    St k1, k2, k3, k4, k5, k6, k7, yt, ynew;

    double t = t0;
    double h = opt.h0 > 0 ? opt.h0 : span / 100.0;
    h = std::min(h, span);

    f(t, y, k1);
    bool have_k1 = true;
    long steps = 0;
    while (dir * (t1 - t) > 0) {
        if (++steps > opt.max_steps) throw solver_error("integrate_ode: step limit exceeded");
        h = std::min(h, std::abs(t1 - t));
        if (h < 1e-14 * span) throw solver_error("integrate_ode: step size underflow");
        const double hs = dir * h;

        if (!have_k1) { f(t, y, k1); have_k1 = true; }
        for (int i = 0; i < N; ++i) yt[i] = y[i] + hs * (a21 * k1[i]);
        f(t + c2 * hs, yt, k2);
        for (int i = 0; i < N; ++i) yt[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
        f(t + c3 * hs, yt, k3);
        for (int i = 0; i < N; ++i) yt[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(t + c4 * hs, yt, k4);
        for (int i = 0; i < N; ++i)
            yt[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(t + c5 * hs, yt, k5);
        for (int i = 0; i < N; ++i)
            yt[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        f(t + hs, yt, k6);
        for (int i = 0; i < N; ++i)
            ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        f(t + hs, ynew, k7);

        double err = 0.0;
        for (int i = 0; i < N; ++i) {
            double ei = detail::mag(hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                          e6 * k6[i] + e7 * k7[i]));
            double sc = opt.atol + opt.rtol * std::max(detail::mag(y[i]), detail::mag(ynew[i]));
            err = std::max(err, ei / sc);
        }

        if (err <= 1.0) {
            t += hs;
            y = ynew;
            k1 = k7; // FSAL
            if (cb(t, y)) { have_k1 = false; } // state rescaled: refresh stage
            double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
            h *= std::min(5.0, std::max(0.2, fac));
        } else {
            double fac = 0.9 * std::pow(err, -0.2);
            h *= std::max(0.1, fac);
        }
    }
}

template <class Scalar, int N, class F>
void integrate_ode(F&& f, double t0, double t1, State<Scalar, N>& y, const OdeOptions& opt = {}) {
    integrate_ode<Scalar, N>(std::forward<F>(f), t0, t1, y, opt,
                             [](double, State<Scalar, N>&) { return false; });
}

} // namespace sspec
