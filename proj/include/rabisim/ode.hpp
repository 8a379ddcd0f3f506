#ifndef RABISIM_ODE_HPP
#define RABISIM_ODE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

#include "rabisim/errors.hpp"

namespace rabi {

struct StepControl {
    double rel_tol = 1e-9;
    double abs_tol = 1e-11;
    double max_step = 0.0;  // 0 -> no cap beyond the interval itself
};

namespace ode {

// Dormand-Prince 5(4). The 5th-order solution propagates; the embedded
// 4th-order difference drives the step controller. FSAL: k7 of an accepted
// step is k1 of the next.
template <std::size_t N, class F, class Observer>
std::array<double, N> integrate_dopri5(F&& f, std::array<double, N> y, double t0, double t1,
                                       const StepControl& sc, Observer&& observe) {
    using State = std::array<double, N>;
    if (t1 < t0) throw validation_error("ode: t1 must be >= t0");
    if (!(sc.rel_tol > 0.0) || !(sc.abs_tol > 0.0))
        throw validation_error("ode: tolerances must be > 0");
    if (t1 == t0) return y;

    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                     e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                     e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    const double span = t1 - t0;
    const double hmax = sc.max_step > 0.0 ? std::min(sc.max_step, span) : span;
    double h = hmax;
    double t = t0;

    State k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
    f(t, y, k1);

    auto stage = [&](State& dst, const State& base, std::initializer_list<std::pair<double, const State*>> terms,
                     double hh) {
        for (std::size_t i = 0; i < N; ++i) {
            double acc = 0.0;
            for (const auto& [c, k] : terms) acc += c * (*k)[i];
            dst[i] = base[i] + hh * acc;
        }
    };

    while (t < t1) {
        h = std::min(h, t1 - t);
        if (!(t + h > t)) throw numerical_error("ode: step size underflow");

        stage(ytmp, y, {{a21, &k1}}, h);
        f(t + h / 5.0, ytmp, k2);
        stage(ytmp, y, {{a31, &k1}, {a32, &k2}}, h);
        f(t + 3.0 * h / 10.0, ytmp, k3);
        stage(ytmp, y, {{a41, &k1}, {a42, &k2}, {a43, &k3}}, h);
        f(t + 4.0 * h / 5.0, ytmp, k4);
        stage(ytmp, y, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, h);
        f(t + 8.0 * h / 9.0, ytmp, k5);
        stage(ytmp, y, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, h);
        f(t + h, ytmp, k6);
        stage(ynew, y, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}}, h);
        f(t + h, ynew, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                  e6 * k6[i] + e7 * k7[i]);
            const double scale =
                sc.abs_tol + sc.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (e / scale) * (e / scale);
        }
        err = std::sqrt(err / static_cast<double>(N));

        if (err <= 1.0) {
            observe(t, t + h, y, ynew, k1, k7);
            t += h;
            y = ynew;
            k1 = k7;  // FSAL
            const double grow = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2);
            h = std::min(hmax, h * std::clamp(grow, 0.2, 5.0));
        } else {
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 0.9);
        }
    }
    return y;
}

// Cubic Hermite interpolation inside one accepted step.
template <std::size_t N>
std::array<double, N> hermite(double ta, double tb, const std::array<double, N>& ya,
                              const std::array<double, N>& yb, const std::array<double, N>& fa,
                              const std::array<double, N>& fb, double t) {
    const double h = tb - ta;
    const double s = (t - ta) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    std::array<double, N> out;
    for (std::size_t i = 0; i < N; ++i)
        out[i] = h00 * ya[i] + h * h10 * fa[i] + h01 * yb[i] + h * h11 * fb[i];
    return out;
}

// Classic fixed-step RK4; the serial reference used as an oracle in tests and
// as the benchmark baseline.
template <std::size_t N, class F, class Observer>
std::array<double, N> integrate_rk4(F&& f, std::array<double, N> y, double t0, double t1,
                                    double dt, Observer&& observe) {
    if (!(dt > 0.0)) throw validation_error("ode: rk4 step must be > 0");
    std::array<double, N> k1, k2, k3, k4, tmp;
    double t = t0;
    while (t < t1) {
        const double h = std::min(dt, t1 - t);
        if (!(t + h > t)) throw numerical_error("ode: step size underflow");
        f(t, y, k1);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        f(t + 0.5 * h, tmp, k2);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        f(t + 0.5 * h, tmp, k3);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * k3[i];
        f(t + h, tmp, k4);
        for (std::size_t i = 0; i < N; ++i)
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        t += h;
        observe(t, y);
    }
    return y;
}

} // namespace ode
} // namespace rabi

#endif
