#include <doctest.h>

#include <cmath>
#include <vector>

#include "rabisim/dressing.hpp"

using namespace rabi;
using cplx = std::complex<double>;

namespace {
constexpr double kPi = 3.141592653589793238462643383279;

PulseSpec rect(double omega, double duration, double t0 = 0.0) {
    PulseSpec p;
    p.omega = omega;
    p.duration = duration;
    p.t0 = t0;
    return p;
}
} // namespace

TEST_CASE("DressingParams: c^2 + s^2 = 1") {
    for (double omega : {0.0, 0.3, 2.0, 6.2832, 20.0})
        for (double delta : {0.0, -1.0, 0.5, 3.0}) {
            const DressingParams dp(omega, delta);
            if (dp.omega_r > 0.0)
                CHECK(dp.c * dp.c + dp.s * dp.s == doctest::Approx(1.0).epsilon(1e-15));
            CHECK(dp.omega_r >= 0.0);
        }
}

TEST_CASE("d_plus_plus closed form") {
    CHECK(d_plus_plus(DressingParams(2.0, 0.7), 0.0) == doctest::Approx(1.0));
    // resonance: (1 + cos(Omega t)) / 2
    CHECK(d_plus_plus(DressingParams(kPi, 0.0), 1.0) == doctest::Approx(0.0).epsilon(1e-12));
    // no driving
    CHECK(d_plus_plus(DressingParams(0.0, 1.3), 5.0) == doctest::Approx(1.0));
    CHECK(d_plus_plus(DressingParams(0.0, 0.0), 2.0) == doctest::Approx(1.0));
}

TEST_CASE("d_plus_plus is even and bounded in [c^2, 1]") {
    const DressingParams dp(1.7, 0.9);
    for (double t : {0.1, 0.5, 2.0, 13.7}) {
        CHECK(d_plus_plus(dp, t) == doctest::Approx(d_plus_plus(dp, -t)).epsilon(1e-15));
        CHECK(d_plus_plus(dp, t) <= 1.0 + 1e-15);
        CHECK(d_plus_plus(dp, t) >= dp.c * dp.c - 1e-15);
    }
}

TEST_CASE("d_plus_minus closed form") {
    CHECK(std::abs(d_plus_minus(DressingParams(2.0, 0.7), 0.0)) == 0.0);
    // resonance reduces to -sin(Omega t)
    const cplx v = d_plus_minus(DressingParams(2.0, 0.0), 0.25);
    CHECK(v.real() == doctest::Approx(-std::sin(0.5)).epsilon(1e-12));
    CHECK(std::abs(v.imag()) < 1e-15);
    // no driving
    CHECK(std::abs(d_plus_minus(DressingParams(0.0, 1.0), 3.0)) == 0.0);
}

TEST_CASE("d_plus_minus magnitude bound 2 omega / omega_r") {
    for (double omega : {0.4, 2.0, 9.0})
        for (double delta : {0.0, 0.8, -2.5}) {
            const DressingParams dp(omega, delta);
            for (double t = -8.0; t <= 8.0; t += 0.37)
                CHECK(std::abs(d_plus_minus(dp, t)) <= 2.0 * dp.omega / dp.omega_r + 1e-12);
        }
}

TEST_CASE("d_plus_minus small-argument series") {
    const DressingParams dp(3.0, 4.0);  // omega_r = 5
    const double t = 1e-8;              // omega_r t = 5e-8, below the switch
    const cplx v = d_plus_minus(dp, t);
    CHECK(v.real() == doctest::Approx(-3.0 * t).epsilon(1e-10));
}

TEST_CASE("dress_numeric matches closed forms on rectangular pulses") {
    const TlsParams tls_res{0.0, 0.0};
    for (double omega : {0.7, 2.0, 2.0 * kPi})
        for (double delta : {0.0, 1.0, -2.0}) {
            const auto p = rect(omega, 25.0);
            const TlsParams tls{delta, 0.0};
            const DressingParams dp(omega, delta);
            std::vector<double> times;
            for (double t = 0.0; t <= 20.0; t += 1.25) times.push_back(t);
            const auto table = dress_numeric_table(p, tls, times);
            for (std::size_t i = 0; i < times.size(); ++i) {
                CHECK(std::abs(table[i].first - d_plus_plus(dp, times[i])) < 1e-8);
                CHECK(std::abs(table[i].second - d_plus_minus(dp, times[i])) < 1e-8);
            }
        }
    (void)tls_res;
}

TEST_CASE("dress_numeric: zero envelope gives trivial dressing") {
    const auto p = rect(0.0, 10.0);
    const auto [dpp, dpm] = dress_numeric(p, TlsParams{1.3, 0.0}, 4.0);
    CHECK(dpp == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(dpm) < 1e-12);
}

TEST_CASE("dress_numeric: propagator stays unitary") {
    const auto p = rect(2.0 * kPi, 25.0);
    CHECK(propagator_unitarity_residual(p, TlsParams{1.0, 0.0}, 20.0) < 1e-10);
}
