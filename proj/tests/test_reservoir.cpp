#include <doctest.h>

#include <cmath>

#include "rabisim/errors.hpp"
#include "rabisim/reservoir.hpp"

using namespace rabi;

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
}

TEST_CASE("mean_r: exponential model") {
    const NonstationaryModel m{ExponentialMean{1.0, 2.0}};
    // a gamma omega at t = t0
    CHECK(mean_r(m, 0.0, 0.0, kPi).real() == doctest::Approx(2.0 * kPi).epsilon(1e-14));
    CHECK(std::abs(mean_r(m, 40.0, 0.0, kPi)) < 1e-20);
    // monotone decay in magnitude
    double prev = std::abs(mean_r(m, 0.0, 0.0, 1.0));
    for (double t = 0.25; t < 4.0; t += 0.25) {
        const double cur = std::abs(mean_r(m, t, 0.0, 1.0));
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("mean_r: discrete modes") {
    const NonstationaryModel m{DiscreteModes{{{0.1, 1.0, 0.5}}}};
    CHECK(mean_r(m, 0.0, 0.0, 1.0).real() == doctest::Approx(0.1).epsilon(1e-14));
    // Cesaro decay: the running time-average tends to zero
    double acc = 0.0;
    const double dt = 0.01;
    const double horizon = 400.0;
    for (double t = 0.0; t < horizon; t += dt) acc += mean_r(m, t, 0.0, 1.0).real() * dt;
    CHECK(std::abs(acc / horizon) < 1e-3);
}

TEST_CASE("mean_r: validation") {
    const NonstationaryModel bad{DiscreteModes{{{0.1, 0.0, 0.5}}}};
    CHECK_THROWS_AS(mean_r(bad, 1.0, 0.0, 1.0), validation_error);
    CHECK_THROWS_AS(validate(NonstationaryModel{ExponentialMean{1.0, 0.0}}), validation_error);
    CHECK_THROWS_AS(mean_r(NonstationaryModel{ExponentialMean{1.0, 1.0}}, -1.0, 0.0, 1.0),
                    validation_error);
}

TEST_CASE("detuning_shift") {
    CHECK(detuning_shift(NonstationaryModel{DiscreteModes{{{0.1, 1.0, 0.5}}}}) ==
          doctest::Approx(-0.1).epsilon(1e-14));
    CHECK(detuning_shift(NonstationaryModel{DiscreteModes{{{0.1, 1.0, 0.0}}}}) == 0.0);
    // opposite-detuning pair cancels
    CHECK(detuning_shift(NonstationaryModel{
              DiscreteModes{{{0.2, 1.5, 0.7}, {0.2, -1.5, 0.7}}}}) == doctest::Approx(0.0));
    CHECK_THROWS_AS(detuning_shift(NonstationaryModel{ExponentialMean{1.0, 2.0}}),
                    validation_error);
}

TEST_CASE("correlation: stationary only") {
    CorrelationKernel k{SpectralModel{GaussianSpectrum{0.05, 0.0, 2.0}}, std::nullopt};
    CHECK(std::abs(correlation(k, 1.0, 1.0, 0.0, 1.0) -
                   k_time(k.stationary, 0.0)) < 1e-15);
}

TEST_CASE("correlation: split into K + P") {
    // zero stationary part isolates P = <R(tau)><R(t)>
    CorrelationKernel k{SpectralModel{GaussianSpectrum{0.0, 0.0, 1.0}},
                        NonstationaryModel{ExponentialMean{1.0, 2.0}}};
    const double tau = 0.3, t = 0.9;
    const auto p = correlation(k, tau, t, 0.0, 2.0);
    const auto expected =
        mean_r(*k.nonstationary, tau, 0.0, 2.0) * mean_r(*k.nonstationary, t, 0.0, 2.0);
    CHECK(std::abs(p - expected) < 1e-15);

    // P decays: large t, tau at fixed separation leaves only K
    CorrelationKernel kg{SpectralModel{GaussianSpectrum{0.05, 0.0, 2.0}},
                         NonstationaryModel{ExponentialMean{1.0, 2.0}}};
    const auto late = correlation(kg, 30.0, 30.4, 0.0, 2.0);
    CHECK(std::abs(late - k_time(kg.stationary, -0.4)) < 1e-12);

    CHECK_THROWS_AS(correlation(kg, 1.0, 0.5, 0.0, 1.0), validation_error);
}
