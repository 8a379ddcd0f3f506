#include <doctest.h>

#include <cmath>
#include <vector>

#include "rabisim/errors.hpp"
#include "rabisim/sweep.hpp"

using namespace rabi;

namespace {
constexpr double kPi = 3.141592653589793238462643383279;

SweepSpec basic_spec(std::vector<double> grid, std::vector<DephasingPolicy> policies,
                     double width = 1.0) {
    SweepSpec spec;
    spec.base.pulse.duration = width;
    spec.grid = std::move(grid);
    spec.policies = std::move(policies);
    return spec;
}

std::vector<double> ugrid(double start, double stop, double step) {
    std::vector<double> g;
    for (double u = start; u <= stop + 1e-9; u += step) g.push_back(u);
    return g;
}
} // namespace

TEST_CASE("undamped sweep equals sin^2(u pi / 2)") {
    auto spec = basic_spec(ugrid(0.0, 4.0, 0.25), {MarkovPolicy{0.0}});
    spec.base.step.rel_tol = 1e-11;
    const auto res = area_sweep(spec);
    REQUIRE(res.populations.size() == 1);
    for (std::size_t i = 0; i < res.amplitudes.size(); ++i) {
        const double expected = std::pow(std::sin(res.amplitudes[i] * kPi / 2.0), 2);
        CHECK(std::abs(res.populations[0][i] - expected) < 1e-8);
    }
}

TEST_CASE("pi and 2pi grid points") {
    const auto spec = basic_spec({1.0, 2.0}, {MarkovPolicy{0.0}});
    const auto res = area_sweep(spec);
    CHECK(std::abs(res.populations[0][0] - 1.0) < 1e-8);
    CHECK(std::abs(res.populations[0][1]) < 1e-8);
}

TEST_CASE("parallel sweep is bit-identical to serial") {
    auto spec = basic_spec(ugrid(0.2, 6.0, 0.2),
                           {MarkovPolicy{0.1},
                            StationaryExpansionPolicy{SpectralModel{
                                TaylorSpectrum{0.05, 0.0, 0.0015}}}});
    const auto serial = area_sweep_serial(spec);
    const auto parallel = area_sweep(spec, 8);
    REQUIRE(serial.populations.size() == parallel.populations.size());
    for (std::size_t c = 0; c < serial.populations.size(); ++c)
        for (std::size_t i = 0; i < serial.populations[c].size(); ++i)
            CHECK(serial.populations[c][i] == parallel.populations[c][i]);
}

TEST_CASE("column naming follows policies and stays unique") {
    auto spec = basic_spec({1.0}, {MarkovPolicy{0.1}, MarkovPolicy{0.2}});
    const auto res = area_sweep(spec);
    CHECK(res.columns[0] == "rho_pp_markov");
    CHECK(res.columns[1] == "rho_pp_markov_2");
}

TEST_CASE("width series: undamped curves coincide in pi-pulse units") {
    auto spec = basic_spec(ugrid(0.25, 3.0, 0.25), {MarkovPolicy{0.0}});
    const double widths[] = {9.3, 7.0, 5.4};
    const auto series = width_series(spec, widths);
    REQUIRE(series.size() == 3);
    for (std::size_t w = 1; w < series.size(); ++w)
        for (std::size_t i = 0; i < series[0].amplitudes.size(); ++i)
            CHECK(std::abs(series[w].populations[0][i] - series[0].populations[0][i]) < 1e-8);
}

TEST_CASE("extract_peaks: quadratic refinement on a sampled parabola train") {
    // y = cos^2(pi u / 2) has maxima of exactly 1 at even u
    std::vector<double> u = ugrid(0.0, 7.0, 0.05), y;
    for (double v : u) y.push_back(std::pow(std::cos(kPi * v / 2.0), 2));
    const auto peaks = extract_peaks(u, y);
    REQUIRE(peaks.size() == 3);
    for (std::size_t i = 0; i < peaks.size(); ++i) {
        CHECK(peaks[i].u == doctest::Approx(2.0 * (i + 1)).epsilon(1e-3));
        CHECK(peaks[i].height == doctest::Approx(1.0).epsilon(1e-4));
    }
}

TEST_CASE("positive curvature damps successive maxima; negative curvature cannot") {
    // K'' > 0 raises kappa with drive: the Fig.-1(a) solid-line shape
    auto damped = basic_spec(ugrid(1.0, 8.0, 0.05),
                             {StationaryExpansionPolicy{SpectralModel{
                                 TaylorSpectrum{0.05, 0.0, 0.0015}}}});
    const auto res = area_sweep(damped, 2);
    const auto peaks = extract_peaks(res.amplitudes, res.populations[0]);
    REQUIRE(peaks.size() >= 3);
    for (std::size_t i = 1; i < peaks.size(); ++i) CHECK(peaks[i].height < peaks[i - 1].height);

    // K'' < 0 lowers kappa with drive (clamped at zero): maxima grow toward 1
    auto rising = basic_spec(ugrid(1.0, 8.0, 0.05),
                             {StationaryExpansionPolicy{SpectralModel{
                                 TaylorSpectrum{0.05, 0.0, -0.0015}}}});
    const auto res2 = area_sweep(rising, 2);
    const auto peaks2 = extract_peaks(res2.amplitudes, res2.populations[0]);
    REQUIRE(peaks2.size() >= 3);
    for (std::size_t i = 1; i < peaks2.size(); ++i)
        CHECK(peaks2[i].height >= peaks2[i - 1].height - 1e-9);
}

TEST_CASE("population_vs_amplitude_at_pulse_end: unit and full dressing columns") {
    SimConfig base;
    base.pulse.duration = 1.0;
    base.policy = NonstationaryPolicy{0.05, NonstationaryModel{ExponentialMean{0.06, 2.0}},
                                      DppMode::Unit};
    const std::vector<double> grid{0.05, 0.1, 1.0, 3.0};
    const auto res = population_vs_amplitude_at_pulse_end(base, grid, 2);
    REQUIRE(res.columns.size() == 2);
    CHECK(res.columns[0] == "rho_pp_nonstationary_unit");
    CHECK(res.columns[1] == "rho_pp_nonstationary_full");
    // the dressing correction vanishes with the drive
    CHECK(std::abs(res.populations[0][0] - res.populations[1][0]) < 1e-6);
    CHECK(std::abs(res.populations[0][1] - res.populations[1][1]) < 1e-6);

    // a = 0 collapses both columns onto the bare kappa_s sweep
    SimConfig bare = base;
    bare.policy = NonstationaryPolicy{0.05, NonstationaryModel{ExponentialMean{0.0, 2.0}},
                                      DppMode::Unit};
    const auto res0 = population_vs_amplitude_at_pulse_end(bare, grid);
    auto markov = basic_spec(grid, {MarkovPolicy{0.05}});
    const auto ref = area_sweep(markov);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(res0.populations[0][i] - ref.populations[0][i]) < 1e-12);
        CHECK(std::abs(res0.populations[1][i] - ref.populations[0][i]) < 1e-12);
    }

    CHECK_THROWS_AS(population_vs_amplitude_at_pulse_end(markov.base, grid), validation_error);
}

TEST_CASE("sweep validation") {
    CHECK_THROWS_AS(area_sweep(basic_spec({}, {MarkovPolicy{0.0}})), validation_error);
    CHECK_THROWS_AS(area_sweep(basic_spec({1.0, 0.5}, {MarkovPolicy{0.0}})), validation_error);
    CHECK_THROWS_AS(area_sweep(basic_spec({-0.5, 1.0}, {MarkovPolicy{0.0}})), validation_error);
    CHECK_THROWS_AS(area_sweep(basic_spec({1.0}, {})), validation_error);
}
