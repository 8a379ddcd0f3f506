#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "rabisim/dephasing.hpp"
#include "rabisim/errors.hpp"

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

// independent oracle for the exponential mean field under full dressing:
// kappa_s + R(t) a g O [ (1+c^2)/2 (1-e^{-g dt})/g + (s^2/2) Ic ],
// Ic = Re[ e^{-i Or dt} (e^{(i Or - g) dt} - 1) / (i Or - g) ]
double full_dpp_oracle(double kappa_s, double a, double g, double omega, double delta,
                       double dt) {
    const DressingParams dp(omega, delta);
    const cplx ior{-g, dp.omega_r};
    const double ic = std::real(std::exp(cplx{0.0, -dp.omega_r * dt}) *
                                (std::exp(ior * dt) - 1.0) / ior);
    const double integral = a * g * omega *
                            ((1.0 + dp.c * dp.c) / 2.0 * (1.0 - std::exp(-g * dt)) / g +
                             dp.s * dp.s / 2.0 * ic);
    const double rt = a * g * omega * std::exp(-g * dt);
    return kappa_s + rt * integral;
}
} // namespace

TEST_CASE("kappa_markov") {
    CHECK(kappa_markov(DephasingPolicy{MarkovPolicy{0.1}}) == 0.1);
    CHECK(kappa_markov(DephasingPolicy{MarkovPolicy{0.0}}) == 0.0);
    CHECK_THROWS_AS(kappa_markov(DephasingPolicy{StationaryTripletPolicy{}}), validation_error);
}

TEST_CASE("kappa_triplet: undriven and flat-spectrum limits") {
    const SpectralModel g{GaussianSpectrum{0.05, 0.0, 2.0}};
    CHECK(kappa_triplet(g, 0.0, 0.0) == doctest::Approx(kPi * 0.05).epsilon(1e-14));
    CHECK(kappa_triplet(g, 0.0, 1.7) == doctest::Approx(kPi * 0.05).epsilon(1e-14));

    const SpectralModel flat{ConstantSpectrum{0.08}};
    for (double omega : {0.0, 1.0, 10.0})
        CHECK(kappa_triplet(flat, omega, 0.3) == doctest::Approx(kPi * 0.08).epsilon(1e-14));
}

TEST_CASE("triplet equals expansion exactly for quadratic spectra") {
    // the expansion step is an identity on quadratic K: s^2 omega_r^2 = omega^2
    const SpectralModel quad{TaylorSpectrum{0.05, 0.0, -0.002}};
    for (int i = 1; i <= 10; ++i)
        for (int j = 1; j <= 10; ++j) {
            const double omega = 0.5 * i;
            const double delta = 0.4 * (j - 1);
            const double t = kappa_triplet(quad, omega, delta);
            bool clamped = false;
            const double e = kappa_expansion(quad, omega, &clamped);
            if (!clamped) CHECK(t == doctest::Approx(e).epsilon(1e-12));
        }
}

TEST_CASE("triplet vs expansion on a wide Gaussian") {
    // width 10x the effective Rabi frequency: agreement within 1 percent
    const SpectralModel g{GaussianSpectrum{0.05, 0.0, 25.0}};
    for (double omega : {0.5, 1.5, 2.0})
        for (double delta : {0.0, 1.0}) {
            const double t = kappa_triplet(g, omega, delta);
            const double e = kappa_expansion(g, omega);
            CHECK(std::abs(t - e) / e < 0.01);
        }
}

TEST_CASE("kappa_expansion examples and clamping") {
    CHECK(kappa_expansion(SpectralModel{TaylorSpectrum{0.05, 0.0, 0.002}}, 4.0) ==
          doctest::Approx(kPi * (0.05 + 4.0 * 0.002)).epsilon(1e-14));
    CHECK(kappa_expansion(SpectralModel{TaylorSpectrum{0.05, 0.3, 0.0}}, 7.0) ==
          doctest::Approx(kPi * 0.05).epsilon(1e-14));
    CHECK(kappa_expansion(SpectralModel{GaussianSpectrum{0.05, 0.0, 2.0}}, 0.0) ==
          doctest::Approx(kPi * 0.05).epsilon(1e-14));

    bool clamped = false;
    const double v = kappa_expansion(SpectralModel{TaylorSpectrum{0.01, 0.0, -1.0}}, 10.0,
                                     &clamped);
    CHECK(v == 0.0);
    CHECK(clamped);
}

TEST_CASE("rabi_generalized examples") {
    CHECK(rabi_generalized(SpectralModel{ConstantSpectrum{0.3}}, 2.0, 0.7).real() ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rabi_generalized(SpectralModel{TaylorSpectrum{0.0, 0.01, 0.0}}, 2.0, 0.0).real() ==
          doctest::Approx((2.0 - 2.0 * kPi * 0.01) / 2.0).epsilon(1e-12));
    CHECK(std::abs(rabi_generalized(SpectralModel{TaylorSpectrum{0.1, 0.3, 0.4}}, 0.0, 1.0)) ==
          0.0);
}

TEST_CASE("kappa_nonstationary: closed form for exponential/unit") {
    NonstationaryPolicy p{0.3, NonstationaryModel{ExponentialMean{1.0, 2.0}}, DppMode::Unit};
    const auto pulse = rect(kPi, 50.0);
    const DressingParams dp(kPi, 0.0);

    CHECK(kappa_nonstationary(p, 0.0, dp, pulse) == doctest::Approx(0.3));
    // peak value kappa_s + gamma omega^2 / 4 at dt = ln2 / gamma
    const double tpk = std::log(2.0) / 2.0;
    CHECK(kappa_nonstationary(p, tpk, dp, pulse) ==
          doctest::Approx(0.3 + 2.0 * kPi * kPi / 4.0).epsilon(1e-12));
    // decays back to kappa_s
    CHECK(kappa_nonstationary(p, 40.0, dp, pulse) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("kappa_nonstationary: full dressing against the analytic oracle") {
    const double a = 0.4, g = 2.0, omega = 3.0, delta = 1.2, kappa_s = 0.05;
    NonstationaryPolicy p{kappa_s, NonstationaryModel{ExponentialMean{a, g}}, DppMode::Full};
    const auto pulse = rect(omega, 50.0);
    const DressingParams dp(omega, delta);
    for (double t : {0.1, 0.35, 0.9, 2.0, 6.0})
        CHECK(kappa_nonstationary(p, t, dp, pulse, 1e-12) ==
              doctest::Approx(full_dpp_oracle(kappa_s, a, g, omega, delta, t)).epsilon(1e-9));
}

TEST_CASE("kappa_nonstationary: full dressing approaches unit dressing as omega_r -> 0") {
    // tiny omega with delta = 0: D++ -> 1
    const double omega = 1e-4;
    NonstationaryPolicy unit{0.1, NonstationaryModel{ExponentialMean{1.0, 2.0}}, DppMode::Unit};
    NonstationaryPolicy full = unit;
    full.dpp = DppMode::Full;
    const auto pulse = rect(omega, 50.0);
    const DressingParams dp(omega, 0.0);
    for (double t : {0.2, 0.5, 1.0, 3.0})
        CHECK(kappa_nonstationary(full, t, dp, pulse, 1e-13) ==
              doctest::Approx(kappa_nonstationary(unit, t, dp, pulse)).epsilon(1e-8));
}

TEST_CASE("kappa_nonstationary: discrete modes agree between unit quadrature and direct sum") {
    // single mode: <R(t)> = 2 g Omega_1/Delta_1 cos(Delta_1 (t-t0));
    // with D++ = 1 the integral is analytic
    const double gc = 0.1, dm = 1.5, om = 0.5;
    NonstationaryPolicy p{0.0, NonstationaryModel{DiscreteModes{{{gc, dm, om}}}}, DppMode::Unit};
    const auto pulse = rect(2.0, 50.0);
    const DressingParams dp(2.0, 0.0);
    const double amp = 2.0 * gc * om / dm;
    for (double t : {0.3, 1.1, 2.7}) {
        const double integral = amp * std::sin(dm * t) / dm;
        const double expected = amp * std::cos(dm * t) * integral;
        CHECK(kappa_nonstationary(p, t, dp, pulse, 1e-13) ==
              doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("kappa_quadrature: empty interval and flat spectrum") {
    const DressingParams dp(2.0, 0.0);
    CorrelationKernel flat{SpectralModel{ConstantSpectrum{0.05}}, std::nullopt};
    CHECK(kappa_quadrature(flat, 0.0, 0.0, dp) == cplx{0.0, 0.0});
    // delta kernel with the endpoint half-weight: exactly pi K for any t > t0
    CHECK(kappa_quadrature(flat, 0.7, 0.0, dp).real() ==
          doctest::Approx(kPi * 0.05).epsilon(1e-14));
    CHECK(kappa_quadrature(flat, 31.0, 0.0, dp).real() ==
          doctest::Approx(kPi * 0.05).epsilon(1e-14));
}

TEST_CASE("kappa_quadrature: undriven Gaussian follows the erf ramp to pi K") {
    const double k0 = 0.05, sigma = 2.0;
    CorrelationKernel kernel{SpectralModel{GaussianSpectrum{k0, 0.0, sigma}}, std::nullopt};
    const DressingParams dp(0.0, 0.0);
    for (double dt : {0.2, 0.5, 1.0, 3.0}) {
        const double expected = kPi * k0 * std::erf(sigma * dt / std::sqrt(2.0));
        const cplx v = kappa_quadrature(kernel, dt, 0.0, dp, 1e-12);
        CHECK(v.real() == doctest::Approx(expected).epsilon(1e-9));
        CHECK(std::abs(v.imag()) < 1e-10);
    }
    // asymptote: pi K(0) within 2 percent once dt >= 5 / width
    const cplx late = kappa_quadrature(kernel, 5.0 / sigma, 0.0, dp, 1e-12);
    CHECK(std::abs(late.real() - kPi * k0) / (kPi * k0) < 0.02);
}

TEST_CASE("kappa_quadrature: wide Gaussian asymptote matches the expansion rate") {
    const SpectralModel g{GaussianSpectrum{0.05, 0.0, 10.0}};
    CorrelationKernel kernel{g, std::nullopt};
    for (double omega : {1.0, 2.0})
        for (double delta : {0.0, 0.5}) {
            const DressingParams dp(omega, delta);
            const cplx v = kappa_quadrature(kernel, 4.0, 0.0, dp, 1e-11);
            const double e = kappa_expansion(g, omega);
            CHECK(std::abs(v.real() - e) / e < 0.05);
        }
}

TEST_CASE("kappa_quadrature: nonstationary-only kernel equals kappa_nonstationary - kappa_s") {
    CorrelationKernel kernel{SpectralModel{ConstantSpectrum{0.0}},
                             NonstationaryModel{ExponentialMean{0.5, 2.0}}};
    NonstationaryPolicy pol{0.0, *kernel.nonstationary, DppMode::Full};
    const double omega = 2.5, delta = 0.8;
    const auto pulse = rect(omega, 50.0);
    const DressingParams dp(omega, delta);
    for (double t : {0.3, 0.9, 2.2}) {
        const cplx q = kappa_quadrature(kernel, t, 0.0, dp, 1e-12);
        CHECK(q.real() ==
              doctest::Approx(kappa_nonstationary(pol, t, dp, pulse, 1e-12)).epsilon(1e-8));
        CHECK(std::abs(q.imag()) < 1e-9);
    }
}

TEST_CASE("kappa_quadrature: halving the tolerance moves the result less than the tolerance") {
    CorrelationKernel kernel{SpectralModel{GaussianSpectrum{0.05, 0.4, 3.0}}, std::nullopt};
    const DressingParams dp(2.0, 0.7);
    const cplx a = kappa_quadrature(kernel, 2.0, 0.0, dp, 1e-8);
    const cplx b = kappa_quadrature(kernel, 2.0, 0.0, dp, 5e-9);
    CHECK(std::abs(a - b) < 2e-8);
}

TEST_CASE("omega_bar_quadrature: trivial limits") {
    const auto pulse = rect(2.0, 10.0);
    const DressingParams dp(2.0, 0.0);
    // zero kernel: bare envelope
    CorrelationKernel zero{SpectralModel{GaussianSpectrum{0.0, 0.0, 1.0}}, std::nullopt};
    CHECK(omega_bar_quadrature(zero, 4.0, 0.0, dp, pulse).real() == doctest::Approx(1.0));
    // empty interval: envelope at t0
    CorrelationKernel g{SpectralModel{GaussianSpectrum{0.05, 0.0, 2.0}}, std::nullopt};
    CHECK(omega_bar_quadrature(g, 0.0, 0.0, dp, pulse).real() == doctest::Approx(1.0));
    // flat spectrum: D+-(0) = 0 kills the delta; the Markov limit keeps obar bare
    CorrelationKernel flat{SpectralModel{ConstantSpectrum{0.4}}, std::nullopt};
    CHECK(omega_bar_quadrature(flat, 3.0, 0.0, dp, pulse).real() == doctest::Approx(1.0));
}

TEST_CASE("omega_bar_quadrature: wide Gaussian asymptote near the generalized Rabi value") {
    const SpectralModel g{GaussianSpectrum{0.05, 0.0, 10.0}};
    CorrelationKernel kernel{g, std::nullopt};
    const auto pulse = rect(2.0, 10.0);
    const DressingParams dp(2.0, 0.0);
    const cplx v = omega_bar_quadrature(kernel, 4.0, 0.0, dp, pulse, 1e-11);
    const cplx e = rabi_generalized(g, 2.0, 0.0);
    CHECK(std::abs(v - e) / std::abs(e) < 0.05);
}

TEST_CASE("rate_trace: markov gives constant columns") {
    const auto pulse = rect(2.0, 5.0);
    std::vector<double> grid;
    for (double t = 0.0; t <= 5.0; t += 0.5) grid.push_back(t);
    const auto tr = rate_trace(DephasingPolicy{MarkovPolicy{0.2}}, pulse, TlsParams{}, grid);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        CHECK(tr.kappa[i] == cplx{0.2, 0.0});
        CHECK(tr.omega_bar[i].real() == doctest::Approx(1.0));
    }
}

TEST_CASE("rate_trace: expansion policy columns equal the closed forms") {
    const SpectralModel m{TaylorSpectrum{0.05, 0.01, 0.002}};
    const auto pulse = rect(4.0, 5.0);
    const TlsParams tls{0.7, 0.0};
    std::vector<double> grid{0.0, 1.0, 2.5, 4.9};
    const auto tr =
        rate_trace(DephasingPolicy{StationaryExpansionPolicy{m}}, pulse, tls, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(tr.kappa[i].real() == doctest::Approx(kappa_expansion(m, 4.0)).epsilon(1e-14));
        CHECK(tr.omega_bar[i] == rabi_generalized(m, 4.0, 0.7));
    }
}

TEST_CASE("rate_trace: nonstationary rises from kappa_s, peaks near ln2/gamma, decays") {
    NonstationaryPolicy pol{0.1, NonstationaryModel{ExponentialMean{1.0, 2.0}}, DppMode::Unit};
    const auto pulse = rect(kPi, 20.0);
    std::vector<double> grid;
    for (double t = 0.0; t <= 10.0; t += 0.01) grid.push_back(t);
    const auto tr = rate_trace(DephasingPolicy{pol}, pulse, TlsParams{}, grid);
    std::size_t imax = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (tr.kappa[i].real() > tr.kappa[imax].real()) imax = i;
    CHECK(tr.kappa.front().real() == doctest::Approx(0.1));
    CHECK(grid[imax] == doctest::Approx(std::log(2.0) / 2.0).epsilon(0.03));
    CHECK(tr.kappa.back().real() == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("rate_trace: parallel evaluation is bit-identical to serial") {
    NonstationaryPolicy pol{0.05, NonstationaryModel{ExponentialMean{0.5, 2.0}}, DppMode::Full};
    const auto pulse = rect(2.0, 5.0);
    std::vector<double> grid;
    for (double t = 0.0; t <= 5.0; t += 0.25) grid.push_back(t);
    const auto serial = rate_trace(DephasingPolicy{pol}, pulse, TlsParams{}, grid, 1);
    const auto parallel = rate_trace(DephasingPolicy{pol}, pulse, TlsParams{}, grid, 4);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(serial.kappa[i] == parallel.kappa[i]);
        CHECK(serial.omega_bar[i] == parallel.omega_bar[i]);
    }
}

TEST_CASE("policy validation") {
    CHECK_THROWS_AS(validate(DephasingPolicy{MarkovPolicy{-0.1}}), validation_error);
    CHECK_THROWS_AS(validate(DephasingPolicy{GeneralQuadraturePolicy{
                        CorrelationKernel{SpectralModel{ConstantSpectrum{0.1}}, std::nullopt},
                        0.0}}),
                    validation_error);
    CHECK(policy_name(DephasingPolicy{MarkovPolicy{0.1}}) == "markov");
    CHECK(policy_name(DephasingPolicy{NonstationaryPolicy{
              0.0, NonstationaryModel{ExponentialMean{1.0, 1.0}}, DppMode::Full}}) ==
          "nonstationary_full");
}
