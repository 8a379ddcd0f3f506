#include "rabisim/spectral.hpp"

#include <cmath>

#include "rabisim/errors.hpp"

namespace rabi {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
} // namespace

void validate(const SpectralModel& m) {
    std::visit(overloaded{
                   [](const ConstantSpectrum& s) {
                       if (!(s.k0 >= 0.0)) throw validation_error("spectrum: k0 must be >= 0");
                   },
                   [](const TaylorSpectrum& s) {
                       if (!(s.k0 >= 0.0)) throw validation_error("spectrum: k0 must be >= 0");
                       if (!std::isfinite(s.k1) || !std::isfinite(s.k2))
                           throw validation_error("spectrum: non-finite Taylor coefficient");
                   },
                   [](const GaussianSpectrum& s) {
                       if (!(s.k0 >= 0.0)) throw validation_error("spectrum: k0 must be >= 0");
                       if (!(s.width > 0.0)) throw validation_error("spectrum: width must be > 0");
                   },
                   [](const LorentzianSpectrum& s) {
                       if (!(s.k0 >= 0.0)) throw validation_error("spectrum: k0 must be >= 0");
                       if (!(s.width > 0.0)) throw validation_error("spectrum: width must be > 0");
                   },
               },
               m);
}

std::string spectrum_name(const SpectralModel& m) {
    return std::visit(overloaded{[](const ConstantSpectrum&) { return std::string("constant"); },
                                 [](const TaylorSpectrum&) { return std::string("taylor"); },
                                 [](const GaussianSpectrum&) { return std::string("gaussian"); },
                                 [](const LorentzianSpectrum&) { return std::string("lorentzian"); }},
                      m);
}

double k_omega(const SpectralModel& m, double dw) {
    return std::visit(
        overloaded{
            [](const ConstantSpectrum& s) { return s.k0; },
            [&](const TaylorSpectrum& s) { return s.k0 + s.k1 * dw + 0.5 * s.k2 * dw * dw; },
            [&](const GaussianSpectrum& s) {
                const double u = (dw - s.center) / s.width;
                return s.k0 * std::exp(-0.5 * u * u);
            },
            [&](const LorentzianSpectrum& s) {
                const double u = dw - s.center;
                return s.k0 * s.width * s.width / (u * u + s.width * s.width);
            },
        },
        m);
}

SpectralDerivs k_derivs(const SpectralModel& m) {
    return std::visit(
        overloaded{
            [](const ConstantSpectrum& s) { return SpectralDerivs{s.k0, 0.0, 0.0}; },
            [](const TaylorSpectrum& s) { return SpectralDerivs{s.k0, s.k1, s.k2}; },
            [](const GaussianSpectrum& s) {
                const double w2 = s.width * s.width;
                const double v = s.k0 * std::exp(-0.5 * s.center * s.center / w2);
                return SpectralDerivs{v, v * s.center / w2,
                                      v * (s.center * s.center / (w2 * w2) - 1.0 / w2)};
            },
            [](const LorentzianSpectrum& s) {
                const double g2 = s.width * s.width;
                const double d = s.center * s.center + g2;
                const double v = s.k0 * g2 / d;
                return SpectralDerivs{v, 2.0 * s.k0 * g2 * s.center / (d * d),
                                      s.k0 * g2 * (6.0 * s.center * s.center - 2.0 * g2) / (d * d * d)};
            },
        },
        m);
}

std::complex<double> k_time(const SpectralModel& m, double dt) {
    return std::visit(
        overloaded{
            [](const ConstantSpectrum&) -> std::complex<double> {
                throw unsupported_transform(
                    "k_time: constant spectrum transforms to a delta; handled analytically in "
                    "quadrature");
            },
            [](const TaylorSpectrum&) -> std::complex<double> {
                throw unsupported_transform("k_time: Taylor spectrum is not integrable");
            },
            [&](const GaussianSpectrum& s) -> std::complex<double> {
                const double amp = s.k0 * s.width * std::sqrt(kTwoPi) *
                                   std::exp(-0.5 * s.width * s.width * dt * dt);
                return amp * std::exp(std::complex<double>(0.0, -s.center * dt));
            },
            [&](const LorentzianSpectrum& s) -> std::complex<double> {
                const double pi = kTwoPi / 2.0;
                const double amp = pi * s.k0 * s.width * std::exp(-s.width * std::abs(dt));
                return amp * std::exp(std::complex<double>(0.0, -s.center * dt));
            },
        },
        m);
}

bool has_time_domain(const SpectralModel& m) {
    return std::holds_alternative<GaussianSpectrum>(m) ||
           std::holds_alternative<LorentzianSpectrum>(m);
}

double correlation_time(const SpectralModel& m) {
    return std::visit(overloaded{[](const ConstantSpectrum&) { return 0.0; },
                                 [](const TaylorSpectrum&) { return 0.0; },
                                 [](const GaussianSpectrum& s) { return std::sqrt(2.0) / s.width; },
                                 [](const LorentzianSpectrum& s) { return 1.0 / s.width; }},
                      m);
}

} // namespace rabi
