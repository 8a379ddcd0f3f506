#ifndef RABISIM_SPECTRAL_HPP
#define RABISIM_SPECTRAL_HPP

#include <complex>
#include <string>
#include <variant>

namespace rabi {

// Reservoir spectral density K, parameterized by offset from the laser
// frequency (the absolute carrier never enters the numerics). Units:
// ps^-1 / (rad/ps), so pi * K(0) is a rate in ps^-1.

struct ConstantSpectrum {
    double k0 = 0.0;  // flat density: the exact Markovian limit
};

struct TaylorSpectrum {
    double k0 = 0.0, k1 = 0.0, k2 = 0.0;  // K(dw) = k0 + k1 dw + k2 dw^2 / 2
};

struct GaussianSpectrum {
    double k0 = 0.0;     // peak value
    double center = 0.0; // offset of the peak from the laser frequency
    double width = 1.0;  // standard deviation, rad/ps
};

struct LorentzianSpectrum {
    double k0 = 0.0;     // peak value
    double center = 0.0;
    double width = 1.0;  // half width at half maximum, rad/ps
};

using SpectralModel =
    std::variant<ConstantSpectrum, TaylorSpectrum, GaussianSpectrum, LorentzianSpectrum>;

struct SpectralDerivs {
    double k0 = 0.0;  // K at the laser frequency
    double k1 = 0.0;  // dK/dw
    double k2 = 0.0;  // d2K/dw2
};

void validate(const SpectralModel& m);
std::string spectrum_name(const SpectralModel& m);

// K evaluated at offset dw from the laser frequency.
double k_omega(const SpectralModel& m, double dw);

// Exact analytic value and first two derivatives at the laser frequency.
SpectralDerivs k_derivs(const SpectralModel& m);

// Time-domain correlation K(dt) = integral dw K(dw) e^{-i dw dt}, closed form.
// Taylor has no transform; Constant transforms to a delta and is handled
// analytically inside the quadrature operations; both throw here.
std::complex<double> k_time(const SpectralModel& m, double dt);

// True when k_time is a regular function (Gaussian, Lorentzian).
bool has_time_domain(const SpectralModel& m);

// 1/e decay time scale of |k_time|, used to size quadrature panels.
double correlation_time(const SpectralModel& m);

} // namespace rabi

#endif
