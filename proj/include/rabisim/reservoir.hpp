#ifndef RABISIM_RESERVOIR_HPP
#define RABISIM_RESERVOIR_HPP

#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rabisim/spectral.hpp"

namespace rabi {

// Transient mean field of a pulse-driven reservoir. The exponential model is
// <R(t)> = a * gamma * omega * exp(-gamma (t - t0)); the discrete-mode model
// is the vacuum mean of driven bosonic modes, kept in the rotating frame so
// only the mode detunings set the stored phase.

struct ExponentialMean {
    double a = 1.0;      // dimensionless prefactor
    double gamma = 1.0;  // ps^-1 decay rate of the excitation
};

struct ReservoirMode {
    double g = 0.0;      // coupling, rad/ps
    double delta = 1.0;  // mode detuning from the drive, rad/ps (nonzero)
    double omega = 0.0;  // mode Rabi frequency, rad/ps
};

struct DiscreteModes {
    std::vector<ReservoirMode> modes;
};

using NonstationaryModel = std::variant<ExponentialMean, DiscreteModes>;

void validate(const NonstationaryModel& m);
std::string nonstationary_name(const NonstationaryModel& m);

// <R(t)> for the pulse starting at t0 with full Rabi frequency omega.
// Real-valued by construction for both models; returned as complex for the
// kernel algebra.
std::complex<double> mean_r(const NonstationaryModel& m, double t, double t0, double omega);

// Static detuning shift -2 sum_j g_j omega_j / delta_j of the discrete-mode
// model; the exponential model carries no microscopic shift and throws.
double detuning_shift(const NonstationaryModel& m);

// Reservoir correlation split <R(tau) R(t)> = K(tau - t) + P(tau, t) with the
// non-stationary part P(tau, t) = <R(tau)><R(t)> when a mean-field model is
// attached.
struct CorrelationKernel {
    SpectralModel stationary;
    std::optional<NonstationaryModel> nonstationary;
};

void validate(const CorrelationKernel& k);

std::complex<double> correlation(const CorrelationKernel& k, double tau, double t, double t0,
                                 double omega);

} // namespace rabi

#endif
