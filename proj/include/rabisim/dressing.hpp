#ifndef RABISIM_DRESSING_HPP
#define RABISIM_DRESSING_HPP

#include <array>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "rabisim/pulse.hpp"

namespace rabi {

/// Rectangular-pulse dressing parameters: omega_r = sqrt(delta^2 + omega^2),
/// c = delta/omega_r, s = omega/omega_r. The degenerate omega_r = 0 case is
/// the free-evolution limit (c = 1, s = 0).
struct DressingParams {
    double omega = 0.0;
    double delta = 0.0;
    double omega_r = 0.0;
    double c = 1.0;
    double s = 0.0;

    DressingParams() = default;
    DressingParams(double omega_, double delta_);
};

// Population dressing function, (1 + c^2 + s^2 cos(omega_r t)) / 2.
// Even in t; bounded in [c^2, 1].
double d_plus_plus(const DressingParams& dp, double t);

// Coherence dressing function,
// (i omega / omega_r) { c [1 - cos(omega_r t)] + i sin(omega_r t) }.
// Series limit -omega * t near omega_r t = 0.
std::complex<double> d_plus_minus(const DressingParams& dp, double t);

// Dressing functions for an arbitrary envelope, from the numerically
// propagated two-level propagator U of H0(t):
//   D++ = |U_++|^2,   D+- = 2i U_++ conj(U_-+).
// Propagates from t0 over |t| with fixed-step RK4 (re-orthonormalized), so the
// result matches the closed forms evaluated at |t| for rectangular pulses.
std::pair<double, std::complex<double>> dress_numeric(const PulseSpec& p, const TlsParams& tls,
                                                      double t, double step = 5e-4);

// Same propagation done once for a whole set of sorted non-negative times.
std::vector<std::pair<double, std::complex<double>>> dress_numeric_table(
    const PulseSpec& p, const TlsParams& tls, std::span<const double> times, double step = 5e-4);

// Frobenius deviation of U^dagger U from identity at t0 + |t|.
double propagator_unitarity_residual(const PulseSpec& p, const TlsParams& tls, double t,
                                     double step = 5e-4);

} // namespace rabi

#endif
