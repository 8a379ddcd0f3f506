#ifndef RABISIM_PULSE_HPP
#define RABISIM_PULSE_HPP

#include <complex>
#include <utility>
#include <vector>

namespace rabi {

/// Units across the library: time in ps, rates and angular frequencies in
/// rad/ps (== ps^-1). A rectangular pulse stores the full Rabi frequency
/// `omega`; its envelope value is omega/2, so area(theta) = omega * duration
/// and theta = pi is a pi-pulse exactly.
struct PulseSpec {
    enum class Shape { Rectangular, Sampled };

    Shape shape = Shape::Rectangular;
    double omega = 0.0;      // rad/ps, full Rabi frequency (rectangular)
    double duration = 1.0;   // ps
    double t0 = 0.0;         // ps, pulse start
    // Sampled envelope values (already the envelope, i.e. Omega(t)); sorted,
    // first sample at t0, last at t0 + duration.
    std::vector<std::pair<double, std::complex<double>>> samples;

    double end() const { return t0 + duration; }
};

struct TlsParams {
    double delta = 0.0;        // rad/ps, detuning of the driving field
    double delta_shift = 0.0;  // rad/ps, reservoir-induced shift
    double effective_delta() const { return delta + delta_shift; }
};

struct BlochState {
    double rho_pp = 0.0;                    // excited-state population
    std::complex<double> rho_pm{0.0, 0.0};  // coherence rho_{+-}
};

// Throws validation_error on constraint violations.
void validate(const PulseSpec& p);
void validate(const TlsParams& tls);

// Envelope value Omega(t): omega/2 inside the support for rectangular pulses,
// linear interpolation for sampled ones, zero outside.
std::complex<double> envelope_at(const PulseSpec& p, double t);

// Dimensionless pulse area, integral of 2|Omega(t)| (trapezoid on samples).
double pulse_area(const PulseSpec& p);

// State sanity: population in [0,1] and |rho_pm|^2 <= rho_pp(1-rho_pp),
// both up to `tol`.
bool physically_valid(const BlochState& s, double tol = 1e-8);

} // namespace rabi

#endif
