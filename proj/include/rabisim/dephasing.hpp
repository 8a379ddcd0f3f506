#ifndef RABISIM_DEPHASING_HPP
#define RABISIM_DEPHASING_HPP

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rabisim/dressing.hpp"
#include "rabisim/pulse.hpp"
#include "rabisim/reservoir.hpp"
#include "rabisim/spectral.hpp"

namespace rabi {

// How the time-dependent dephasing rate kappa(t) and the generalized Rabi
// frequency obar(t) are produced.

struct MarkovPolicy {
    double kappa = 0.0;  // ps^-1, drive-independent
};

struct StationaryTripletPolicy {
    SpectralModel spectrum;
};

struct StationaryExpansionPolicy {
    SpectralModel spectrum;
};

enum class DppMode { Unit, Full };

struct NonstationaryPolicy {
    double kappa_s = 0.0;  // stationary background rate, ps^-1
    NonstationaryModel model;
    DppMode dpp = DppMode::Unit;
};

struct GeneralQuadraturePolicy {
    CorrelationKernel kernel;
    double quad_tol = 1e-8;  // absolute, ps^-1
};

using DephasingPolicy = std::variant<MarkovPolicy, StationaryTripletPolicy,
                                     StationaryExpansionPolicy, NonstationaryPolicy,
                                     GeneralQuadraturePolicy>;

void validate(const DephasingPolicy& p);
std::string policy_name(const DephasingPolicy& p);

// --- closed-form rates -------------------------------------------------

double kappa_markov(const DephasingPolicy& p);  // throws unless Markov

// Triplet rate: (pi/2)(c^2+1) K(0) + (pi/4) s^2 [K(omega_r) + K(-omega_r)].
// The undriven limit (omega = 0) is pi K(0) for every spectrum.
double kappa_triplet(const SpectralModel& m, double omega, double delta);

// Quadratic-expansion rate pi K + (pi omega^2 / 4) K''. Negative values are a
// weak-coupling artifact; they are clamped to zero and flagged via `clamped`.
double kappa_expansion(const SpectralModel& m, double omega, bool* clamped = nullptr);

// Generalized Rabi frequency (omega - pi omega K' + (pi omega delta / 2) K'') / 2.
std::complex<double> rabi_generalized(const SpectralModel& m, double omega, double delta);

// Non-stationary rate kappa_s + <R(t)> Int_{t0}^{t} <R(tau)> D++(tau - t) dtau.
// Exponential mean field with unit dressing evaluates in closed form,
// kappa_s + a^2 gamma omega^2 e^{-g dt} (1 - e^{-g dt}); everything else goes
// through adaptive quadrature.
double kappa_nonstationary(const NonstationaryPolicy& p, double t, const DressingParams& dp,
                           const PulseSpec& pulse, double quad_tol = 1e-10);

// --- general quadrature (time-local integrals of the correlation) ------

// kappa(t) = Int_{t0}^{t} <R(tau) R(t)> D++(tau - t) dtau. A constant
// (delta-correlated) stationary part contributes exactly pi K(0) with the
// endpoint half-weight; regular kernels are integrated adaptively. The real
// part is the decay rate, the imaginary part a frequency shift.
std::complex<double> kappa_quadrature(const CorrelationKernel& kernel, double t, double t0,
                                      const DressingParams& dp, double quad_tol = 1e-8);

// obar(t) = Omega(t) - Int_{t0}^{t} <R(tau) R(t)> D+-(tau - t) dtau.
std::complex<double> omega_bar_quadrature(const CorrelationKernel& kernel, double t, double t0,
                                          const DressingParams& dp, const PulseSpec& pulse,
                                          double quad_tol = 1e-8);

// --- rate evaluation for the integrator and traces ---------------------

struct RateTrace {
    std::vector<double> times;                     // ps, strictly increasing
    std::vector<std::complex<double>> kappa;       // ps^-1
    std::vector<std::complex<double>> omega_bar;   // rad/ps
};

// Evaluates kappa(t), obar(t) and the mean field for one (policy, pulse, tls)
// combination. Quadrature-backed policies can precompute on a uniform grid
// (spacing grid_dt) and interpolate with a local cubic; grid_dt = 0 evaluates
// integrals directly on every call.
class RateProvider {
public:
    RateProvider(const DephasingPolicy& policy, const PulseSpec& pulse, const TlsParams& tls,
                 double t_end, double grid_dt = 0.0);

    std::complex<double> kappa(double t) const;
    std::complex<double> omega_bar(double t) const;
    double mean_field(double t) const;
    bool clamped() const { return clamped_; }

private:
    DephasingPolicy policy_;
    PulseSpec pulse_;
    double delta_ = 0.0;
    double t_end_ = 0.0;
    DressingParams dressing_;
    bool clamped_ = false;
    double quad_tol_ = 1e-8;

    // constants for the stationary policies (inside / outside the pulse)
    std::complex<double> kappa_in_{0.0, 0.0}, kappa_out_{0.0, 0.0};
    std::complex<double> obar_in_{0.0, 0.0};

    // precomputed integral corrections on a uniform grid
    double grid_t0_ = 0.0, grid_dt_ = 0.0;
    std::vector<std::complex<double>> grid_kappa_;
    std::vector<std::complex<double>> grid_obar_corr_;  // subtracted from the envelope

    std::shared_ptr<const std::vector<std::pair<double, std::complex<double>>>> dress_table_;
    double dress_dt_ = 0.0;

    std::complex<double> kappa_direct(double t) const;
    std::complex<double> obar_correction_direct(double t) const;
};

// Tabulates kappa(t) and obar(t) on `grid` under the policy. Grid points are
// evaluated independently; jobs > 1 runs them in an OpenMP loop with results
// identical to the serial path.
RateTrace rate_trace(const DephasingPolicy& policy, const PulseSpec& pulse, const TlsParams& tls,
                     std::span<const double> grid, int jobs = 1);

} // namespace rabi

#endif
