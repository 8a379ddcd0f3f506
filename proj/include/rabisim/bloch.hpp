#ifndef RABISIM_BLOCH_HPP
#define RABISIM_BLOCH_HPP

#include <complex>
#include <optional>
#include <vector>

#include "rabisim/dephasing.hpp"
#include "rabisim/ode.hpp"
#include "rabisim/pulse.hpp"

namespace rabi {

struct SimConfig {
    PulseSpec pulse;
    TlsParams tls;
    DephasingPolicy policy = MarkovPolicy{0.0};
    BlochState initial{};               // ground state
    std::optional<double> t_end;        // default: end of the pulse
    StepControl step{};                 // max_step 0 -> resolve fastest oscillation
    // Eq. for the populations is integrated with the bare envelope; this flag
    // switches it to the generalized Rabi frequency instead.
    bool renormalize_population_drive = false;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<BlochState> states;
    std::vector<std::complex<double>> kappa_used;
};

struct BlochTangent {
    double d_rho_pp = 0.0;
    std::complex<double> d_rho_pm{0.0, 0.0};
};

void validate(const SimConfig& cfg);

double sim_end(const SimConfig& cfg);

// max_step = min(0.05 / omega_r, duration / 50); resolves the fastest
// oscillation present.
double default_max_step(const SimConfig& cfg);

// Right-hand side of the Bloch system at time t. Convenience form that builds
// the rate provider per call; the integrator reuses one provider internally.
BlochTangent derivative(const BlochState& s, double t, const SimConfig& cfg);
BlochTangent derivative(const BlochState& s, double t, const SimConfig& cfg,
                        const RateProvider& rates);

// Adaptive trajectory with `n_samples` uniformly spaced output times
// (endpoints included). n_samples < 2 records the endpoints only.
Trajectory integrate(const SimConfig& cfg, int n_samples = 201);

// Excited-state population at t_end.
double final_population(const SimConfig& cfg);

// Fixed-step RK4 reference path for the same configuration.
double final_population_rk4(const SimConfig& cfg, double dt);

// Bloch-vector length, sqrt(x^2 + y^2 + z^2) with x = 2 Re rho_pm,
// y = -2 Im rho_pm, z = 2 rho_pp - 1.
double bloch_length(const BlochState& s);

} // namespace rabi

#endif
