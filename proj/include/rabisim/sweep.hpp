#ifndef RABISIM_SWEEP_HPP
#define RABISIM_SWEEP_HPP

#include <span>
#include <string>
#include <vector>

#include "rabisim/bloch.hpp"

namespace rabi {

// Amplitude sweeps in pi-pulse units: grid value u maps to omega = u pi / T at
// fixed width T, so u = 1 is a pi pulse. Amplitude and area coincide for
// rectangular pulses; the enum keeps the two spellings accepted by configs.
enum class SweepVariable { AmplitudeAtFixedWidth, AreaAtFixedWidth };

struct SweepSpec {
    SimConfig base;  // pulse width/t0, tls, integrator settings; omega is overwritten
    SweepVariable variable = SweepVariable::AreaAtFixedWidth;
    std::vector<double> grid;               // pi-pulse units, increasing, >= 0
    std::vector<DephasingPolicy> policies;  // one output column per policy
    std::vector<std::string> labels;        // optional; default policy_name()
};

struct SweepResult {
    std::vector<double> amplitudes;
    std::vector<std::string> columns;              // "rho_pp_<label>"
    std::vector<std::vector<double>> populations;  // [column][row]
};

void validate(const SweepSpec& spec);

// Final populations over the grid, one column per policy. All grid cells are
// independent; jobs > 1 distributes them over an OpenMP loop. Serial and
// parallel paths run the identical per-cell code, so results are bit-equal.
SweepResult area_sweep(const SweepSpec& spec, int jobs = 1);
SweepResult area_sweep_serial(const SweepSpec& spec);

// One sweep per pulse width, same policies, amplitudes in pi-pulse units so
// the curves are directly comparable.
std::vector<SweepResult> width_series(const SweepSpec& spec, std::span<const double> widths,
                                      int jobs = 1);

// Fig.-2(b)-style sweep: population at the end of the pulse under the
// non-stationary policy, unit-dressing and full-dressing columns side by side.
SweepResult population_vs_amplitude_at_pulse_end(const SimConfig& base,
                                                 std::span<const double> grid, int jobs = 1);

// Local maxima of y(u), refined by a quadratic through the three bracketing
// samples.
struct Peak {
    double u = 0.0;
    double height = 0.0;
};
std::vector<Peak> extract_peaks(std::span<const double> u, std::span<const double> y);

} // namespace rabi

#endif
