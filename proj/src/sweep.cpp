#include "rabisim/sweep.hpp"

#include <algorithm>
#include <cmath>

#include "rabisim/errors.hpp"
#include "rabisim/interp.hpp"

namespace rabi {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

std::vector<std::string> column_labels(const SweepSpec& spec) {
    std::vector<std::string> labels;
    labels.reserve(spec.policies.size());
    for (std::size_t i = 0; i < spec.policies.size(); ++i) {
        std::string base = i < spec.labels.size() && !spec.labels[i].empty()
                               ? spec.labels[i]
                               : policy_name(spec.policies[i]);
        // keep duplicates apart so CSV headers stay unambiguous
        std::string name = base;
        int suffix = 2;
        while (std::find(labels.begin(), labels.end(), name) != labels.end())
            name = base + "_" + std::to_string(suffix++);
        labels.push_back(name);
    }
    return labels;
}

double sweep_cell(const SweepSpec& spec, std::size_t col, std::size_t row) {
    SimConfig cfg = spec.base;
    cfg.policy = spec.policies[col];
    cfg.pulse.omega = spec.grid[row] * kPi / cfg.pulse.duration;
    return final_population(cfg);
}

SweepResult run_sweep(const SweepSpec& spec, int jobs) {
    validate(spec);
    SweepResult out;
    out.amplitudes = spec.grid;
    const auto labels = column_labels(spec);
    out.columns.reserve(labels.size());
    for (const auto& l : labels) out.columns.push_back("rho_pp_" + l);
    out.populations.assign(spec.policies.size(),
                           std::vector<double>(spec.grid.size(), 0.0));

    const long long ncells =
        static_cast<long long>(spec.policies.size() * spec.grid.size());
    const long long nrows = static_cast<long long>(spec.grid.size());
    const int nthreads = resolve_jobs(jobs);
    if (nthreads == 1) {
        for (long long cell = 0; cell < ncells; ++cell)
            out.populations[static_cast<std::size_t>(cell / nrows)]
                           [static_cast<std::size_t>(cell % nrows)] =
                sweep_cell(spec, static_cast<std::size_t>(cell / nrows),
                           static_cast<std::size_t>(cell % nrows));
    } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
        for (long long cell = 0; cell < ncells; ++cell)
            out.populations[static_cast<std::size_t>(cell / nrows)]
                           [static_cast<std::size_t>(cell % nrows)] =
                sweep_cell(spec, static_cast<std::size_t>(cell / nrows),
                           static_cast<std::size_t>(cell % nrows));
    }
    return out;
}

} // namespace

void validate(const SweepSpec& spec) {
    validate(spec.base.tls);
    validate(spec.base.pulse);
    if (spec.grid.empty()) throw validation_error("sweep: empty amplitude grid");
    for (std::size_t i = 0; i < spec.grid.size(); ++i) {
        if (!(spec.grid[i] >= 0.0))
            throw validation_error("sweep: amplitudes must be >= 0");
        if (i > 0 && !(spec.grid[i] > spec.grid[i - 1]))
            throw validation_error("sweep: amplitude grid must be increasing");
    }
    if (spec.policies.empty()) throw validation_error("sweep: no policies given");
    for (const auto& p : spec.policies) validate(p);
}

SweepResult area_sweep(const SweepSpec& spec, int jobs) { return run_sweep(spec, jobs); }

SweepResult area_sweep_serial(const SweepSpec& spec) { return run_sweep(spec, 1); }

std::vector<SweepResult> width_series(const SweepSpec& spec, std::span<const double> widths,
                                      int jobs) {
    if (widths.empty()) throw validation_error("width_series: no widths given");
    std::vector<SweepResult> out;
    out.reserve(widths.size());
    for (double w : widths) {
        if (!(w > 0.0)) throw validation_error("width_series: widths must be > 0");
        SweepSpec s = spec;
        s.base.pulse.duration = w;
        s.base.t_end.reset();  // read out at the end of each pulse
        out.push_back(run_sweep(s, jobs));
    }
    return out;
}

SweepResult population_vs_amplitude_at_pulse_end(const SimConfig& base,
                                                 std::span<const double> grid, int jobs) {
    const auto* ns = std::get_if<NonstationaryPolicy>(&base.policy);
    if (!ns)
        throw validation_error(
            "population_vs_amplitude_at_pulse_end: base policy must be nonstationary");
    SweepSpec spec;
    spec.base = base;
    spec.base.t_end.reset();
    spec.grid.assign(grid.begin(), grid.end());
    NonstationaryPolicy unit = *ns, full = *ns;
    unit.dpp = DppMode::Unit;
    full.dpp = DppMode::Full;
    spec.policies = {unit, full};
    return run_sweep(spec, jobs);
}

std::vector<Peak> extract_peaks(std::span<const double> u, std::span<const double> y) {
    std::vector<Peak> peaks;
    if (u.size() != y.size()) throw validation_error("extract_peaks: length mismatch");
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;
        const double denom = y[i - 1] - 2.0 * y[i] + y[i + 1];
        if (denom >= 0.0) {  // flat triple; keep the raw sample
            peaks.push_back({u[i], y[i]});
            continue;
        }
        const double shift = 0.5 * (y[i - 1] - y[i + 1]) / denom;
        peaks.push_back({u[i] + shift * (u[i + 1] - u[i]),
                         y[i] - 0.25 * (y[i - 1] - y[i + 1]) * shift});
    }
    return peaks;
}

} // namespace rabi
