#include "rabisim/reservoir.hpp"

#include <cmath>

#include "rabisim/errors.hpp"

namespace rabi {

namespace {
template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
} // namespace

void validate(const NonstationaryModel& m) {
    std::visit(overloaded{
                   [](const ExponentialMean& e) {
                       if (!(e.gamma > 0.0))
                           throw validation_error("nonstationary: gamma must be > 0");
                       if (!std::isfinite(e.a))
                           throw validation_error("nonstationary: non-finite prefactor");
                   },
                   [](const DiscreteModes& d) {
                       for (const auto& mode : d.modes)
                           if (mode.delta == 0.0)
                               throw validation_error(
                                   "nonstationary: mode detuning delta_j must be nonzero");
                   },
               },
               m);
}

std::string nonstationary_name(const NonstationaryModel& m) {
    return std::holds_alternative<ExponentialMean>(m) ? "exponential_mean" : "discrete_modes";
}

std::complex<double> mean_r(const NonstationaryModel& m, double t, double t0, double omega) {
    if (t < t0) throw validation_error("mean_r: t must be >= t0");
    return std::visit(
        overloaded{
            [&](const ExponentialMean& e) -> std::complex<double> {
                return {e.a * e.gamma * omega * std::exp(-e.gamma * (t - t0)), 0.0};
            },
            [&](const DiscreteModes& d) -> std::complex<double> {
                double sum = 0.0;
                for (const auto& mode : d.modes) {
                    if (mode.delta == 0.0)
                        throw validation_error("mean_r: mode detuning delta_j must be nonzero");
                    // g (omega_j/delta_j) e^{i delta_j (t0-t)} plus conjugate
                    sum += 2.0 * mode.g * (mode.omega / mode.delta) *
                           std::cos(mode.delta * (t - t0));
                }
                return {sum, 0.0};
            },
        },
        m);
}

double detuning_shift(const NonstationaryModel& m) {
    return std::visit(
        overloaded{
            [](const ExponentialMean&) -> double {
                throw validation_error(
                    "detuning_shift: not defined for the exponential mean-field model; supply "
                    "tls.delta_shift directly");
            },
            [](const DiscreteModes& d) -> double {
                double sum = 0.0;
                for (const auto& mode : d.modes) {
                    if (mode.delta == 0.0)
                        throw validation_error(
                            "detuning_shift: mode detuning delta_j must be nonzero");
                    sum += mode.g * mode.omega / mode.delta;
                }
                return -2.0 * sum;
            },
        },
        m);
}

void validate(const CorrelationKernel& k) {
    validate(k.stationary);
    if (k.nonstationary) validate(*k.nonstationary);
}

std::complex<double> correlation(const CorrelationKernel& k, double tau, double t, double t0,
                                 double omega) {
    if (!(t0 <= tau && tau <= t)) throw validation_error("correlation: need t0 <= tau <= t");
    std::complex<double> value = k_time(k.stationary, tau - t);
    if (k.nonstationary)
        value += mean_r(*k.nonstationary, tau, t0, omega) * mean_r(*k.nonstationary, t, t0, omega);
    return value;
}

} // namespace rabi
