#include "rabisim/pulse.hpp"

#include <cmath>
#include <string>

#include "rabisim/errors.hpp"

namespace rabi {

void validate(const PulseSpec& p) {
    if (!(p.duration > 0.0))
        throw validation_error("pulse: duration must be > 0");
    if (!std::isfinite(p.t0) || !std::isfinite(p.duration))
        throw validation_error("pulse: non-finite t0 or duration");
    if (p.shape == PulseSpec::Shape::Rectangular) {
        if (!(p.omega >= 0.0) || !std::isfinite(p.omega))
            throw validation_error("pulse: omega must be finite and >= 0");
        return;
    }
    if (p.samples.size() < 2)
        throw validation_error("pulse: sampled envelope needs at least 2 samples");
    const double eps = 1e-9 * p.duration;
    if (std::abs(p.samples.front().first - p.t0) > eps)
        throw validation_error("pulse: sampled envelope must start at t0");
    if (std::abs(p.samples.back().first - p.end()) > eps)
        throw validation_error("pulse: sampled envelope must cover [t0, t0+duration]");
    for (size_t i = 1; i < p.samples.size(); ++i)
        if (!(p.samples[i].first > p.samples[i - 1].first))
            throw validation_error("pulse: sample times must be strictly increasing");
}

void validate(const TlsParams& tls) {
    if (!std::isfinite(tls.delta) || !std::isfinite(tls.delta_shift))
        throw validation_error("tls: detuning and shift must be finite");
}

std::complex<double> envelope_at(const PulseSpec& p, double t) {
    if (t < p.t0 || t > p.end()) return {0.0, 0.0};
    if (p.shape == PulseSpec::Shape::Rectangular) return {p.omega / 2.0, 0.0};
    // linear interpolation between bracketing samples
    const auto& s = p.samples;
    size_t hi = 1;
    while (hi + 1 < s.size() && s[hi].first < t) ++hi;
    const auto& [ta, va] = s[hi - 1];
    const auto& [tb, vb] = s[hi];
    const double w = (t - ta) / (tb - ta);
    return va + w * (vb - va);
}

double pulse_area(const PulseSpec& p) {
    validate(p);
    if (p.shape == PulseSpec::Shape::Rectangular) return p.omega * p.duration;
    double area = 0.0;
    for (size_t i = 1; i < p.samples.size(); ++i) {
        const double dt = p.samples[i].first - p.samples[i - 1].first;
        area += dt * (std::abs(p.samples[i - 1].second) + std::abs(p.samples[i].second));
    }
    return area;  // trapezoid of 2|Omega(t)|: the halves cancel the factor 2
}

bool physically_valid(const BlochState& s, double tol) {
    if (!(s.rho_pp >= -tol && s.rho_pp <= 1.0 + tol)) return false;
    return std::norm(s.rho_pm) <= s.rho_pp * (1.0 - s.rho_pp) + tol;
}

} // namespace rabi
