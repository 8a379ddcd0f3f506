#include "rabisim/bloch.hpp"

#include <cmath>

#include "rabisim/errors.hpp"

namespace rabi {

namespace {

using cplx = std::complex<double>;
using State = std::array<double, 3>;  // rho_pp, Re rho_pm, Im rho_pm

struct Rhs {
    const SimConfig& cfg;
    const RateProvider& rates;
    double delta;

    void operator()(double t, const State& y, State& dy) const {
        const cplx xi{y[1], y[2]};
        const cplx env = envelope_at(cfg.pulse, t);
        const cplx obar = rates.omega_bar(t);
        const cplx kap = rates.kappa(t);
        const cplx pop_drive = cfg.renormalize_population_drive ? obar : env;

        // d rho_pp = i [Omega rho_-+ - Omega* rho_+-] = -2 Im(Omega conj(rho_+-))
        dy[0] = -2.0 * std::imag(pop_drive * std::conj(xi));

        // d rho_+- = { i [Delta + <R>] - kappa } rho_+- + i conj(obar) (1 - 2 rho_pp)
        // Im kappa folds into the detuning.
        const double delta_tot = delta + rates.mean_field(t) - kap.imag();
        const cplx dxi = (cplx{0.0, delta_tot} - kap.real()) * xi +
                         cplx{0.0, 1.0} * std::conj(obar) * (1.0 - 2.0 * y[0]);
        dy[1] = dxi.real();
        dy[2] = dxi.imag();
    }
};

State pack(const BlochState& s) { return {s.rho_pp, s.rho_pm.real(), s.rho_pm.imag()}; }
BlochState unpack(const State& y) { return {y[0], {y[1], y[2]}}; }

} // namespace

void validate(const SimConfig& cfg) {
    validate(cfg.pulse);
    validate(cfg.tls);
    validate(cfg.policy);
    if (cfg.t_end && !(*cfg.t_end >= cfg.pulse.t0))
        throw validation_error("sim: t_end must be >= pulse t0");
    if (!(cfg.step.rel_tol > 0.0) || !(cfg.step.abs_tol > 0.0))
        throw validation_error("sim: tolerances must be > 0");
    if (cfg.step.max_step < 0.0) throw validation_error("sim: max_step must be >= 0");
    if (!(cfg.initial.rho_pp >= -1e-12 && cfg.initial.rho_pp <= 1.0 + 1e-12))
        throw validation_error("sim: initial population outside [0, 1]");
}

double sim_end(const SimConfig& cfg) { return cfg.t_end ? *cfg.t_end : cfg.pulse.end(); }

double default_max_step(const SimConfig& cfg) {
    double omega = cfg.pulse.omega;
    if (cfg.pulse.shape == PulseSpec::Shape::Sampled)
        for (const auto& [t, v] : cfg.pulse.samples) omega = std::max(omega, 2.0 * std::abs(v));
    const double omega_r = std::hypot(omega, cfg.tls.effective_delta());
    const double cap = cfg.pulse.duration / 50.0;
    return omega_r > 0.0 ? std::min(0.05 / omega_r, cap) : cap;
}

BlochTangent derivative(const BlochState& s, double t, const SimConfig& cfg,
                        const RateProvider& rates) {
    const Rhs rhs{cfg, rates, cfg.tls.effective_delta()};
    State dy;
    rhs(t, pack(s), dy);
    return {dy[0], {dy[1], dy[2]}};
}

BlochTangent derivative(const BlochState& s, double t, const SimConfig& cfg) {
    validate(cfg);
    const RateProvider rates(cfg.policy, cfg.pulse, cfg.tls, std::max(sim_end(cfg), t));
    return derivative(s, t, cfg, rates);
}

Trajectory integrate(const SimConfig& cfg, int n_samples) {
    validate(cfg);
    const double t0 = cfg.pulse.t0;
    const double t1 = sim_end(cfg);

    StepControl sc = cfg.step;
    if (sc.max_step == 0.0) sc.max_step = default_max_step(cfg);

    const RateProvider rates(cfg.policy, cfg.pulse, cfg.tls, t1, sc.max_step / 4.0);
    const Rhs rhs{cfg, rates, cfg.tls.effective_delta()};

    std::vector<double> sample_times;
    if (n_samples >= 2 && t1 > t0) {
        sample_times.resize(static_cast<std::size_t>(n_samples));
        for (int i = 0; i < n_samples; ++i)
            sample_times[static_cast<std::size_t>(i)] =
                t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n_samples - 1);
    } else {
        sample_times = {t0};
        if (t1 > t0) sample_times.push_back(t1);
    }

    Trajectory tr;
    tr.times.reserve(sample_times.size());
    tr.states.reserve(sample_times.size());

    std::size_t next = 0;
    const State y0 = pack(cfg.initial);
    tr.times.push_back(t0);
    tr.states.push_back(cfg.initial);
    ++next;

    auto observer = [&](double ta, double tb, const State& ya, const State& yb, const State& fa,
                        const State& fb) {
        while (next < sample_times.size() && sample_times[next] <= tb) {
            const double ts = sample_times[next];
            const State ys =
                ts >= tb ? yb : ode::hermite<3>(ta, tb, ya, yb, fa, fb, ts);
            tr.times.push_back(ts);
            tr.states.push_back(unpack(ys));
            ++next;
        }
    };

    const State yfin = ode::integrate_dopri5<3>(rhs, y0, t0, t1, sc, observer);
    if (next < sample_times.size()) {  // guard against roundoff at the last sample
        tr.times.push_back(t1);
        tr.states.push_back(unpack(yfin));
    }

    tr.kappa_used.reserve(tr.times.size());
    for (double t : tr.times) tr.kappa_used.push_back(rates.kappa(t));
    return tr;
}

double final_population(const SimConfig& cfg) {
    validate(cfg);
    const double t0 = cfg.pulse.t0;
    const double t1 = sim_end(cfg);
    StepControl sc = cfg.step;
    if (sc.max_step == 0.0) sc.max_step = default_max_step(cfg);
    const RateProvider rates(cfg.policy, cfg.pulse, cfg.tls, t1, sc.max_step / 4.0);
    const Rhs rhs{cfg, rates, cfg.tls.effective_delta()};
    const State y = ode::integrate_dopri5<3>(rhs, pack(cfg.initial), t0, t1, sc,
                                             [](double, double, const State&, const State&,
                                                const State&, const State&) {});
    return y[0];
}

double final_population_rk4(const SimConfig& cfg, double dt) {
    validate(cfg);
    const double t1 = sim_end(cfg);
    const RateProvider rates(cfg.policy, cfg.pulse, cfg.tls, t1, dt);
    const Rhs rhs{cfg, rates, cfg.tls.effective_delta()};
    const State y = ode::integrate_rk4<3>(rhs, pack(cfg.initial), cfg.pulse.t0, t1, dt,
                                          [](double, const State&) {});
    return y[0];
}

double bloch_length(const BlochState& s) {
    const double x = 2.0 * s.rho_pm.real();
    const double y = -2.0 * s.rho_pm.imag();
    const double z = 2.0 * s.rho_pp - 1.0;
    return std::sqrt(x * x + y * y + z * z);
}

} // namespace rabi
