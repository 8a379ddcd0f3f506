#include "rabisim/dephasing.hpp"

#include <algorithm>
#include <cmath>

#include "rabisim/errors.hpp"
#include "rabisim/interp.hpp"
#include "rabisim/quadrature.hpp"

namespace rabi {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = 3.141592653589793238462643383279;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double spectral_osc_rate(const SpectralModel& m) {
    return std::visit(overloaded{[](const ConstantSpectrum&) { return 0.0; },
                                 [](const TaylorSpectrum&) { return 0.0; },
                                 [](const GaussianSpectrum& s) { return std::abs(s.center); },
                                 [](const LorentzianSpectrum& s) { return std::abs(s.center); }},
                      m);
}

double nonstationary_osc_rate(const NonstationaryModel& m) {
    return std::visit(overloaded{[](const ExponentialMean&) { return 0.0; },
                                 [](const DiscreteModes& d) {
                                     double w = 0.0;
                                     for (const auto& mode : d.modes)
                                         w = std::max(w, std::abs(mode.delta));
                                     return w;
                                 }},
                      m);
}

double nonstationary_decay_time(const NonstationaryModel& m) {
    if (const auto* e = std::get_if<ExponentialMean>(&m)) return 1.0 / e->gamma;
    return 0.0;
}

// Presplit count so no panel spans more than about half an oscillation period
// or several correlation times.
int panel_hint(double span, double osc_rate, double decay_time) {
    double n = 1.0;
    if (osc_rate > 0.0) n = std::max(n, span * osc_rate / 3.0);
    if (decay_time > 0.0) n = std::max(n, span / (6.0 * decay_time));
    return static_cast<int>(std::min(n + 1.0, 512.0));
}

// Shared core of Eqs.-(5)/(6)-style integrals: the correlation kernel against
// a dressing weight D(tau - t). The delta of a constant stationary part sits
// at the upper endpoint and enters with half weight.
template <class D>
cplx kernel_integral(const CorrelationKernel& kernel, double t, double t0, double omega_drive,
                     double dress_osc, D&& dress, double tol) {
    const double span = t - t0;
    cplx total{0.0, 0.0};
    if (const auto* flat = std::get_if<ConstantSpectrum>(&kernel.stationary)) {
        total += kPi * flat->k0 * dress(0.0);
    } else {
        const double osc = dress_osc + spectral_osc_rate(kernel.stationary);
        const int n0 = panel_hint(span, osc, correlation_time(kernel.stationary));
        total += integrate_gk(
                     [&](double u) { return k_time(kernel.stationary, u) * dress(u); }, -span,
                     0.0, tol, n0)
                     .value;
    }
    if (kernel.nonstationary) {
        const auto& ns = *kernel.nonstationary;
        const cplx rt = mean_r(ns, t, t0, omega_drive);
        const double osc = dress_osc + nonstationary_osc_rate(ns);
        const int n0 = panel_hint(span, osc, nonstationary_decay_time(ns));
        const cplx inner =
            integrate_gk([&](double tau) { return mean_r(ns, tau, t0, omega_drive) *
                                                  dress(tau - t); },
                         t0, t, tol, n0)
                .value;
        total += rt * inner;
    }
    return total;
}

} // namespace

void validate(const DephasingPolicy& p) {
    std::visit(overloaded{
                   [](const MarkovPolicy& m) {
                       if (!(m.kappa >= 0.0))
                           throw validation_error("policy: markov kappa must be >= 0");
                   },
                   [](const StationaryTripletPolicy& s) { validate(s.spectrum); },
                   [](const StationaryExpansionPolicy& s) { validate(s.spectrum); },
                   [](const NonstationaryPolicy& n) {
                       if (!(n.kappa_s >= 0.0))
                           throw validation_error("policy: kappa_s must be >= 0");
                       validate(n.model);
                   },
                   [](const GeneralQuadraturePolicy& g) {
                       if (!(g.quad_tol > 0.0))
                           throw validation_error("policy: quad_tol must be > 0");
                       validate(g.kernel);
                   },
               },
               p);
}

std::string policy_name(const DephasingPolicy& p) {
    return std::visit(
        overloaded{
            [](const MarkovPolicy&) { return std::string("markov"); },
            [](const StationaryTripletPolicy&) { return std::string("stationary_triplet"); },
            [](const StationaryExpansionPolicy&) { return std::string("stationary_expansion"); },
            [](const NonstationaryPolicy& n) {
                return std::string(n.dpp == DppMode::Unit ? "nonstationary_unit"
                                                          : "nonstationary_full");
            },
            [](const GeneralQuadraturePolicy&) { return std::string("general_quadrature"); },
        },
        p);
}

double kappa_markov(const DephasingPolicy& p) {
    const auto* m = std::get_if<MarkovPolicy>(&p);
    if (!m) throw validation_error("kappa_markov: policy is not Markov");
    return m->kappa;
}

double kappa_triplet(const SpectralModel& m, double omega, double delta) {
    const DressingParams dp(omega, delta);
    return kPi / 2.0 * (dp.c * dp.c + 1.0) * k_omega(m, 0.0) +
           kPi / 4.0 * dp.s * dp.s * (k_omega(m, dp.omega_r) + k_omega(m, -dp.omega_r));
}

double kappa_expansion(const SpectralModel& m, double omega, bool* clamped) {
    const SpectralDerivs d = k_derivs(m);
    const double kappa = kPi * d.k0 + kPi * omega * omega / 4.0 * d.k2;
    if (clamped) *clamped = kappa < 0.0;
    return std::max(kappa, 0.0);
}

std::complex<double> rabi_generalized(const SpectralModel& m, double omega, double delta) {
    const SpectralDerivs d = k_derivs(m);
    return {0.5 * (omega - kPi * omega * d.k1 + kPi * omega * delta / 2.0 * d.k2), 0.0};
}

double kappa_nonstationary(const NonstationaryPolicy& p, double t, const DressingParams& dp,
                           const PulseSpec& pulse, double quad_tol) {
    validate(p.model);
    if (t < pulse.t0) throw validation_error("kappa_nonstationary: t must be >= t0");
    const double dt = t - pulse.t0;
    if (dt == 0.0) return p.kappa_s;
    if (p.dpp == DppMode::Unit) {
        if (const auto* e = std::get_if<ExponentialMean>(&p.model)) {
            const double x = std::exp(-e->gamma * dt);
            return p.kappa_s +
                   e->a * e->a * e->gamma * pulse.omega * pulse.omega * x * (1.0 - x);
        }
    }
    const double rt = mean_r(p.model, t, pulse.t0, pulse.omega).real();
    const double osc =
        (p.dpp == DppMode::Full ? dp.omega_r : 0.0) + nonstationary_osc_rate(p.model);
    const int n0 = panel_hint(dt, osc, nonstationary_decay_time(p.model));
    const cplx inner =
        integrate_gk(
            [&](double tau) {
                const double d = p.dpp == DppMode::Full ? d_plus_plus(dp, tau - t) : 1.0;
                return mean_r(p.model, tau, pulse.t0, pulse.omega) * d;
            },
            pulse.t0, t, quad_tol, n0)
            .value;
    return p.kappa_s + rt * inner.real();
}

std::complex<double> kappa_quadrature(const CorrelationKernel& kernel, double t, double t0,
                                      const DressingParams& dp, double quad_tol) {
    validate(kernel);
    if (t < t0) throw validation_error("kappa_quadrature: t must be >= t0");
    if (t == t0) return {0.0, 0.0};
    return kernel_integral(kernel, t, t0, dp.omega, dp.omega_r,
                           [&](double u) { return d_plus_plus(dp, u); }, quad_tol);
}

std::complex<double> omega_bar_quadrature(const CorrelationKernel& kernel, double t, double t0,
                                          const DressingParams& dp, const PulseSpec& pulse,
                                          double quad_tol) {
    validate(kernel);
    if (t < t0) throw validation_error("omega_bar_quadrature: t must be >= t0");
    const cplx env = envelope_at(pulse, t);
    if (t == t0) return env;
    return env - kernel_integral(kernel, t, t0, dp.omega, dp.omega_r,
                                 [&](double u) { return d_plus_minus(dp, u); }, quad_tol);
}

// --- RateProvider -------------------------------------------------------

RateProvider::RateProvider(const DephasingPolicy& policy, const PulseSpec& pulse,
                           const TlsParams& tls, double t_end, double grid_dt)
    : policy_(policy), pulse_(pulse), delta_(tls.effective_delta()), t_end_(t_end) {
    validate(pulse_);
    validate(tls);
    validate(policy_);
    if (!(t_end_ >= pulse_.t0)) throw validation_error("rates: t_end must be >= pulse t0");
    dressing_ = DressingParams(pulse_.omega, delta_);
    const bool sampled = pulse_.shape == PulseSpec::Shape::Sampled;

    if (sampled && !std::holds_alternative<MarkovPolicy>(policy_) &&
        !std::holds_alternative<GeneralQuadraturePolicy>(policy_))
        throw validation_error("rates: sampled pulses support only the markov and "
                               "general_quadrature policies");

    bool precompute = false;
    std::visit(overloaded{
                   [&](const MarkovPolicy& m) { kappa_in_ = kappa_out_ = m.kappa; },
                   [&](const StationaryTripletPolicy& s) {
                       kappa_in_ = kappa_triplet(s.spectrum, pulse_.omega, delta_);
                       kappa_out_ = kappa_triplet(s.spectrum, 0.0, delta_);
                   },
                   [&](const StationaryExpansionPolicy& s) {
                       kappa_in_ = kappa_expansion(s.spectrum, pulse_.omega, &clamped_);
                       kappa_out_ = kappa_expansion(s.spectrum, 0.0, nullptr);
                       obar_in_ = rabi_generalized(s.spectrum, pulse_.omega, delta_);
                   },
                   [&](const NonstationaryPolicy& n) {
                       // closed form for the exponential/unit pair, quadrature otherwise
                       precompute = !(n.dpp == DppMode::Unit &&
                                      std::holds_alternative<ExponentialMean>(n.model));
                   },
                   [&](const GeneralQuadraturePolicy& g) {
                       quad_tol_ = g.quad_tol;
                       precompute = true;
                       if (sampled) {
                           const double span = std::max(t_end_ - pulse_.t0, pulse_.duration);
                           double omega_max = 0.0;
                           for (const auto& [ts, v] : pulse_.samples)
                               omega_max = std::max(omega_max, 2.0 * std::abs(v));
                           const double omega_r =
                               std::hypot(omega_max, delta_);
                           dress_dt_ = std::min(span / 512.0,
                                                0.1 / std::max(omega_r, 1e-3));
                           const std::size_t n =
                               static_cast<std::size_t>(std::ceil(span / dress_dt_)) + 2;
                           std::vector<double> times(n);
                           for (std::size_t i = 0; i < n; ++i)
                               times[i] = static_cast<double>(i) * dress_dt_;
                           dress_table_ = std::make_shared<
                               const std::vector<std::pair<double, cplx>>>(
                               dress_numeric_table(pulse_, TlsParams{delta_, 0.0}, times));
                       }
                   },
               },
               policy_);

    if (precompute && grid_dt > 0.0 && t_end_ > pulse_.t0) {
        grid_t0_ = pulse_.t0;
        const double span = t_end_ - pulse_.t0;
        std::size_t n = static_cast<std::size_t>(std::ceil(span / grid_dt)) + 1;
        n = std::min<std::size_t>(std::max<std::size_t>(n, 5), 2'000'000);
        grid_dt_ = span / static_cast<double>(n - 1);
        grid_kappa_.resize(n + 1);  // one pad point past t_end for the cubic
        const bool want_obar = std::holds_alternative<GeneralQuadraturePolicy>(policy_);
        if (want_obar) grid_obar_corr_.resize(n + 1);
        for (std::size_t i = 0; i < n + 1; ++i) {
            const double t = grid_t0_ + static_cast<double>(i) * grid_dt_;
            grid_kappa_[i] = kappa_direct(t);
            if (want_obar) grid_obar_corr_[i] = obar_correction_direct(t);
        }
    }
}

std::complex<double> RateProvider::kappa_direct(double t) const {
    if (const auto* n = std::get_if<NonstationaryPolicy>(&policy_))
        return kappa_nonstationary(*n, t, dressing_, pulse_, quad_tol_);
    const auto& g = std::get<GeneralQuadraturePolicy>(policy_);
    if (!dress_table_) return kappa_quadrature(g.kernel, t, pulse_.t0, dressing_, g.quad_tol);
    const auto& table = *dress_table_;
    auto dress = [&](double u) {
        const double s = std::abs(u);
        const std::size_t i = std::min<std::size_t>(
            static_cast<std::size_t>(s / dress_dt_), table.size() - 2);
        const double w = s / dress_dt_ - static_cast<double>(i);
        return table[i].first + w * (table[i + 1].first - table[i].first);
    };
    return kernel_integral(g.kernel, t, pulse_.t0, pulse_.omega, 0.0, dress, g.quad_tol);
}

std::complex<double> RateProvider::obar_correction_direct(double t) const {
    const auto& g = std::get<GeneralQuadraturePolicy>(policy_);
    if (!dress_table_)
        return envelope_at(pulse_, t) -
               omega_bar_quadrature(g.kernel, t, pulse_.t0, dressing_, pulse_, g.quad_tol);
    const auto& table = *dress_table_;
    auto dress = [&](double u) {
        const double s = std::abs(u);
        const std::size_t i = std::min<std::size_t>(
            static_cast<std::size_t>(s / dress_dt_), table.size() - 2);
        const double w = s / dress_dt_ - static_cast<double>(i);
        return table[i].second + w * (table[i + 1].second - table[i].second);
    };
    if (t == pulse_.t0) return {0.0, 0.0};
    return kernel_integral(g.kernel, t, pulse_.t0, pulse_.omega, 0.0, dress, g.quad_tol);
}

std::complex<double> RateProvider::kappa(double t) const {
    return std::visit(
        overloaded{
            [&](const MarkovPolicy&) { return kappa_in_; },
            [&](const StationaryTripletPolicy&) {
                return (t >= pulse_.t0 && t <= pulse_.end()) ? kappa_in_ : kappa_out_;
            },
            [&](const StationaryExpansionPolicy&) {
                return (t >= pulse_.t0 && t <= pulse_.end()) ? kappa_in_ : kappa_out_;
            },
            [&](const NonstationaryPolicy& n) -> cplx {
                if (n.dpp == DppMode::Unit && std::holds_alternative<ExponentialMean>(n.model))
                    return kappa_nonstationary(n, t, dressing_, pulse_, quad_tol_);
                if (!grid_kappa_.empty())
                    return catmull_rom(grid_kappa_, grid_t0_, grid_dt_, t);
                return kappa_direct(t);
            },
            [&](const GeneralQuadraturePolicy&) -> cplx {
                if (!grid_kappa_.empty())
                    return catmull_rom(grid_kappa_, grid_t0_, grid_dt_, t);
                return kappa_direct(t);
            },
        },
        policy_);
}

std::complex<double> RateProvider::omega_bar(double t) const {
    return std::visit(
        overloaded{
            [&](const MarkovPolicy&) -> cplx { return envelope_at(pulse_, t); },
            [&](const StationaryTripletPolicy&) -> cplx { return envelope_at(pulse_, t); },
            [&](const StationaryExpansionPolicy&) -> cplx {
                return (t >= pulse_.t0 && t <= pulse_.end()) ? obar_in_ : cplx{0.0, 0.0};
            },
            [&](const NonstationaryPolicy&) -> cplx { return envelope_at(pulse_, t); },
            [&](const GeneralQuadraturePolicy&) -> cplx {
                if (!grid_obar_corr_.empty())
                    return envelope_at(pulse_, t) -
                           catmull_rom(grid_obar_corr_, grid_t0_, grid_dt_, t);
                return envelope_at(pulse_, t) - obar_correction_direct(t);
            },
        },
        policy_);
}

double RateProvider::mean_field(double t) const {
    if (const auto* n = std::get_if<NonstationaryPolicy>(&policy_))
        return mean_r(n->model, std::max(t, pulse_.t0), pulse_.t0, pulse_.omega).real();
    if (const auto* g = std::get_if<GeneralQuadraturePolicy>(&policy_))
        if (g->kernel.nonstationary)
            return mean_r(*g->kernel.nonstationary, std::max(t, pulse_.t0), pulse_.t0,
                          pulse_.omega)
                .real();
    return 0.0;
}

RateTrace rate_trace(const DephasingPolicy& policy, const PulseSpec& pulse, const TlsParams& tls,
                     std::span<const double> grid, int jobs) {
    if (grid.empty()) throw validation_error("rate_trace: empty grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < pulse.t0)
            throw validation_error("rate_trace: grid points must be >= pulse t0");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw validation_error("rate_trace: grid must be strictly increasing");
    }
    const RateProvider prov(policy, pulse, tls, grid.back(), 0.0);
    RateTrace tr;
    tr.times.assign(grid.begin(), grid.end());
    tr.kappa.resize(grid.size());
    tr.omega_bar.resize(grid.size());
    const auto eval = [&](std::size_t i) {
        tr.kappa[i] = prov.kappa(grid[i]);
        tr.omega_bar[i] = prov.omega_bar(grid[i]);
    };
    const int nthreads = resolve_jobs(jobs);
    if (nthreads == 1) {
        for (std::size_t i = 0; i < grid.size(); ++i) eval(i);
    } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
        for (long long i = 0; i < static_cast<long long>(grid.size()); ++i)
            eval(static_cast<std::size_t>(i));
    }
    return tr;
}

} // namespace rabi
