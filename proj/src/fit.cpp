#include "rabisim/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>

#include "rabisim/errors.hpp"
#include "rabisim/interp.hpp"

namespace rabi {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kPenalty = 1e6;

struct Packing {
    std::vector<std::string> names;
    std::size_t n_phys = 0;  // physical parameters before the per-dataset scales
};

Packing packing_of(const FitProblem& p) {
    Packing pk;
    switch (p.family) {
        case FitFamily::Markov:
            pk.names = {"kappa"};
            break;
        case FitFamily::StationaryExpansion:
            pk.names = p.options.freeze_k1 ? std::vector<std::string>{"k0", "k2"}
                                           : std::vector<std::string>{"k0", "k1", "k2"};
            break;
        case FitFamily::Nonstationary:
            pk.names = {"kappa_s", "a", "gamma"};
            break;
    }
    pk.n_phys = pk.names.size();
    for (std::size_t d = 0; d < p.datasets.size(); ++d) {
        if (p.datasets.size() == 1) {
            pk.names.push_back("scale");
        } else {
            const std::string& label = p.datasets[d].label;
            pk.names.push_back("scale_" + (label.empty() ? std::to_string(d) : label));
        }
    }
    return pk;
}

DephasingPolicy policy_from_params(const FitProblem& p, std::span<const double> q) {
    switch (p.family) {
        case FitFamily::Markov:
            return MarkovPolicy{q[0]};
        case FitFamily::StationaryExpansion: {
            TaylorSpectrum sp;
            sp.k0 = q[0];
            sp.k1 = p.options.freeze_k1 ? 0.0 : q[1];
            sp.k2 = p.options.freeze_k1 ? q[1] : q[2];
            return StationaryExpansionPolicy{SpectralModel{sp}};
        }
        case FitFamily::Nonstationary: {
            NonstationaryPolicy ns;
            ns.kappa_s = q[0];
            ns.model = ExponentialMean{q[1], q[2]};
            if (const auto* base_ns = std::get_if<NonstationaryPolicy>(&p.base.policy))
                ns.dpp = base_ns->dpp;
            return ns;
        }
    }
    throw validation_error("fit: unknown family");
}

void validate_problem(const FitProblem& p) {
    if (p.datasets.empty()) throw validation_error("fit: no datasets");
    for (const auto& d : p.datasets) {
        if (d.points.size() < 4)
            throw validation_error("fit: dataset '" + d.label + "' has fewer than 4 points");
        if (!(d.pulse_width > 0.0)) throw validation_error("fit: pulse_width must be > 0");
        for (const auto& pt : d.points)
            if (!(pt.amplitude >= 0.0))
                throw validation_error("fit: amplitudes must be >= 0");
    }
    if (p.options.starts < 1) throw validation_error("fit: starts must be >= 1");
}

} // namespace

std::vector<std::string> parameter_names(const FitProblem& p) { return packing_of(p).names; }

std::vector<double> default_init(const FitProblem& p) {
    const Packing pk = packing_of(p);
    std::vector<double> q;
    switch (p.family) {
        case FitFamily::Markov:
            q = {0.1};
            break;
        case FitFamily::StationaryExpansion:
            q = p.options.freeze_k1 ? std::vector<double>{0.05, 0.001}
                                    : std::vector<double>{0.05, 0.0, 0.001};
            break;
        case FitFamily::Nonstationary:
            q = {0.05, 0.1, 1.0};
            break;
    }
    for (const auto& d : p.datasets) {
        double smax = 0.0;
        for (const auto& pt : d.points) smax = std::max(smax, std::abs(pt.signal));
        q.push_back(smax > 0.0 ? smax : 1.0);
    }
    if (q.size() != pk.names.size()) throw numerical_error("fit: packing mismatch");
    return q;
}

void default_bounds(const FitProblem& p, std::vector<double>& lo, std::vector<double>& hi) {
    const Packing pk = packing_of(p);
    lo.clear();
    hi.clear();
    switch (p.family) {
        case FitFamily::Markov:
            lo = {0.0};
            hi = {1e3};
            break;
        case FitFamily::StationaryExpansion:
            if (p.options.freeze_k1) {
                lo = {0.0, -1e2};
                hi = {1e2, 1e2};
            } else {
                lo = {0.0, -1e2, -1e2};
                hi = {1e2, 1e2, 1e2};
            }
            break;
        case FitFamily::Nonstationary:
            lo = {0.0, 0.0, 1e-3};
            hi = {1e3, 1e3, 1e3};
            break;
    }
    for (std::size_t d = 0; d < p.datasets.size(); ++d) {
        lo.push_back(1e-6);  // scale floor
        hi.push_back(1e9);
    }
    if (lo.size() != pk.names.size()) throw numerical_error("fit: bounds mismatch");
}

std::vector<double> residuals(const FitProblem& p, std::span<const double> params,
                              int* penalized) {
    validate_problem(p);
    const Packing pk = packing_of(p);
    if (params.size() != pk.names.size())
        throw validation_error("fit: parameter vector has wrong length");

    std::size_t total = 0;
    for (const auto& d : p.datasets) total += d.points.size();
    std::vector<double> r(total, 0.0);
    std::vector<int> bad(total, 0);

    struct Item {
        std::size_t dataset;
        std::size_t point;
    };
    std::vector<Item> items;
    items.reserve(total);
    for (std::size_t d = 0; d < p.datasets.size(); ++d)
        for (std::size_t i = 0; i < p.datasets[d].points.size(); ++i) items.push_back({d, i});

    const DephasingPolicy policy = policy_from_params(p, params);
    const auto eval = [&](std::size_t idx) {
        const auto [d, i] = items[idx];
        const DataSet& ds = p.datasets[d];
        const DataPoint& pt = ds.points[i];
        const double scale = params[pk.n_phys + d];
        SimConfig cfg = p.base;
        cfg.policy = policy;
        cfg.pulse.shape = PulseSpec::Shape::Rectangular;
        cfg.pulse.duration = ds.pulse_width;
        cfg.pulse.omega = pt.amplitude * kPi / ds.pulse_width;
        cfg.t_end.reset();
        double model;
        try {
            model = scale * final_population(cfg);
        } catch (const std::exception&) {
            r[idx] = pt.weight * kPenalty * (1.0 + std::abs(pt.signal));
            bad[idx] = 1;
            return;
        }
        r[idx] = pt.weight * (model - pt.signal);
    };

    const int nthreads = resolve_jobs(p.options.jobs);
    if (nthreads == 1) {
        for (std::size_t i = 0; i < items.size(); ++i) eval(i);
    } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
        for (long long i = 0; i < static_cast<long long>(items.size()); ++i)
            eval(static_cast<std::size_t>(i));
    }
    if (penalized) {
        *penalized = 0;
        for (int b : bad) *penalized += b;
    }
    return r;
}

namespace {

double rss_of(const std::vector<double>& r) {
    double s = 0.0;
    for (double v : r) s += v * v;
    return s;
}

struct LmOutcome {
    std::vector<double> params;
    double rss = 0.0;
    bool converged = false;
    int iters = 0;
    int penalized = 0;
};

Eigen::MatrixXd jacobian_fd(const FitProblem& p, const std::vector<double>& q,
                            const std::vector<double>& lo, const std::vector<double>& hi,
                            const std::vector<double>& r0) {
    const std::size_t n = r0.size(), np = q.size();
    Eigen::MatrixXd J(n, np);
    for (std::size_t j = 0; j < np; ++j) {
        double h = std::max(1e-6 * std::abs(q[j]), 1e-9);
        std::vector<double> qh = q;
        if (qh[j] + h > hi[j] && qh[j] - h >= lo[j]) h = -h;  // stay inside the box
        qh[j] += h;
        const std::vector<double> rh = residuals(p, qh);
        for (std::size_t i = 0; i < n; ++i) J(i, j) = (rh[i] - r0[i]) / h;
    }
    return J;
}

LmOutcome levenberg_marquardt(const FitProblem& p, std::vector<double> q,
                              const std::vector<double>& lo, const std::vector<double>& hi) {
    const FitOptions& opt = p.options;
    for (std::size_t j = 0; j < q.size(); ++j) q[j] = std::clamp(q[j], lo[j], hi[j]);

    LmOutcome out;
    int penalized = 0;
    std::vector<double> r = residuals(p, q, &penalized);
    double rss = rss_of(r);
    double lambda = 1e-3;

    for (int iter = 1; iter <= opt.max_iters; ++iter) {
        out.iters = iter;
        const Eigen::MatrixXd J = jacobian_fd(p, q, lo, hi, r);
        const Eigen::VectorXd rv = Eigen::Map<const Eigen::VectorXd>(r.data(), r.size());
        const Eigen::VectorXd g = J.transpose() * rv;
        if (g.lpNorm<Eigen::Infinity>() < opt.grad_tol) {
            out.converged = true;
            break;
        }
        const Eigen::MatrixXd A = J.transpose() * J;

        bool accepted = false;
        for (int attempt = 0; attempt < 24; ++attempt) {
            Eigen::MatrixXd Ad = A;
            for (Eigen::Index k = 0; k < Ad.rows(); ++k)
                Ad(k, k) += lambda * std::max(A(k, k), 1e-12);
            const Eigen::VectorXd step = Ad.ldlt().solve(-g);
            std::vector<double> qn = q;
            for (std::size_t j = 0; j < q.size(); ++j)
                qn[j] = std::clamp(q[j] + step[static_cast<Eigen::Index>(j)], lo[j], hi[j]);
            int pen_n = 0;
            std::vector<double> rn = residuals(p, qn, &pen_n);
            const double rss_n = rss_of(rn);
            if (rss_n <= rss) {
                const double drop = rss - rss_n;
                q = std::move(qn);
                r = std::move(rn);
                penalized = pen_n;
                lambda = std::max(lambda * 0.25, 1e-14);
                accepted = true;
                if (drop <= opt.rss_tol * std::max(rss, 1e-300)) out.converged = true;
                rss = rss_n;
                break;
            }
            lambda *= 4.0;
        }
        if (!accepted || out.converged) break;
    }
    out.params = std::move(q);
    out.rss = rss;
    out.penalized = penalized;
    return out;
}

std::vector<double> jitter_start(const std::vector<double>& init, const std::vector<double>& lo,
                                 const std::vector<double>& hi, unsigned seed, int start) {
    std::mt19937 rng(seed ^ (0x9e3779b9u * static_cast<unsigned>(start)));
    const auto uniform = [&]() {
        const std::uint64_t a = rng(), b = rng();
        return static_cast<double>((a << 32) | b) * 0x1p-64;  // [0, 1)
    };
    std::vector<double> q = init;
    for (std::size_t j = 0; j < q.size(); ++j) {
        const double u = 2.0 * uniform() - 1.0;
        if (lo[j] >= 0.0) {
            const double base = q[j] > 0.0 ? q[j] : 1e-2;
            q[j] = base * std::exp(0.7 * u);
        } else {
            q[j] += u * std::max(std::abs(q[j]), 2e-3);
        }
        q[j] = std::clamp(q[j], lo[j], hi[j]);
    }
    return q;
}

} // namespace

FitResult fit_best_effort(const FitProblem& p, std::span<const double> init,
                          std::span<const double> lo_in, std::span<const double> hi_in) {
    validate_problem(p);
    const Packing pk = packing_of(p);

    std::vector<double> q0 = init.empty() ? default_init(p)
                                          : std::vector<double>(init.begin(), init.end());
    std::vector<double> lo, hi;
    default_bounds(p, lo, hi);
    if (!lo_in.empty()) lo.assign(lo_in.begin(), lo_in.end());
    if (!hi_in.empty()) hi.assign(hi_in.begin(), hi_in.end());
    if (q0.size() != pk.names.size() || lo.size() != pk.names.size() ||
        hi.size() != pk.names.size())
        throw validation_error("fit: init/bounds length mismatch");
    for (std::size_t j = 0; j < q0.size(); ++j)
        if (q0[j] < lo[j] || q0[j] > hi[j])
            throw validation_error("fit: init outside bounds for parameter " + pk.names[j]);

    const int starts = p.options.starts;
    std::vector<LmOutcome> outcomes(static_cast<std::size_t>(starts));
    const auto run_start = [&](int s) {
        const std::vector<double> qs =
            s == 0 ? q0 : jitter_start(q0, lo, hi, p.options.seed, s);
        outcomes[static_cast<std::size_t>(s)] = levenberg_marquardt(p, qs, lo, hi);
    };
    const int nthreads = resolve_jobs(p.options.jobs);
    if (nthreads == 1 || starts == 1) {
        for (int s = 0; s < starts; ++s) run_start(s);
    } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
#endif
        for (int s = 0; s < starts; ++s) run_start(s);
    }

    int best = 0;
    for (int s = 1; s < starts; ++s) {
        const auto& a = outcomes[static_cast<std::size_t>(s)];
        const auto& b = outcomes[static_cast<std::size_t>(best)];
        if ((a.converged && !b.converged) ||
            (a.converged == b.converged && a.rss < b.rss))
            best = s;
    }
    const LmOutcome& win = outcomes[static_cast<std::size_t>(best)];

    FitResult res;
    res.names = pk.names;
    res.params = win.params;
    res.rss = win.rss;
    res.converged = win.converged;
    res.iters = win.iters;
    res.best_start = best;
    res.penalized_points = win.penalized;

    // 1-sigma estimates from the Jacobian at the optimum
    const std::vector<double> r = residuals(p, res.params);
    const Eigen::MatrixXd J = jacobian_fd(p, res.params, lo, hi, r);
    const std::size_t n = r.size(), np = res.params.size();
    res.sigma.assign(np, 0.0);
    if (n > np) {
        const double s2 = res.rss / static_cast<double>(n - np);
        const Eigen::MatrixXd cov =
            (J.transpose() * J).ldlt().solve(Eigen::MatrixXd::Identity(np, np)) * s2;
        for (std::size_t j = 0; j < np; ++j)
            res.sigma[j] = std::sqrt(std::max(cov(static_cast<Eigen::Index>(j),
                                                  static_cast<Eigen::Index>(j)),
                                              0.0));
    }
    return res;
}

FitResult fit(const FitProblem& p, std::span<const double> init, std::span<const double> lo,
              std::span<const double> hi) {
    FitResult res = fit_best_effort(p, init, lo, hi);
    if (!res.converged)
        throw numerical_error("fit: no start converged (best RSS " + std::to_string(res.rss) +
                              " after " + std::to_string(res.iters) + " iterations)");
    return res;
}

DataSet read_dataset_csv(const std::string& path, double pulse_width, std::string label) {
    std::ifstream in(path);
    if (!in) throw validation_error("fit: cannot open dataset file " + path);
    DataSet ds;
    ds.pulse_width = pulse_width;
    ds.label = std::move(label);

    std::string line;
    bool have_header = false;
    bool has_weight = false;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') continue;
        std::string trimmed = line.substr(first);
        if (!trimmed.empty() && trimmed.back() == '\r') trimmed.pop_back();
        if (!have_header) {
            if (trimmed == "amplitude_pi_units,signal")
                has_weight = false;
            else if (trimmed == "amplitude_pi_units,signal,weight")
                has_weight = true;
            else
                throw validation_error(
                    "fit: dataset header must be 'amplitude_pi_units,signal[,weight]' in " +
                    path);
            have_header = true;
            continue;
        }
        std::istringstream ss(trimmed);
        std::string field;
        DataPoint pt;
        if (!std::getline(ss, field, ',')) continue;
        pt.amplitude = std::stod(field);
        if (!std::getline(ss, field, ','))
            throw validation_error("fit: missing signal column in " + path);
        pt.signal = std::stod(field);
        if (has_weight) {
            if (!std::getline(ss, field, ','))
                throw validation_error("fit: missing weight column in " + path);
            pt.weight = std::stod(field);
        }
        ds.points.push_back(pt);
    }
    if (!have_header) throw validation_error("fit: dataset file has no header: " + path);
    if (ds.points.empty()) throw validation_error("fit: dataset file has no points: " + path);
    return ds;
}

} // namespace rabi
