#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "rabisim/config.hpp"
#include "rabisim/csv.hpp"
#include "rabisim/dephasing.hpp"
#include "rabisim/errors.hpp"
#include "rabisim/fit.hpp"
#include "rabisim/sweep.hpp"

namespace {

using namespace rabi;

constexpr double kPi = 3.141592653589793238462643383279;

struct CommonArgs {
    std::string config;
    std::string out;
    int jobs = 0;  // 0: all hardware threads
    bool quiet = false;
};

void note(const CommonArgs& args, const std::string& msg) {
    if (!args.quiet) std::cerr << msg << "\n";
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = a + (b - a) * i / static_cast<double>(n - 1);
    return v;
}

std::vector<double> urange(double start, double stop, double step) {
    std::vector<double> v;
    for (double u = start; u <= stop + 1e-9; u += step) v.push_back(u);
    return v;
}

std::string trim_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

void write_gnuplot(const std::string& path, const std::string& csv_path, std::size_t ncols) {
    std::ofstream f(path);
    if (!f) throw validation_error("cannot open gnuplot output file " + path);
    f << "set datafile separator ','\n";
    f << "set key autotitle columnhead\n";
    f << "plot";
    for (std::size_t c = 2; c <= ncols; ++c)
        f << (c == 2 ? " " : ", ") << "'" << csv_path << "' using 1:" << c << " with lines";
    f << "\n";
}

// --- subcommands --------------------------------------------------------

int cmd_dress(const CommonArgs& args) {
    const Config c = load_config(args.config);
    const int n = c.integrator.samples;
    const auto times = linspace(0.0, c.pulse.duration, n);

    CsvTable t;
    t.header = {"t_ps", "dpp", "dpm_re", "dpm_im"};
    t.columns.assign(4, std::vector<double>());
    if (c.pulse.shape == PulseSpec::Shape::Rectangular) {
        const DressingParams dp(c.pulse.omega, c.tls.effective_delta());
        for (double s : times) {
            t.columns[0].push_back(s);
            t.columns[1].push_back(d_plus_plus(dp, s));
            const auto v = d_plus_minus(dp, s);
            t.columns[2].push_back(v.real());
            t.columns[3].push_back(v.imag());
        }
    } else {
        const auto table = dress_numeric_table(c.pulse, c.tls, times);
        for (int i = 0; i < n; ++i) {
            t.columns[0].push_back(times[static_cast<std::size_t>(i)]);
            t.columns[1].push_back(table[static_cast<std::size_t>(i)].first);
            t.columns[2].push_back(table[static_cast<std::size_t>(i)].second.real());
            t.columns[3].push_back(table[static_cast<std::size_t>(i)].second.imag());
        }
    }
    write_csv(args.out, t);
    note(args, "dress: wrote " + args.out);
    return 0;
}

int cmd_rate(const CommonArgs& args) {
    const Config c = load_config(args.config);
    if (!c.policy) throw validation_error("config: rate needs a policy section");
    const double t_end = c.integrator.t_end ? *c.integrator.t_end : c.pulse.end();
    const auto grid = linspace(c.pulse.t0, t_end, c.integrator.samples);
    const auto tr = rate_trace(*c.policy, c.pulse, c.tls, grid, args.jobs);

    CsvTable t;
    t.header = {"t_ps", "kappa_re", "kappa_im", "omega_bar_re", "omega_bar_im"};
    t.columns.assign(5, std::vector<double>());
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        t.columns[0].push_back(tr.times[i]);
        t.columns[1].push_back(tr.kappa[i].real());
        t.columns[2].push_back(tr.kappa[i].imag());
        t.columns[3].push_back(tr.omega_bar[i].real());
        t.columns[4].push_back(tr.omega_bar[i].imag());
    }
    write_csv(args.out, t);
    note(args, "rate: wrote " + args.out);
    return 0;
}

int cmd_simulate(const CommonArgs& args) {
    const Config c = load_config(args.config);
    const SimConfig cfg = sim_from_config(c);
    const auto tr = integrate(cfg, c.integrator.samples);

    CsvTable t;
    t.header = {"t_ps", "rho_pp", "rho_pm_re", "rho_pm_im", "kappa_re", "kappa_im"};
    t.columns.assign(6, std::vector<double>());
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        t.columns[0].push_back(tr.times[i]);
        t.columns[1].push_back(tr.states[i].rho_pp);
        t.columns[2].push_back(tr.states[i].rho_pm.real());
        t.columns[3].push_back(tr.states[i].rho_pm.imag());
        t.columns[4].push_back(tr.kappa_used[i].real());
        t.columns[5].push_back(tr.kappa_used[i].imag());
    }
    write_csv(args.out, t);
    note(args, "simulate: wrote " + args.out);
    return 0;
}

SweepSpec sweep_spec_from_config(const Config& c) {
    if (!c.sweep) throw validation_error("config: this command needs a sweep section");
    SweepSpec spec;
    spec.base.pulse = c.pulse;
    spec.base.tls = c.tls;
    spec.base.step = c.integrator.step;
    spec.base.renormalize_population_drive = c.integrator.renormalize_population_drive;
    spec.base.t_end = c.integrator.t_end;
    spec.variable = c.sweep->variable;
    spec.grid = c.sweep->grid;
    spec.policies = c.sweep->policies;
    spec.labels = c.sweep->labels;
    return spec;
}

CsvTable sweep_table(const SweepResult& res) {
    CsvTable t;
    t.header = {"amplitude_pi_units"};
    t.columns = {res.amplitudes};
    for (std::size_t c = 0; c < res.columns.size(); ++c) {
        t.header.push_back(res.columns[c]);
        t.columns.push_back(res.populations[c]);
    }
    return t;
}

int cmd_sweep(const CommonArgs& args) {
    const Config c = load_config(args.config);
    const auto spec = sweep_spec_from_config(c);
    note(args, "sweep: " + std::to_string(spec.grid.size()) + " amplitudes x " +
                   std::to_string(spec.policies.size()) + " policies");
    const auto res = area_sweep(spec, args.jobs);
    write_csv(args.out, sweep_table(res));
    note(args, "sweep: wrote " + args.out);
    return 0;
}

int cmd_widths(const CommonArgs& args) {
    const Config c = load_config(args.config);
    const auto spec = sweep_spec_from_config(c);
    if (!c.sweep || c.sweep->widths.empty())
        throw validation_error("config: widths needs sweep.widths");
    const auto series = width_series(spec, c.sweep->widths, args.jobs);

    CsvTable t;
    t.header = {"amplitude_pi_units"};
    t.columns = {series.front().amplitudes};
    for (std::size_t w = 0; w < series.size(); ++w)
        for (std::size_t col = 0; col < series[w].columns.size(); ++col) {
            t.header.push_back(series[w].columns[col] + "_" +
                               trim_num(c.sweep->widths[w]) + "ps");
            t.columns.push_back(series[w].populations[col]);
        }
    write_csv(args.out, t);
    note(args, "widths: wrote " + args.out);
    return 0;
}

int cmd_fit(const CommonArgs& args) {
    const Config c = load_config(args.config);
    FitProblem problem = fit_problem_from_config(c, args.config);
    if (args.jobs > 0) problem.options.jobs = args.jobs;
    std::vector<double> init, lo, hi;
    fit_vectors_from_config(problem, *c.fit, init, lo, hi);
    note(args, "fit: " + std::to_string(problem.datasets.size()) + " dataset(s), " +
                   std::to_string(problem.options.starts) + " starts");
    const FitResult res = fit_best_effort(problem, init, lo, hi);

    nlohmann::json out;
    for (std::size_t i = 0; i < res.names.size(); ++i) {
        out["params"][res.names[i]] = res.params[i];
        out["sigma"][res.names[i]] = res.sigma[i];
    }
    out["rss"] = res.rss;
    out["converged"] = res.converged;
    out["iters"] = res.iters;
    std::ofstream f(args.out, std::ios::binary);
    if (!f) throw validation_error("cannot open output file " + args.out);
    f << out.dump(2) << "\n";
    note(args, "fit: wrote " + args.out +
                   (res.converged ? "" : " (did not converge; best effort)"));
    return res.converged ? 0 : 3;
}

// --- figure reproductions ------------------------------------------------
// Pinned constants: 1 ps width for the photocurrent panel, 9.3/7.0/5.4 ps for
// the photoluminescence series, and the trace window. Policy parameters are
// illustrative (gamma defaults to 2 / ps); an optional --config overrides the
// illustrative parts (policies, amplitude grid) but not the pinned widths.
// configs/ mirrors the built-ins.

int cmd_repro(const std::string& panel, const CommonArgs& args, const std::string& gnuplot) {
    std::optional<Config> over;
    if (!args.config.empty()) over = load_config(args.config);

    const auto policies_or = [&](std::vector<DephasingPolicy> fallback)
        -> std::pair<std::vector<DephasingPolicy>, std::vector<std::string>> {
        if (over && over->sweep && !over->sweep->policies.empty())
            return {over->sweep->policies, over->sweep->labels};
        if (over && over->policy) return {{*over->policy}, {}};
        return {std::move(fallback), {}};
    };
    const auto grid_or = [&](std::vector<double> fallback) {
        return over && over->sweep && !over->sweep->grid.empty() ? over->sweep->grid
                                                                 : std::move(fallback);
    };
    const auto nonstationary_or = [&](NonstationaryPolicy fallback) {
        if (over && over->policy) {
            const auto* ns = std::get_if<NonstationaryPolicy>(&*over->policy);
            if (!ns)
                throw validation_error("repro: this panel needs a nonstationary policy");
            return *ns;
        }
        return fallback;
    };

    CsvTable t;
    if (panel == "fig1a") {
        SweepSpec spec;
        spec.base.pulse.duration = 1.0;  // 1 ps photocurrent pulse
        spec.grid = grid_or(urange(0.05, 12.0, 0.05));
        std::tie(spec.policies, spec.labels) = policies_or(
            {MarkovPolicy{0.1},
             StationaryExpansionPolicy{SpectralModel{TaylorSpectrum{0.05, 0.0, 0.0015}}}});
        t = sweep_table(area_sweep(spec, args.jobs));
    } else if (panel == "fig1b") {
        SweepSpec spec;
        spec.base.pulse.duration = 1.0;
        spec.grid = grid_or(urange(0.05, 3.0, 0.05));
        std::tie(spec.policies, spec.labels) = policies_or(
            {StationaryExpansionPolicy{SpectralModel{TaylorSpectrum{0.05, 0.0, 0.08}}}});
        const double widths[] = {9.3, 7.0, 5.4};  // PL pulse widths
        const auto series = width_series(spec, widths, args.jobs);
        t.header = {"amplitude_pi_units"};
        t.columns = {series.front().amplitudes};
        for (std::size_t w = 0; w < series.size(); ++w)
            for (std::size_t col = 0; col < series[w].columns.size(); ++col) {
                t.header.push_back(series[w].columns[col] + "_" + trim_num(widths[w]) + "ps");
                t.columns.push_back(series[w].populations[col]);
            }
    } else if (panel == "fig2a") {
        PulseSpec pulse;
        pulse.omega = over ? over->pulse.omega : 2.0 * kPi;
        pulse.duration = 20.0;  // rates traced while the drive is on
        NonstationaryPolicy unit = nonstationary_or(
            {0.1, NonstationaryModel{ExponentialMean{0.25, 2.0}}, DppMode::Unit});
        unit.dpp = DppMode::Unit;
        NonstationaryPolicy full = unit;
        full.dpp = DppMode::Full;
        const auto grid = urange(0.0, 5.0, 0.005);
        const auto tru = rate_trace(DephasingPolicy{unit}, pulse, TlsParams{}, grid, args.jobs);
        const auto trf = rate_trace(DephasingPolicy{full}, pulse, TlsParams{}, grid, args.jobs);
        t.header = {"t_ps", "kappa_unit", "kappa_full"};
        t.columns.assign(3, std::vector<double>());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            t.columns[0].push_back(grid[i]);
            t.columns[1].push_back(tru.kappa[i].real());
            t.columns[2].push_back(trf.kappa[i].real());
        }
    } else if (panel == "fig2b") {
        SimConfig base;
        base.pulse.duration = 1.0;
        base.policy = nonstationary_or(
            {0.05, NonstationaryModel{ExponentialMean{0.06, 2.0}}, DppMode::Unit});
        const auto grid = grid_or(urange(0.05, 12.0, 0.05));
        t = sweep_table(population_vs_amplitude_at_pulse_end(base, grid, args.jobs));
    } else {
        throw validation_error("repro: unknown panel " + panel);
    }
    write_csv(args.out, t);
    if (!gnuplot.empty()) write_gnuplot(gnuplot, args.out, t.header.size());
    note(args, "repro " + panel + ": wrote " + args.out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rabisim: Rabi oscillations of a driven two-level system coupled to a "
                 "dephasing reservoir"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string panel, gnuplot;

    const auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config)
            sub->add_option("--config", args.config, "JSON configuration file")->required();
        sub->add_option("--out", args.out, "output file (CSV or JSON)")->required();
        sub->add_option("--jobs", args.jobs, "worker threads (default: all cores)");
        sub->add_flag("--quiet", args.quiet, "suppress progress messages");
    };

    add_common(app.add_subcommand("dress", "tabulate the dressing functions"), true);
    add_common(app.add_subcommand("rate", "tabulate kappa(t) and the generalized Rabi frequency"),
               true);
    add_common(app.add_subcommand("simulate", "integrate one Bloch trajectory"), true);
    add_common(app.add_subcommand("sweep", "final population vs pulse amplitude"), true);
    add_common(app.add_subcommand("widths", "amplitude sweeps for a series of pulse widths"),
               true);
    add_common(app.add_subcommand("fit", "least-squares parameter estimation"), true);

    CLI::App* repro = app.add_subcommand("repro", "figure-panel reproduction pipelines");
    repro->add_option("panel", panel, "fig1a, fig1b, fig2a or fig2b")
        ->required()
        ->check(CLI::IsMember({"fig1a", "fig1b", "fig2a", "fig2b"}));
    repro->add_option("--config", args.config, "optional config overriding the built-ins");
    add_common(repro, false);
    repro->add_option("--gnuplot", gnuplot, "also write a gnuplot script");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help() << "\n";
        return 64;
    }

    try {
        if (app.got_subcommand("dress")) return cmd_dress(args);
        if (app.got_subcommand("rate")) return cmd_rate(args);
        if (app.got_subcommand("simulate")) return cmd_simulate(args);
        if (app.got_subcommand("sweep")) return cmd_sweep(args);
        if (app.got_subcommand("widths")) return cmd_widths(args);
        if (app.got_subcommand("fit")) return cmd_fit(args);
        if (app.got_subcommand("repro")) return cmd_repro(panel, args, gnuplot);
        std::cerr << app.help() << "\n";
        return 64;
    } catch (const validation_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const unsupported_transform& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
