#include "rabisim/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "rabisim/errors.hpp"

namespace rabi {

namespace {

using nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& ctx) {
    if (!j.is_object()) throw validation_error("config: " + ctx + " must be an object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) {
                ok = true;
                break;
            }
        if (!ok) throw validation_error("config: unknown key '" + key + "' in " + ctx);
    }
}

const json& require(const json& j, const char* key, const std::string& ctx) {
    const auto it = j.find(key);
    if (it == j.end())
        throw validation_error("config: missing key '" + std::string(key) + "' in " + ctx);
    return *it;
}

double number(const json& j, const std::string& ctx) {
    if (!j.is_number()) throw validation_error("config: " + ctx + " must be a number");
    return j.get<double>();
}

double number_at(const json& j, const char* key, const std::string& ctx) {
    return number(require(j, key, ctx), ctx + "." + key);
}

double number_or(const json& j, const char* key, double fallback, const std::string& ctx) {
    const auto it = j.find(key);
    return it == j.end() ? fallback : number(*it, ctx + "." + key);
}

SpectralModel parse_spectrum(const json& j, const std::string& ctx) {
    check_keys(j, {"type", "k0", "k1", "k2", "center", "width"}, ctx);
    const std::string type = require(j, "type", ctx).get<std::string>();
    SpectralModel m;
    if (type == "constant") {
        m = ConstantSpectrum{number_at(j, "k0", ctx)};
    } else if (type == "taylor") {
        m = TaylorSpectrum{number_at(j, "k0", ctx), number_or(j, "k1", 0.0, ctx),
                           number_or(j, "k2", 0.0, ctx)};
    } else if (type == "gaussian") {
        m = GaussianSpectrum{number_at(j, "k0", ctx), number_or(j, "center", 0.0, ctx),
                             number_at(j, "width", ctx)};
    } else if (type == "lorentzian") {
        m = LorentzianSpectrum{number_at(j, "k0", ctx), number_or(j, "center", 0.0, ctx),
                               number_at(j, "width", ctx)};
    } else {
        throw validation_error("config: unknown spectrum type '" + type + "' in " + ctx);
    }
    validate(m);
    return m;
}

NonstationaryModel parse_nonstationary(const json& j, const std::string& ctx) {
    check_keys(j, {"type", "a", "gamma", "modes"}, ctx);
    const std::string type = require(j, "type", ctx).get<std::string>();
    NonstationaryModel m;
    if (type == "exponential_mean") {
        m = ExponentialMean{number_or(j, "a", 1.0, ctx), number_at(j, "gamma", ctx)};
    } else if (type == "discrete_modes") {
        DiscreteModes d;
        const json& modes = require(j, "modes", ctx);
        if (!modes.is_array())
            throw validation_error("config: " + ctx + ".modes must be an array");
        for (const auto& row : modes) {
            if (!row.is_array() || row.size() != 3)
                throw validation_error("config: each mode must be [g, delta, omega] in " + ctx);
            d.modes.push_back({number(row[0], ctx), number(row[1], ctx), number(row[2], ctx)});
        }
        m = d;
    } else {
        throw validation_error("config: unknown nonstationary type '" + type + "' in " + ctx);
    }
    validate(m);
    return m;
}

DephasingPolicy parse_policy(const json& j, const std::string& ctx, std::string* label) {
    check_keys(j, {"type", "label", "kappa", "spectrum", "kappa_s", "dpp", "model", "quad_tol",
                   "kernel"},
               ctx);
    if (label) {
        const auto it = j.find("label");
        *label = it == j.end() ? std::string() : it->get<std::string>();
    } else if (j.contains("label")) {
        throw validation_error("config: 'label' is only valid inside sweep.policies (" + ctx +
                               ")");
    }
    const std::string type = require(j, "type", ctx).get<std::string>();
    DephasingPolicy p;
    if (type == "markov") {
        p = MarkovPolicy{number_at(j, "kappa", ctx)};
    } else if (type == "stationary_triplet") {
        p = StationaryTripletPolicy{parse_spectrum(require(j, "spectrum", ctx), ctx + ".spectrum")};
    } else if (type == "stationary_expansion") {
        p = StationaryExpansionPolicy{
            parse_spectrum(require(j, "spectrum", ctx), ctx + ".spectrum")};
    } else if (type == "nonstationary") {
        NonstationaryPolicy ns;
        ns.kappa_s = number_or(j, "kappa_s", 0.0, ctx);
        ns.model = parse_nonstationary(require(j, "model", ctx), ctx + ".model");
        const auto it = j.find("dpp");
        if (it != j.end()) {
            const std::string dpp = it->get<std::string>();
            if (dpp == "unit")
                ns.dpp = DppMode::Unit;
            else if (dpp == "full")
                ns.dpp = DppMode::Full;
            else
                throw validation_error("config: dpp must be 'unit' or 'full' in " + ctx);
        }
        p = ns;
    } else if (type == "general_quadrature") {
        GeneralQuadraturePolicy g;
        const json& kj = require(j, "kernel", ctx);
        check_keys(kj, {"stationary", "nonstationary"}, ctx + ".kernel");
        g.kernel.stationary =
            parse_spectrum(require(kj, "stationary", ctx), ctx + ".kernel.stationary");
        if (kj.contains("nonstationary"))
            g.kernel.nonstationary =
                parse_nonstationary(kj["nonstationary"], ctx + ".kernel.nonstationary");
        g.quad_tol = number_or(j, "quad_tol", 1e-8, ctx);
        p = g;
    } else {
        throw validation_error("config: unknown policy type '" + type + "' in " + ctx);
    }
    validate(p);
    return p;
}

PulseSpec parse_pulse(const json& j) {
    check_keys(j, {"shape", "omega", "duration", "t0", "samples"}, "pulse");
    PulseSpec p;
    const std::string shape =
        j.contains("shape") ? j["shape"].get<std::string>() : std::string("rectangular");
    p.duration = number_at(j, "duration", "pulse");
    p.t0 = number_or(j, "t0", 0.0, "pulse");
    if (shape == "rectangular") {
        p.shape = PulseSpec::Shape::Rectangular;
        p.omega = number_at(j, "omega", "pulse");
    } else if (shape == "sampled") {
        p.shape = PulseSpec::Shape::Sampled;
        const json& rows = require(j, "samples", "pulse");
        if (!rows.is_array())
            throw validation_error("config: pulse.samples must be an array");
        for (const auto& row : rows) {
            if (!row.is_array() || row.size() < 2 || row.size() > 3)
                throw validation_error(
                    "config: each pulse sample must be [t, re] or [t, re, im]");
            const double t = number(row[0], "pulse.samples");
            const double re = number(row[1], "pulse.samples");
            const double im = row.size() == 3 ? number(row[2], "pulse.samples") : 0.0;
            p.samples.emplace_back(t, std::complex<double>{re, im});
        }
    } else {
        throw validation_error("config: pulse shape must be 'rectangular' or 'sampled'");
    }
    validate(p);
    return p;
}

SweepSettings parse_sweep(const json& j) {
    check_keys(j, {"variable", "grid", "values", "policies", "widths"}, "sweep");
    SweepSettings s;
    if (j.contains("variable")) {
        const std::string v = j["variable"].get<std::string>();
        if (v == "amplitude")
            s.variable = SweepVariable::AmplitudeAtFixedWidth;
        else if (v == "area")
            s.variable = SweepVariable::AreaAtFixedWidth;
        else
            throw validation_error("config: sweep.variable must be 'amplitude' or 'area'");
    }
    if (j.contains("values")) {
        for (const auto& v : j["values"]) s.grid.push_back(number(v, "sweep.values"));
    } else {
        const json& g = require(j, "grid", "sweep");
        check_keys(g, {"start", "stop", "step"}, "sweep.grid");
        const double start = number_at(g, "start", "sweep.grid");
        const double stop = number_at(g, "stop", "sweep.grid");
        const double step = number_at(g, "step", "sweep.grid");
        if (!(step > 0.0) || stop < start)
            throw validation_error("config: sweep.grid needs step > 0 and stop >= start");
        const int n = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
        for (int i = 0; i < n; ++i) s.grid.push_back(start + step * i);
    }
    const json& pols = require(j, "policies", "sweep");
    if (!pols.is_array() || pols.empty())
        throw validation_error("config: sweep.policies must be a non-empty array");
    int idx = 0;
    for (const auto& pj : pols) {
        std::string label;
        s.policies.push_back(
            parse_policy(pj, "sweep.policies[" + std::to_string(idx++) + "]", &label));
        s.labels.push_back(label);
    }
    if (j.contains("widths"))
        for (const auto& w : j["widths"]) s.widths.push_back(number(w, "sweep.widths"));
    return s;
}

FitSettings parse_fit(const json& j) {
    check_keys(j, {"family", "freeze_k1", "starts", "seed", "max_iters", "init", "bounds",
                   "datasets"},
               "fit");
    FitSettings f;
    const std::string family = require(j, "family", "fit").get<std::string>();
    if (family == "markov")
        f.family = FitFamily::Markov;
    else if (family == "stationary_expansion")
        f.family = FitFamily::StationaryExpansion;
    else if (family == "nonstationary")
        f.family = FitFamily::Nonstationary;
    else
        throw validation_error("config: unknown fit.family '" + family + "'");
    if (j.contains("freeze_k1")) f.options.freeze_k1 = j["freeze_k1"].get<bool>();
    if (j.contains("starts")) f.options.starts = j["starts"].get<int>();
    if (j.contains("max_iters")) f.options.max_iters = j["max_iters"].get<int>();
    if (j.contains("seed")) f.options.seed = j["seed"].get<unsigned>();

    const auto read_overrides = [&](const json& o, const char* ctx,
                                    std::vector<std::pair<std::string, double>>& dst) {
        if (!o.is_object())
            throw validation_error(std::string("config: ") + ctx + " must be an object");
        for (const auto& [key, value] : o.items()) dst.emplace_back(key, number(value, ctx));
    };
    if (j.contains("init")) read_overrides(j["init"], "fit.init", f.init);
    if (j.contains("bounds")) {
        const json& b = j["bounds"];
        check_keys(b, {"lo", "hi"}, "fit.bounds");
        if (b.contains("lo")) read_overrides(b["lo"], "fit.bounds.lo", f.lower);
        if (b.contains("hi")) read_overrides(b["hi"], "fit.bounds.hi", f.upper);
    }

    const json& ds = require(j, "datasets", "fit");
    if (!ds.is_array() || ds.empty())
        throw validation_error("config: fit.datasets must be a non-empty array");
    for (const auto& dj : ds) {
        check_keys(dj, {"path", "pulse_width", "label"}, "fit.datasets[]");
        FitSettings::DataRef ref;
        ref.path = require(dj, "path", "fit.datasets[]").get<std::string>();
        ref.pulse_width = number_at(dj, "pulse_width", "fit.datasets[]");
        if (dj.contains("label")) ref.label = dj["label"].get<std::string>();
        f.datasets.push_back(ref);
    }
    return f;
}

} // namespace

Config parse_config(const json& j) {
    check_keys(j, {"pulse", "tls", "policy", "integrator", "sweep", "fit"}, "config");
    Config c;
    c.pulse = parse_pulse(require(j, "pulse", "config"));
    if (j.contains("tls")) {
        const json& tj = j["tls"];
        check_keys(tj, {"delta", "delta_shift"}, "tls");
        c.tls.delta = number_or(tj, "delta", 0.0, "tls");
        c.tls.delta_shift = number_or(tj, "delta_shift", 0.0, "tls");
        validate(c.tls);
    }
    if (j.contains("policy")) c.policy = parse_policy(j["policy"], "policy", nullptr);
    if (j.contains("integrator")) {
        const json& ij = j["integrator"];
        check_keys(ij, {"rel_tol", "abs_tol", "max_step", "t_end", "samples",
                        "renormalize_population_drive"},
                   "integrator");
        c.integrator.step.rel_tol = number_or(ij, "rel_tol", 1e-9, "integrator");
        c.integrator.step.abs_tol = number_or(ij, "abs_tol", 1e-11, "integrator");
        c.integrator.step.max_step = number_or(ij, "max_step", 0.0, "integrator");
        if (ij.contains("t_end")) c.integrator.t_end = number(ij["t_end"], "integrator.t_end");
        if (ij.contains("samples")) c.integrator.samples = ij["samples"].get<int>();
        if (ij.contains("renormalize_population_drive"))
            c.integrator.renormalize_population_drive =
                ij["renormalize_population_drive"].get<bool>();
        if (c.integrator.samples < 2)
            throw validation_error("config: integrator.samples must be >= 2");
    }
    if (j.contains("sweep")) c.sweep = parse_sweep(j["sweep"]);
    if (j.contains("fit")) c.fit = parse_fit(j["fit"]);
    return c;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("config: cannot open file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw validation_error("config: JSON parse error in " + path + ": " + e.what());
    }
    return parse_config(j);
}

SimConfig sim_from_config(const Config& c) {
    if (!c.policy) throw validation_error("config: this command needs a policy section");
    SimConfig cfg;
    cfg.pulse = c.pulse;
    cfg.tls = c.tls;
    cfg.policy = *c.policy;
    cfg.t_end = c.integrator.t_end;
    cfg.step = c.integrator.step;
    cfg.renormalize_population_drive = c.integrator.renormalize_population_drive;
    validate(cfg);
    return cfg;
}

FitProblem fit_problem_from_config(const Config& c, const std::string& config_path) {
    if (!c.fit) throw validation_error("config: this command needs a fit section");
    FitProblem p;
    p.family = c.fit->family;
    p.options = c.fit->options;
    SimConfig base;
    base.pulse = c.pulse;
    base.tls = c.tls;
    base.step = c.integrator.step;
    base.renormalize_population_drive = c.integrator.renormalize_population_drive;
    if (c.policy) base.policy = *c.policy;
    p.base = base;
    const std::filesystem::path dir = std::filesystem::path(config_path).parent_path();
    for (const auto& ref : c.fit->datasets) {
        std::filesystem::path fp(ref.path);
        if (fp.is_relative()) fp = dir / fp;
        p.datasets.push_back(read_dataset_csv(fp.string(), ref.pulse_width, ref.label));
    }
    return p;
}

void fit_vectors_from_config(const FitProblem& p, const FitSettings& f,
                             std::vector<double>& init, std::vector<double>& lo,
                             std::vector<double>& hi) {
    const std::vector<std::string> names = parameter_names(p);
    init = default_init(p);
    default_bounds(p, lo, hi);
    const auto apply = [&](const std::vector<std::pair<std::string, double>>& overrides,
                           std::vector<double>& dst, const char* what) {
        for (const auto& [name, value] : overrides) {
            const auto it = std::find(names.begin(), names.end(), name);
            if (it == names.end())
                throw validation_error("config: fit." + std::string(what) +
                                       " names unknown parameter '" + name + "'");
            dst[static_cast<std::size_t>(it - names.begin())] = value;
        }
    };
    apply(f.init, init, "init");
    apply(f.lower, lo, "bounds.lo");
    apply(f.upper, hi, "bounds.hi");
}

} // namespace rabi
