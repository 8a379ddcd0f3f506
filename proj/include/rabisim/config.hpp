#ifndef RABISIM_CONFIG_HPP
#define RABISIM_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rabisim/fit.hpp"
#include "rabisim/sweep.hpp"

namespace rabi {

// JSON configuration mirroring the typed configs. Sections: pulse, tls,
// policy, integrator, sweep, fit. Unknown keys are rejected everywhere;
// violations throw validation_error.

struct IntegratorSettings {
    StepControl step{};
    std::optional<double> t_end;
    int samples = 500;
    bool renormalize_population_drive = false;
};

struct SweepSettings {
    SweepVariable variable = SweepVariable::AreaAtFixedWidth;
    std::vector<double> grid;
    std::vector<DephasingPolicy> policies;
    std::vector<std::string> labels;
    std::vector<double> widths;  // used by the `widths` subcommand
};

struct FitSettings {
    FitFamily family = FitFamily::StationaryExpansion;
    FitOptions options{};
    std::vector<std::pair<std::string, double>> init;       // by parameter name
    std::vector<std::pair<std::string, double>> lower;
    std::vector<std::pair<std::string, double>> upper;
    struct DataRef {
        std::string path;
        double pulse_width = 1.0;
        std::string label;
    };
    std::vector<DataRef> datasets;
};

struct Config {
    PulseSpec pulse;
    TlsParams tls;
    std::optional<DephasingPolicy> policy;
    IntegratorSettings integrator;
    std::optional<SweepSettings> sweep;
    std::optional<FitSettings> fit;
};

Config parse_config(const nlohmann::json& j);
Config load_config(const std::string& path);

// Assembles a SimConfig; requires the policy section.
SimConfig sim_from_config(const Config& c);

// Resolves dataset paths relative to the config file's directory.
FitProblem fit_problem_from_config(const Config& c, const std::string& config_path);

// Defaults plus the config's by-name init/bounds overrides, in parameter order.
void fit_vectors_from_config(const FitProblem& p, const FitSettings& f,
                             std::vector<double>& init, std::vector<double>& lo,
                             std::vector<double>& hi);

} // namespace rabi

#endif
