#ifndef RABISIM_FIT_HPP
#define RABISIM_FIT_HPP

#include <span>
#include <string>
#include <vector>

#include "rabisim/bloch.hpp"

namespace rabi {

// Least-squares estimation of dephasing-model parameters from digitized
// (amplitude, signal) points. Signals are proportional to the final
// excited-state population; the proportionality is a per-dataset scale
// parameter.

struct DataPoint {
    double amplitude = 0.0;  // pi-pulse units
    double signal = 0.0;     // arbitrary units
    double weight = 1.0;
};

struct DataSet {
    std::vector<DataPoint> points;
    double pulse_width = 1.0;  // ps
    std::string label;
};

enum class FitFamily { Markov, StationaryExpansion, Nonstationary };

struct FitOptions {
    int starts = 8;          // deterministic multi-start
    int max_iters = 200;
    double rss_tol = 1e-10;  // relative RSS decrease at convergence
    double grad_tol = 1e-8;  // inf-norm of the gradient at convergence
    bool freeze_k1 = true;   // expansion family: pin K' at 0
    unsigned seed = 0x5eedu;
    int jobs = 1;
};

struct FitProblem {
    FitFamily family = FitFamily::StationaryExpansion;
    std::vector<DataSet> datasets;
    // Template for the forward simulations: t0, tls, step control, and the
    // dressing mode of the nonstationary family; pulse width and omega come
    // from the data.
    SimConfig base;
    FitOptions options;
};

struct FitResult {
    std::vector<std::string> names;
    std::vector<double> params;
    std::vector<double> sigma;  // 1-sigma estimates from the Jacobian at the optimum
    double rss = 0.0;
    bool converged = false;
    int iters = 0;
    int best_start = 0;
    int penalized_points = 0;  // integrator failures replaced by penalty residuals
};

std::vector<std::string> parameter_names(const FitProblem& p);
std::vector<double> default_init(const FitProblem& p);
void default_bounds(const FitProblem& p, std::vector<double>& lo, std::vector<double>& hi);

// Weighted residuals scale * model - signal, in dataset order. Integrator
// failures become large penalty residuals so the optimizer keeps a total.
std::vector<double> residuals(const FitProblem& p, std::span<const double> params,
                              int* penalized = nullptr);

// Damped least squares with forward-difference Jacobians and deterministic
// multi-start. Throws numerical_error when no start converges (the best-effort
// result is embedded in the exception message; use fit_best_effort to get it).
FitResult fit(const FitProblem& p, std::span<const double> init = {},
              std::span<const double> lo = {}, std::span<const double> hi = {});

// As fit(), but reports non-convergence through FitResult::converged instead
// of throwing.
FitResult fit_best_effort(const FitProblem& p, std::span<const double> init = {},
                          std::span<const double> lo = {}, std::span<const double> hi = {});

// CSV reader: header `amplitude_pi_units,signal[,weight]`, '#' comments.
DataSet read_dataset_csv(const std::string& path, double pulse_width, std::string label = "");

} // namespace rabi

#endif
