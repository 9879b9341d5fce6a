#pragma once

// Monte-Carlo estimate of the probabilistic symbol
//   p(x, xi) = -lim_{t -> 0} (E^x e_xi(X^sigma_t - x) - 1) / t,
// with sigma the first exit time from the closed ball of radius K around x.

#include <iosfwd>
#include <limits>
#include <vector>

#include "symbolkit/json_io.hpp"
#include "symbolkit/simulator.hpp"

namespace symbolkit {

struct ProbeSettings {
    /// Radius of K; +inf probes the unstopped process (test mode for Levy fixtures).
    double K_radius = 1.0;
    std::vector<double> t_ladder{0.04, 0.02, 0.01, 0.005};
    std::size_t n_samples = 100000;
    bool extrapolate = true;
    /// Time step; 0 selects t_min / 50.
    double dt = 0.0;
    std::uint64_t seed = 1;
    double explosion_threshold = 1e9;

    void validate() const;
    double effective_dt() const;
};

struct LadderEstimate {
    double t = 0.0;
    Complex estimate;
    double stderr_re = 0.0;
    double stderr_im = 0.0;
    double stderr() const;
};

struct SymbolReport {
    Vec x;
    Vec xi;
    Complex analytic;
    double analytic_error_bound = 0.0;
    std::vector<LadderEstimate> ladder;
    /// Intercept of the least-squares fit p + c t over the ladder.
    LadderEstimate extrapolated;
    /// Extrapolated value when requested, else the smallest-t rung.
    LadderEstimate final_estimate;
    double abs_error = 0.0;
    /// NaN when |analytic| <= 1e-8.
    double rel_error = std::numeric_limits<double>::quiet_NaN();
    bool low_confidence = false;
    double first_step_exit_fraction = 0.0;
    double killed_fraction = 0.0;
    std::size_t invalid_paths = 0;
    ProbeSettings settings;
};

/// Least-squares weights w with intercept = sum_k w_k y_k for the model y = p + c t.
std::vector<double> intercept_weights(const std::vector<double>& t);

/// Probes one frequency.
SymbolReport estimate_symbol(const StateModel& model, const Vec& x, const Vec& xi, const ProbeSettings& settings);
/// Probes several frequencies on common paths started at x.
std::vector<SymbolReport> estimate_symbols(const StateModel& model, const Vec& x, const std::vector<Vec>& xis,
                                           const ProbeSettings& settings);

struct IndependenceReport {
    std::vector<double> radii;
    std::vector<SymbolReport> reports;
    /// Largest |p_i - p_j| / sqrt(se_i^2 + se_j^2) over pairs.
    double max_pair_z = 0.0;
    bool consistent = true;
};

/// Estimates at each radius with common random numbers; flags pairs differing by more than 3 combined stderr.
IndependenceReport symbol_independence_check(const StateModel& model, const Vec& x, const Vec& xi,
                                             const std::vector<double>& radii, const ProbeSettings& settings);

Json report_json(const SymbolReport& r);
Json report_json(const IndependenceReport& r);
void write_symbol_csv(std::ostream& os, const std::vector<SymbolReport>& reports);

}  // namespace symbolkit
