#pragma once

// Frequency-ball statistics H and h of a symbol, generalized Blumenthal-Getoor
// indices from their log-log slopes, maximal-inequality ratios and the
// scaling diagnostic of the maximum process.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "symbolkit/json_io.hpp"
#include "symbolkit/simulator.hpp"

namespace symbolkit {

struct IndexGridSettings {
    /// Points per axis of the y grid (the total is capped at max_y_points).
    int y_points_per_axis = 41;
    std::size_t max_y_points = 20000;
    /// Directions on the unit sphere (d >= 2) and radii in (0, 1] of the epsilon grid.
    int eps_directions = 64;
    int eps_radii = 8;
};

double kappa_from_c0(double c0);

/// y grid: the domain box (x absent) or the ball |y - x| <= 2R intersected with it.
std::vector<Vec> index_y_grid(const StateModel& model, double R, const std::optional<Vec>& x,
                              const IndexGridSettings& g = {});
/// Unit-ball epsilon grid including 0 and dense on the boundary.
std::vector<Vec> unit_ball_grid(int dim, const IndexGridSettings& g = {});

double quantity_H(const StateModel& model, double R, const std::optional<Vec>& x = std::nullopt,
                  const IndexGridSettings& g = {});
/// Needs a sector constant; throws SectorError when sector is not satisfied.
double quantity_h(const StateModel& model, double R, const ConditionEstimate& sector,
                  const std::optional<Vec>& x = std::nullopt, const IndexGridSettings& g = {});
double quantity_h(const StateModel& model, double R, double c0, const std::optional<Vec>& x = std::nullopt,
                  const IndexGridSettings& g = {});

/// Sector check on the index y grid and a log-spaced frequency grid covering [xi_lo, xi_hi].
ConditionEstimate index_sector_check(const StateModel& model, double xi_lo, double xi_hi,
                                     const std::optional<Vec>& x = std::nullopt, const IndexGridSettings& g = {});

enum class IndexDirection { origin, infinity };

std::string to_string(IndexDirection d);

struct IndexReport {
    IndexDirection direction = IndexDirection::origin;
    std::optional<Vec> x;
    std::vector<double> R_grid;
    std::vector<double> H_values;
    std::vector<double> h_values;  // empty when the sector condition fails
    bool sector_satisfied = false;
    double c0 = 0.0;
    double kappa = 0.0;
    /// Local slopes -dlog H / dlog R between consecutive grid points.
    std::vector<double> H_slopes;
    std::vector<double> h_slopes;
    /// Index range [first, last) of H_slopes inside the tail decade.
    std::size_t tail_begin = 0;
    std::size_t tail_end = 0;
    double H_tail_min = 0.0, H_tail_max = 0.0;
    double h_tail_min = 0.0, h_tail_max = 0.0;
    bool indeterminate = false;
    std::string notes;

    // Origin indices.
    double beta0 = 0.0, beta0_lower = 0.0, delta0_upper = 0.0, delta0 = 0.0;
    // Indices at infinity (at x).
    double beta_inf_x = 0.0, beta_inf_x_lower = 0.0, delta_inf_x_upper = 0.0, delta_inf_x = 0.0;
};

/// Log-spaced R grid with n_points >= 16 over at least three decades.
IndexReport estimate_indices(const StateModel& model, double R_min, double R_max, int n_points,
                             IndexDirection direction, const std::optional<Vec>& x = std::nullopt,
                             const IndexGridSettings& g = {});

Json report_json(const IndexReport& r);
void write_slope_csv(std::ostream& os, const IndexReport& r);

// ---------------------------------------------------------------------------
// Monte-Carlo parts
// ---------------------------------------------------------------------------

struct McSettings {
    std::size_t n_paths = 100000;
    double dt = 1e-3;
    std::uint64_t seed = 1;
    double explosion_threshold = 1e9;
};

struct MaximalCell {
    double t = 0.0;
    double R = 0.0;
    double H = 0.0;
    double h = 0.0;
    double p_exceed = 0.0;       // fraction with max_{s<=t} |X_s - x| >= R
    double p_exceed_half = 0.0;  // same from the first half of the paths
    double ratio1 = 0.0;
    double ratio1_half = 0.0;
    double ratio2 = 0.0;
    double ratio2_half = 0.0;
};

struct MaximalInequalityReport {
    Vec x;
    std::vector<MaximalCell> cells;
    std::size_t n_paths = 0;
    double sup_ratio1 = 0.0, sup_ratio1_half = 0.0;
    double sup_ratio2 = 0.0, sup_ratio2_half = 0.0;
    bool ratio2_available = false;
    std::string notice;
    double ratio1_change = 0.0;  // |sup - sup_half| / sup (0 when both vanish)
    double ratio2_change = 0.0;
    bool finite = true;
    bool stable = true;
};

MaximalInequalityReport verify_maximal_inequality(const StateModel& model, const Vec& x,
                                                  const std::vector<double>& t_grid,
                                                  const std::vector<double>& R_grid, const McSettings& mc,
                                                  const IndexGridSettings& g = {});

enum class ScalingClass { to_zero, to_infinity, indeterminate };

std::string to_string(ScalingClass c);

struct ScalingResult {
    double lambda = 0.0;
    /// Median over paths of the directional log-slope (positive: the ratio vanishes in the limit).
    double median_slope = 0.0;
    double fraction_to_zero = 0.0;
    double fraction_to_infinity = 0.0;
    ScalingClass classification = ScalingClass::indeterminate;
};

enum class TimeLimit { small_time, large_time };

std::string to_string(TimeLimit l);

struct ScalingReport {
    TimeLimit limit = TimeLimit::small_time;
    std::vector<double> t_grid;  // snapped to multiples of dt
    std::vector<ScalingResult> results;
    std::size_t n_paths = 0;
};

/// Classifies t^{-1/lambda} (X - x)*_t as t -> 0 (small_time) or t -> infinity (large_time).
ScalingReport scaling_diagnostic(const StateModel& model, const Vec& x, const std::vector<double>& lambdas,
                                 const std::vector<double>& t_grid, TimeLimit limit, const McSettings& mc);

Json report_json(const MaximalInequalityReport& r);
Json report_json(const ScalingReport& r);

}  // namespace symbolkit
