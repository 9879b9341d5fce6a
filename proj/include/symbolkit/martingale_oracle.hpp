#pragma once

// Constant-expectation checks of the processes attached to a generalized
// semimartingale: the killing compensator, the exponential (characteristic)
// martingale and the martingale residual of the canonical decomposition.
// Each check accepts a stored ensemble or streams paths from a simulator.

#include <vector>

#include "symbolkit/json_io.hpp"
#include "symbolkit/simulator.hpp"

namespace symbolkit {

/// Split of the finite segment of a path into truncated part and big-jump sum.
struct TruncationDecomposition {
    int dim = 0;
    double h_radius = 1.0;
    std::vector<double> times;
    std::vector<double> big_jump;   // row i: sum over grid increments up to time i of dX - h(dX)
    std::vector<double> truncated;  // row i: X_i - big_jump_i

    std::size_t size() const { return times.size(); }
    const double* big(std::size_t i) const { return big_jump.data() + i * static_cast<std::size_t>(dim); }
    const double* rest(std::size_t i) const { return truncated.data() + i * static_cast<std::size_t>(dim); }
};

/// h(y) = y 1{|y| <= h_radius}; grid increments with |dX| > h_radius go to the big-jump sum.
/// Grid increments mix diffusion and jumps, so the split is a threshold rule on increments.
TruncationDecomposition truncate_jumps(const Path& path, double h_radius);

struct CompensatorRow {
    double t = 0.0;
    double killed_fraction = 0.0;     // P(zeta_delta <= t)
    double mean_compensator = 0.0;    // E int_0^{t ^ zeta_delta} a(X_s) ds
    double difference = 0.0;
    double stderr = 0.0;              // of the paired difference
    bool pass = true;
};

struct CompensatorReport {
    std::vector<CompensatorRow> rows;
    std::size_t n_used = 0;
    std::size_t n_excluded = 0;  // paths reaching infinity or failing evaluation
    bool pass = true;
};

CompensatorReport killing_compensator_check(const Ensemble& ensemble, const StateModel& model,
                                            const std::vector<double>& t_grid);
/// Streams paths from the autonomous (hazard) sampler.
CompensatorReport killing_compensator_check(const StateModel& model, const SimSpec& spec,
                                            const std::vector<double>& t_grid);

enum class MartingaleForm { levy, autonomous };

std::string to_string(MartingaleForm f);

struct MartingaleRow {
    Vec u;
    double t = 0.0;
    Complex mean;
    Complex target;
    double stderr = 0.0;
    /// Levy form only: mean of e_u(X_t - x0) and its closed form e^{-t phi(u)} with stderr.
    Complex char_mean;
    Complex char_target;
    double char_stderr = 0.0;
    bool pass = true;
    bool oscillation = false;
};

struct MartingaleReport {
    MartingaleForm form = MartingaleForm::levy;
    std::vector<MartingaleRow> rows;
    std::size_t n_used = 0;
    std::size_t n_excluded = 0;
    bool oscillation = false;
    bool pass = true;
};

/// Levy form (constant models unless force_autonomous): E e_u(X_t - x0) e^{t phi(u)} = 1.
/// Autonomous form:
///   V_t = e^{iu'H_t} - e^{iu'x0} - int_0^{t ^ zeta_delta} e^{iu'X_s} (a(X_s) e^{iu'1} - p(X_s, u)) ds
/// with H = X before killing and X_{zeta-} + 1 afterwards; E V_t = 0.
MartingaleReport exponential_martingale_check(const Ensemble& ensemble, const StateModel& model,
                                              const std::vector<Vec>& us, const std::vector<double>& t_grid,
                                              bool force_autonomous = false);
MartingaleReport exponential_martingale_check(const StateModel& model, const SimSpec& spec,
                                              const std::vector<Vec>& us, const std::vector<double>& t_grid,
                                              bool force_autonomous = false);

struct ResidualRow {
    double t = 0.0;
    Vec mean;
    Vec stderr;
    bool pass = true;
};

struct ResidualReport {
    double h_radius = 1.0;
    std::vector<ResidualRow> rows;
    std::size_t n_used = 0;
    std::size_t n_excluded = 0;
    bool pass = true;
};

/// M_t = X_t - x0 - int_0^t l(X_s) ds - big-jump sum, frozen at killing; checks E M_t = 0 per coordinate.
ResidualReport canonical_representation_residual(const Ensemble& ensemble, const StateModel& model,
                                                 double h_radius, const std::vector<double>& t_grid);
ResidualReport canonical_representation_residual(const StateModel& model, const SimSpec& spec, double h_radius,
                                                 const std::vector<double>& t_grid);

Json report_json(const CompensatorReport& r);
Json report_json(const MartingaleReport& r);
Json report_json(const ResidualReport& r);

}  // namespace symbolkit
