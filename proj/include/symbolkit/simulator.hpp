#pragma once

// Path ensembles for Levy processes with killing, autonomous semimartingales
// (Euler stepping of the frozen triplet) and Levy-driven SDEs.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "symbolkit/extended_state.hpp"
#include "symbolkit/rng.hpp"
#include "symbolkit/state_model.hpp"

namespace symbolkit {

struct SimSpec {
    Vec x0;
    double horizon = 1.0;
    double dt = 1e-3;
    std::size_t n_paths = 1000;
    std::uint64_t seed = 1;
    double explosion_threshold = 1e9;
    /// Overrides the model's density cut eps when set.
    std::optional<double> small_jump_cut;

    /// Throws ConfigError on dt <= 0, T < dt, T not a multiple of dt, n_paths = 0 or M_expl <= |x0|.
    void validate() const;
    std::size_t n_steps() const;
};

enum class SamplerKind { levy, autonomous, sde };

std::string to_string(SamplerKind kind);

struct SeedRecord {
    std::uint64_t diffusion = 0;
    std::uint64_t jumps = 0;
    std::uint64_t hazard = 0;
};

/// Truncation and discretization data of a sampler, exported with ensembles.
struct SimulationInfo {
    SamplerKind kind = SamplerKind::levy;
    bool exact_increments = true;
    std::optional<double> eps;
    bool eps_automatic = false;
    double small_jump_variance = 0.0;
    double small_jump_variance_ratio = 0.0;
    double small_jump_third_moment = 0.0;
    double jump_table_rate_error = 0.0;
    std::string killing_mechanism;
    std::string notes;
};

struct Ensemble {
    SimSpec spec;
    SamplerKind kind = SamplerKind::levy;
    std::vector<Path> paths;
    std::vector<SeedRecord> seed_ledger;
    std::size_t invalid_count = 0;
    SimulationInfo info;
};

class Simulator;

/// Steps one path through the time grid without storing it.
class PathWalker {
public:
    /// Advances one grid step. Returns false at the horizon or after an evaluation failure.
    bool step();

    std::size_t step_index() const { return step_; }
    double time() const;
    PointKind status() const { return status_; }
    /// Current coordinates; meaningful while status() is finite.
    const double* state() const { return x_.data(); }
    int dim() const { return static_cast<int>(x_.size()); }
    bool valid() const { return valid_; }
    const std::string& failure() const { return failure_; }
    bool at_horizon() const;

private:
    friend class Simulator;
    struct Impl;
    PathWalker(std::shared_ptr<const Impl> impl, std::uint64_t path_index, const Vec& x0);

    std::shared_ptr<const Impl> impl_;
    PathStreams streams_;
    std::vector<double> x_;
    std::vector<double> dz_;
    std::vector<double> dx_;
    std::size_t step_ = 0;
    PointKind status_ = PointKind::finite;
    bool valid_ = true;
    bool explode_next_ = false;
    double kill_clock_ = kNever;
    std::string failure_;
    struct Scratch;
    std::shared_ptr<Scratch> scratch_;
};

class Simulator {
public:
    /// The sampler kind follows the model's mode.
    Simulator(const StateModel& model, SimSpec spec);
    Simulator(const StateModel& model, SimSpec spec, SamplerKind kind);

    const SimSpec& spec() const;
    SamplerKind kind() const;
    const StateModel& model() const;
    std::size_t n_steps() const;
    double time_at(std::size_t i) const;
    SimulationInfo info() const;

    PathWalker walker(std::uint64_t path_index) const;
    PathWalker walker(std::uint64_t path_index, const Vec& x0) const;
    Path sample_path(std::uint64_t path_index) const;
    Path sample_path(std::uint64_t path_index, const Vec& x0) const;
    Ensemble sample() const;

private:
    std::shared_ptr<const PathWalker::Impl> impl_;
};

Ensemble sample_levy(const LevyTriplet& triplet, const SimSpec& spec);
Ensemble sample_autonomous(const StateModel& model, const SimSpec& spec);
Ensemble sample_sde(const std::vector<std::vector<Expression>>& f, const LevyTriplet& driver, const SimSpec& spec);

/// Writes path_NNNNNN.csv files and manifest.json into dir (created if missing).
void export_ensemble(const Ensemble& ensemble, const std::filesystem::path& dir, const std::string& model_name);

/// One draw of the standard symmetric alpha-stable law (E e^{iuS} = e^{-|u|^alpha}), from V ~ U(-pi/2, pi/2), W ~ Exp(1).
double symmetric_stable(double alpha, double v, double w);

}  // namespace symbolkit
