#pragma once

// Model files: JSON documents with schema "symbolkit-model/1".
//
//   {
//     "schema": "symbolkit-model/1",
//     "name": "stable_like", "dim": 1, "mode": "autonomous",
//     "killing_rate": "0", "drift": ["0"], "covariance": [["0"]],
//     "measure": {"kind": "stable", "alpha": "0.3 + 0.4/(1+x1^2)", "scale": "1"},
//     "cutoff": {"kind": "ball", "radius": 1},
//     "domain": {"lower": [-100], "upper": [100]},
//     "simulation": {"x0": [0], "horizon": 1, "dt": 0.001, "paths": 1000, "seed": 1}
//   }
//
// Coefficients are expressions (strings) or numbers. Measure kinds: zero,
// discrete (atoms: [{"jump": [...], "rate": ...}]), stable (alpha, scale) and
// density (density in y and x1, optional eps and y_max). In sde mode the
// "sde" block holds a constant driver (killing_rate, drift, covariance,
// measure, cutoff, dim) and the d x m coefficient "f". Unknown fields are
// errors.

#include <filesystem>
#include <string>

#include "symbolkit/json_io.hpp"
#include "symbolkit/simulator.hpp"

namespace symbolkit {

inline constexpr const char* kModelSchema = "symbolkit-model/1";

struct ModelConfig {
    StateModelSpec spec;
    /// Simulation defaults; x0 defaults to the domain centre (or 0 for unbounded boxes).
    SimSpec simulation;
    std::string source;
};

/// Throws ConfigError(field, reason) on schema violations.
ModelConfig parse_model_config(const Json& j, const std::string& source = "<memory>");
ModelConfig load_model_config(const std::filesystem::path& path);

/// Builds the model and spot-checks it on a grid over the domain box: coefficients must be finite,
/// nonnegative killing, PSD covariance, valid measure parameters and no jumps between neighbouring probes.
StateModel build_model(const ModelConfig& config);
StateModel load_model(const std::filesystem::path& path);

}  // namespace symbolkit
