#pragma once

// Models shared by the unit tests and the acceptance suite.

#include <string>

#include "symbolkit/model_config.hpp"

namespace fixtures {

using symbolkit::LevyMeasure;
using symbolkit::LevyTriplet;
using symbolkit::Mat;
using symbolkit::StateModel;
using symbolkit::Vec;

inline Vec vec1(double v) { return Vec::Constant(1, v); }

inline LevyTriplet bm_triplet(double q = 1.0, double drift = 0.0, double a = 0.0) {
    LevyTriplet t = LevyTriplet::zero(1);
    t.covariance(0, 0) = q;
    t.drift(0) = drift;
    t.killing_rate = a;
    return t;
}

inline LevyTriplet stable_triplet(double alpha, double scale = 1.0) {
    LevyTriplet t = LevyTriplet::zero(1);
    t.measure = LevyMeasure::alpha_stable(alpha, scale);
    return t;
}

inline LevyTriplet poisson_triplet(double rate, double jump) {
    LevyTriplet t = LevyTriplet::zero(1);
    t.measure = LevyMeasure::discrete({{vec1(jump), rate}});
    return t;
}

inline LevyTriplet killing_triplet(double a) {
    LevyTriplet t = LevyTriplet::zero(1);
    t.killing_rate = a;
    return t;
}

inline StateModel levy(const LevyTriplet& t, const std::string& name = "levy") {
    return StateModel::from_triplet(t, name);
}

/// Builds a model from a JSON model document (schema line added here).
inline StateModel from_json(const std::string& body) {
    symbolkit::Json j = symbolkit::Json::parse(body);
    j["schema"] = symbolkit::kModelSchema;
    return symbolkit::build_model(symbolkit::parse_model_config(j));
}

/// a(x) = x^2 with unit drift, no diffusion: X_t = t, survival exp(-t^3/3).
inline StateModel quadratic_killing() {
    return from_json(R"j({"dim": 1, "mode": "autonomous", "killing_rate": "x1^2", "drift": ["1"],
                         "domain": {"lower": [-10], "upper": [10]}})j");
}

/// a(x) = 1 + sin(x)^2, Q = 1.
inline StateModel sine_killing() {
    return from_json(R"j({"dim": 1, "mode": "autonomous", "killing_rate": "1 + sin(x1)^2",
                         "covariance": [["1"]]})j");
}

/// alpha(x) = 0.3 + 0.4/(1+x^2) on [-100, 100].
inline StateModel stable_like() {
    return from_json(R"j({"dim": 1, "mode": "autonomous",
                         "measure": {"kind": "stable", "alpha": "0.3 + 0.4/(1+x1^2)", "scale": "1"},
                         "domain": {"lower": [-100], "upper": [100]}})j");
}

/// dX = X dZ with a standard Cauchy driver.
inline StateModel sde_cauchy() {
    return from_json(R"j({"dim": 1, "mode": "sde",
                         "sde": {"driver": {"measure": {"kind": "stable", "alpha": "1"}}, "f": [["x1"]]}})j");
}

}  // namespace fixtures
