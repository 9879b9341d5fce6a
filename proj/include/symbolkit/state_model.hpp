#pragma once

// State-dependent Levy-Khintchine data, the symbol p(x, xi) and grid checks
// of the growth and sector conditions.

#include <optional>
#include <string>
#include <vector>

#include "symbolkit/expression.hpp"
#include "symbolkit/triplet.hpp"

namespace symbolkit {

enum class ModelMode { levy, autonomous, sde };

std::string to_string(ModelMode mode);

struct Box {
    Vec lower;
    Vec upper;

    bool contains(const Vec& x) const;
    Vec center() const { return 0.5 * (lower + upper); }
    int dim() const { return static_cast<int>(lower.size()); }
};

struct AtomSpec {
    std::vector<Expression> jump;
    Expression rate;
};

struct MeasureSpec {
    LevyMeasure::Kind kind = LevyMeasure::Kind::zero;
    std::vector<AtomSpec> atoms;
    Expression alpha;
    Expression scale;
    /// Density n(y) in the jump variable y (and possibly the state).
    Expression density;
    std::optional<double> eps;
    double y_max = 1.0;
};

struct SdeSpec {
    LevyTriplet driver;
    /// d x m coefficient matrix; f[i][j].
    std::vector<std::vector<Expression>> f;
};

struct StateModelSpec {
    std::string name;
    int dim = 1;
    ModelMode mode = ModelMode::autonomous;
    Expression killing_rate;
    std::vector<Expression> drift;
    std::vector<std::vector<Expression>> covariance;
    MeasureSpec measure;
    CutoffFunction cutoff = CutoffFunction::ball();
    std::optional<SdeSpec> sde;
    Box domain;
};

/// Coefficients of a model at one state, in a form suited to per-step use.
struct LocalCoefficients {
    double killing_rate = 0.0;
    Vec drift;
    Mat covariance;
    double alpha = 0.0;
    double scale = 0.0;
    std::vector<Atom> atoms;
};

class StateModel {
public:
    explicit StateModel(StateModelSpec spec);
    /// Constant model in Levy mode; the domain defaults to a large box.
    static StateModel from_triplet(const LevyTriplet& triplet, std::string name = "levy");
    /// SDE model x -> f(x) dZ with driver Z.
    static StateModel sde_model(const LevyTriplet& driver, std::vector<std::vector<Expression>> f, Box domain,
                                std::string name = "sde");

    const StateModelSpec& spec() const { return spec_; }
    const std::string& name() const { return spec_.name; }
    int dim() const { return spec_.dim; }
    ModelMode mode() const { return spec_.mode; }
    const Box& domain() const { return spec_.domain; }
    const CutoffFunction& cutoff() const { return spec_.cutoff; }
    const SdeSpec* sde() const { return spec_.sde ? &*spec_.sde : nullptr; }

    /// True when no coefficient depends on the state.
    bool is_constant() const { return constant_; }
    bool killing_depends_on_state() const { return spec_.killing_rate.depends_on_state(); }
    bool drift_depends_on_state() const;
    bool covariance_depends_on_state() const;
    bool measure_depends_on_state() const;

    /// Frozen triplet at x (Levy and autonomous modes). Throws DomainError / ModelError.
    LevyTriplet triplet_at(const Vec& x) const;
    /// Killing rate, drift, covariance and parametric measure data at x without building a triplet.
    void coefficients_at(const Vec& x, LocalCoefficients& out) const;
    double killing_rate_at(const Vec& x) const;
    Vec drift_at(const Vec& x) const;
    /// SDE coefficient f(x) (d x m).
    Mat f_at(const Vec& x) const;

    /// The triplet for constant models (Levy or autonomous mode), null otherwise.
    const LevyTriplet* constant_triplet() const { return fixed_ ? &*fixed_ : nullptr; }

private:
    LevyMeasure build_measure(const Vec& x, double q_trace) const;

    StateModelSpec spec_;
    bool constant_ = false;
    std::optional<LevyTriplet> fixed_;
    std::optional<LevyMeasure> cached_measure_;
};

/// p(x, xi): the exponent of the triplet frozen at x; psi(f(x)'xi) in SDE mode.
Complex eval_symbol(const StateModel& model, const Vec& x, const Vec& xi);
ExponentValue eval_symbol_detailed(const StateModel& model, const Vec& x, const Vec& xi);

struct ConditionEstimate {
    double constant = 0.0;
    Vec witness_x;
    Vec witness_xi;
    bool satisfied = true;
    std::size_t n_x = 0;
    std::size_t n_xi = 0;
    std::string grid_spec;
};

ConditionEstimate check_growth(const StateModel& model, const std::vector<Vec>& x_grid, const std::vector<Vec>& xi_grid);
ConditionEstimate check_sector(const StateModel& model, const std::vector<Vec>& x_grid, const std::vector<Vec>& xi_grid);

/// Tensor grid with n points per axis on [lower, upper].
std::vector<Vec> tensor_grid(const Vec& lower, const Vec& upper, int n_per_axis);
std::vector<double> linspace(double a, double b, int n);
std::vector<double> logspace(double a, double b, int n);

}  // namespace symbolkit
