#include "symbolkit/state_model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "symbolkit/errors.hpp"

namespace symbolkit {

namespace {

std::span<const double> as_span(const Vec& x) { return {x.data(), static_cast<std::size_t>(x.size())}; }

std::string point_string(const Vec& x) {
    std::ostringstream os;
    os.precision(6);
    os << "(";
    for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
    os << ")";
    return os.str();
}

void check_expression_dim(const Expression& e, int dim, const std::string& what) {
    if (e.required_dim() > dim)
        throw ModelError(what + " refers to x" + std::to_string(e.required_dim()) + " but the model has dimension " +
                         std::to_string(dim));
    if (e.depends_on_jump()) throw ModelError(what + " may not use the jump variable y");
}

}  // namespace

std::string to_string(ModelMode mode) {
    switch (mode) {
        case ModelMode::levy: return "levy";
        case ModelMode::autonomous: return "autonomous";
        case ModelMode::sde: return "sde";
    }
    return "?";
}

bool Box::contains(const Vec& x) const {
    if (x.size() != lower.size()) return false;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (x(i) < lower(i) || x(i) > upper(i)) return false;
    return true;
}

StateModel::StateModel(StateModelSpec spec) : spec_(std::move(spec)) {
    const int d = spec_.dim;
    if (d < 1) throw ModelError("model dimension must be at least 1");
    if (spec_.domain.lower.size() == 0) {
        spec_.domain.lower = Vec::Constant(d, -1e12);
        spec_.domain.upper = Vec::Constant(d, 1e12);
    }
    if (spec_.domain.lower.size() != d || spec_.domain.upper.size() != d)
        throw ModelError("domain box must have one bound per coordinate");
    for (int i = 0; i < d; ++i)
        if (!(spec_.domain.lower(i) < spec_.domain.upper(i))) throw ModelError("domain box lower bound must be below upper bound");
    if (spec_.cutoff.kind() == CutoffFunction::Kind::product_indicator && spec_.cutoff.radii().size() != d &&
        spec_.mode != ModelMode::sde)
        throw ModelError("product cut-off needs one radius per coordinate");

    bool state_free = true;
    if (spec_.mode == ModelMode::sde) {
        if (!spec_.sde) throw ModelError("sde mode requires an sde block");
        spec_.sde->driver.validate();
        const int m = spec_.sde->driver.dim();
        if (static_cast<int>(spec_.sde->f.size()) != d) throw ModelError("sde coefficient f must have d rows");
        for (const auto& row : spec_.sde->f) {
            if (static_cast<int>(row.size()) != m) throw ModelError("sde coefficient f must have one column per driver coordinate");
            for (const Expression& e : row) {
                check_expression_dim(e, d, "sde coefficient f");
                state_free = state_free && e.is_constant();
            }
        }
        constant_ = state_free;
        return;
    }

    if (spec_.drift.empty()) spec_.drift.assign(d, Expression::constant(0.0));
    if (spec_.covariance.empty()) spec_.covariance.assign(d, std::vector<Expression>(d, Expression::constant(0.0)));
    if (static_cast<int>(spec_.drift.size()) != d) throw ModelError("drift must have d entries");
    if (static_cast<int>(spec_.covariance.size()) != d) throw ModelError("covariance must be d x d");
    for (const auto& row : spec_.covariance)
        if (static_cast<int>(row.size()) != d) throw ModelError("covariance must be d x d");

    auto track = [&](const Expression& e, const std::string& what) {
        check_expression_dim(e, d, what);
        state_free = state_free && e.is_constant();
    };
    track(spec_.killing_rate, "killing_rate");
    for (const Expression& e : spec_.drift) track(e, "drift");
    for (const auto& row : spec_.covariance)
        for (const Expression& e : row) track(e, "covariance");

    const MeasureSpec& ms = spec_.measure;
    bool measure_free = true;
    switch (ms.kind) {
        case LevyMeasure::Kind::zero: break;
        case LevyMeasure::Kind::discrete:
            for (const AtomSpec& a : ms.atoms) {
                if (static_cast<int>(a.jump.size()) != d) throw ModelError("atom jump must have d entries");
                for (const Expression& e : a.jump) {
                    check_expression_dim(e, d, "atom jump");
                    measure_free = measure_free && e.is_constant();
                }
                check_expression_dim(a.rate, d, "atom rate");
                measure_free = measure_free && a.rate.is_constant();
            }
            break;
        case LevyMeasure::Kind::alpha_stable:
            if (d != 1) throw ModelError("alpha_stable Levy measures are one-dimensional");
            check_expression_dim(ms.alpha, d, "alpha");
            check_expression_dim(ms.scale, d, "scale");
            measure_free = ms.alpha.is_constant() && ms.scale.is_constant();
            break;
        case LevyMeasure::Kind::density:
            if (d != 1) throw ModelError("density Levy measures are one-dimensional");
            if (ms.density.required_dim() > d) throw ModelError("density refers to a coordinate beyond the model dimension");
            measure_free = !ms.density.depends_on_state();
            break;
    }
    if (measure_free) {
        const Vec c = spec_.domain.center();
        double q_trace = 0.0;
        for (int i = 0; i < d; ++i) q_trace += spec_.covariance[i][i].evaluate(as_span(c));
        cached_measure_ = build_measure(c, q_trace);
    }
    constant_ = state_free && measure_free;
    if (constant_) {
        fixed_ = triplet_at(spec_.domain.center());
    }
}

StateModel StateModel::from_triplet(const LevyTriplet& triplet, std::string name) {
    triplet.validate();
    const int d = triplet.dim();
    StateModelSpec spec;
    spec.name = std::move(name);
    spec.dim = d;
    spec.mode = ModelMode::levy;
    spec.killing_rate = Expression::constant(triplet.killing_rate);
    for (int i = 0; i < d; ++i) spec.drift.push_back(Expression::constant(triplet.drift(i)));
    spec.covariance.assign(d, {});
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) spec.covariance[i].push_back(Expression::constant(triplet.covariance(i, j)));
    spec.cutoff = triplet.cutoff;
    // The measure is carried over as data; the spec only records its kind.
    spec.measure.kind = LevyMeasure::Kind::zero;
    StateModel model(std::move(spec));
    model.spec_.measure.kind = triplet.measure.kind();
    model.cached_measure_ = triplet.measure;
    model.fixed_ = triplet;
    model.constant_ = true;
    return model;
}

StateModel StateModel::sde_model(const LevyTriplet& driver, std::vector<std::vector<Expression>> f, Box domain,
                                 std::string name) {
    StateModelSpec spec;
    spec.name = std::move(name);
    spec.dim = static_cast<int>(f.size());
    spec.mode = ModelMode::sde;
    spec.sde = SdeSpec{driver, std::move(f)};
    spec.domain = std::move(domain);
    return StateModel(std::move(spec));
}

bool StateModel::drift_depends_on_state() const {
    for (const Expression& e : spec_.drift)
        if (e.depends_on_state()) return true;
    return false;
}

bool StateModel::covariance_depends_on_state() const {
    for (const auto& row : spec_.covariance)
        for (const Expression& e : row)
            if (e.depends_on_state()) return true;
    return false;
}

bool StateModel::measure_depends_on_state() const { return !cached_measure_.has_value(); }

LevyMeasure StateModel::build_measure(const Vec& x, double q_trace) const {
    const MeasureSpec& ms = spec_.measure;
    switch (ms.kind) {
        case LevyMeasure::Kind::zero: return LevyMeasure::zero();
        case LevyMeasure::Kind::discrete: {
            std::vector<Atom> atoms;
            atoms.reserve(ms.atoms.size());
            for (const AtomSpec& a : ms.atoms) {
                Atom atom;
                atom.jump.resize(spec_.dim);
                for (int i = 0; i < spec_.dim; ++i) atom.jump(i) = a.jump[i].evaluate(as_span(x));
                atom.rate = a.rate.evaluate(as_span(x));
                atoms.push_back(std::move(atom));
            }
            return LevyMeasure::discrete(std::move(atoms));
        }
        case LevyMeasure::Kind::alpha_stable:
            return LevyMeasure::alpha_stable(ms.alpha.evaluate(as_span(x)), ms.scale.evaluate(as_span(x)));
        case LevyMeasure::Kind::density: {
            DensityOptions opts;
            opts.eps = ms.eps;
            opts.y_max = ms.y_max;
            opts.covariance_trace = q_trace;
            opts.cutoff_inner_radius = spec_.cutoff.inner_radius();
            const Expression n = ms.density;
            const Vec bound = x;
            return LevyMeasure::density(
                [n, bound](double y) { return n.evaluate({bound.data(), static_cast<std::size_t>(bound.size())}, y); },
                opts);
        }
    }
    return LevyMeasure::zero();
}

void StateModel::coefficients_at(const Vec& x, LocalCoefficients& out) const {
    const int d = spec_.dim;
    const auto xs = as_span(x);
    out.killing_rate = spec_.killing_rate.evaluate(xs);
    out.drift.resize(d);
    for (int i = 0; i < d; ++i) out.drift(i) = spec_.drift[i].evaluate(xs);
    out.covariance.resize(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) out.covariance(i, j) = spec_.covariance[i][j].evaluate(xs);
    const MeasureSpec& ms = spec_.measure;
    if (ms.kind == LevyMeasure::Kind::alpha_stable) {
        out.alpha = ms.alpha.evaluate(xs);
        out.scale = ms.scale.evaluate(xs);
    } else if (ms.kind == LevyMeasure::Kind::discrete) {
        out.atoms.resize(ms.atoms.size());
        for (std::size_t k = 0; k < ms.atoms.size(); ++k) {
            out.atoms[k].jump.resize(d);
            for (int i = 0; i < d; ++i) out.atoms[k].jump(i) = ms.atoms[k].jump[i].evaluate(xs);
            out.atoms[k].rate = ms.atoms[k].rate.evaluate(xs);
        }
    }
}

double StateModel::killing_rate_at(const Vec& x) const {
    if (spec_.mode == ModelMode::sde) return spec_.sde->driver.killing_rate;
    return spec_.killing_rate.evaluate(as_span(x));
}

Vec StateModel::drift_at(const Vec& x) const {
    Vec l(spec_.dim);
    for (int i = 0; i < spec_.dim; ++i) l(i) = spec_.drift[i].evaluate(as_span(x));
    return l;
}

Mat StateModel::f_at(const Vec& x) const {
    if (!spec_.sde) throw ModelError("model has no sde coefficient");
    const auto& f = spec_.sde->f;
    const int m = spec_.sde->driver.dim();
    Mat out(spec_.dim, m);
    for (int i = 0; i < spec_.dim; ++i)
        for (int j = 0; j < m; ++j) out(i, j) = f[i][j].evaluate(as_span(x));
    return out;
}

LevyTriplet StateModel::triplet_at(const Vec& x) const {
    if (spec_.mode == ModelMode::sde) throw ModelError("triplet_at is not available in sde mode");
    if (fixed_) return *fixed_;
    if (x.size() != spec_.dim) throw ModelError("state dimension does not match the model");
    LevyTriplet t;
    const auto xs = as_span(x);
    t.killing_rate = spec_.killing_rate.evaluate(xs);
    t.drift = drift_at(x);
    t.covariance.resize(spec_.dim, spec_.dim);
    for (int i = 0; i < spec_.dim; ++i)
        for (int j = 0; j < spec_.dim; ++j) t.covariance(i, j) = spec_.covariance[i][j].evaluate(xs);
    t.cutoff = spec_.cutoff;
    t.measure = cached_measure_ ? *cached_measure_ : build_measure(x, t.covariance.trace());
    try {
        t.validate();
    } catch (const ModelError& e) {
        throw ModelError(std::string(e.what()) + " at x=" + point_string(x));
    }
    return t;
}

ExponentValue eval_symbol_detailed(const StateModel& model, const Vec& x, const Vec& xi) {
    if (xi.size() != model.dim()) throw ModelError("frequency dimension does not match the model");
    if (model.mode() == ModelMode::sde) {
        const Mat f = model.f_at(x);
        return eval_exponent_detailed(model.sde()->driver, f.transpose() * xi);
    }
    if (const LevyTriplet* t = model.constant_triplet()) return eval_exponent_detailed(*t, xi);
    return eval_exponent_detailed(model.triplet_at(x), xi);
}

Complex eval_symbol(const StateModel& model, const Vec& x, const Vec& xi) {
    return eval_symbol_detailed(model, x, xi).value;
}

namespace {

std::string describe_grid(const std::vector<Vec>& x_grid, const std::vector<Vec>& xi_grid) {
    std::ostringstream os;
    os.precision(6);
    double xi_max = 0.0;
    for (const Vec& v : xi_grid) xi_max = std::max(xi_max, v.norm());
    os << "x points: " << x_grid.size() << ", xi points: " << xi_grid.size() << ", max |xi| = " << xi_max;
    return os.str();
}

}  // namespace

ConditionEstimate check_growth(const StateModel& model, const std::vector<Vec>& x_grid, const std::vector<Vec>& xi_grid) {
    if (x_grid.empty() || xi_grid.empty()) throw ModelError("growth check needs nonempty grids");
    ConditionEstimate est;
    est.n_x = x_grid.size();
    est.n_xi = xi_grid.size();
    est.grid_spec = describe_grid(x_grid, xi_grid);
    est.constant = -1.0;
    for (const Vec& x : x_grid) {
        for (const Vec& xi : xi_grid) {
            const double ratio = std::abs(eval_symbol(model, x, xi)) / (1.0 + xi.squaredNorm());
            if (ratio > est.constant) {
                est.constant = ratio;
                est.witness_x = x;
                est.witness_xi = xi;
            }
        }
    }
    est.satisfied = std::isfinite(est.constant);
    return est;
}

ConditionEstimate check_sector(const StateModel& model, const std::vector<Vec>& x_grid, const std::vector<Vec>& xi_grid) {
    if (x_grid.empty() || xi_grid.empty()) throw ModelError("sector check needs nonempty grids");
    ConditionEstimate est;
    est.n_x = x_grid.size();
    est.n_xi = xi_grid.size();
    est.grid_spec = describe_grid(x_grid, xi_grid);
    est.constant = 0.0;
    est.witness_x = x_grid.front();
    est.witness_xi = xi_grid.front();
    bool have_witness = false;
    for (const Vec& x : x_grid) {
        for (const Vec& xi : xi_grid) {
            const Complex p = eval_symbol(model, x, xi);
            if (p.real() > 1e-12) {
                const double ratio = std::abs(p.imag()) / p.real();
                if (!have_witness || ratio > est.constant) {
                    est.constant = ratio;
                    est.witness_x = x;
                    est.witness_xi = xi;
                    have_witness = true;
                }
            } else if (std::abs(p.imag()) > 1e-9) {
                if (est.satisfied) {
                    est.witness_x = x;
                    est.witness_xi = xi;
                }
                est.satisfied = false;
            }
        }
    }
    if (!est.satisfied) est.constant = std::numeric_limits<double>::infinity();
    return est;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    if (n == 1) {
        out[0] = a;
        return out;
    }
    for (int k = 0; k < n; ++k) out[k] = a + (b - a) * k / (n - 1);
    out.back() = b;
    return out;
}

std::vector<double> logspace(double a, double b, int n) {
    std::vector<double> e = linspace(std::log10(a), std::log10(b), n);
    for (double& v : e) v = std::pow(10.0, v);
    e.front() = a;
    e.back() = b;
    return e;
}

std::vector<Vec> tensor_grid(const Vec& lower, const Vec& upper, int n_per_axis) {
    const int d = static_cast<int>(lower.size());
    std::vector<std::vector<double>> axes;
    for (int i = 0; i < d; ++i) axes.push_back(linspace(lower(i), upper(i), n_per_axis));
    std::vector<Vec> out;
    std::vector<int> idx(d, 0);
    for (;;) {
        Vec p(d);
        for (int i = 0; i < d; ++i) p(i) = axes[i][idx[i]];
        out.push_back(p);
        int k = 0;
        while (k < d && ++idx[k] == n_per_axis) idx[k++] = 0;
        if (k == d) break;
    }
    return out;
}

}  // namespace symbolkit
