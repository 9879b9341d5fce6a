#include "symbolkit/model_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "symbolkit/errors.hpp"
#include "symbolkit/format.hpp"

namespace symbolkit {

namespace {

void only_fields(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(where, "must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string name = where.empty() ? it.key() : where + "." + it.key();
        if (!ok.count(it.key())) throw ConfigError(name, "unknown field");
    }
}

std::string join(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

double number(const Json& j, const std::string& field) {
    if (!j.is_number()) throw ConfigError(field, "must be a number");
    return j.get<double>();
}

Expression expr(const Json& j, const std::string& field, int dim, bool allow_y = false) {
    ParseOptions opt;
    opt.dim = dim;
    opt.allow_jump_variable = allow_y;
    if (j.is_number()) return Expression::constant(j.get<double>());
    if (!j.is_string()) throw ConfigError(field, "must be an expression string or a number");
    try {
        return parse_expression(j.get<std::string>(), opt);
    } catch (const ParseError& e) {
        throw ConfigError(field, e.what());
    }
}

std::vector<Expression> expr_vector(const Json& j, const std::string& field, int n, int dim) {
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        throw ConfigError(field, "must be an array of " + std::to_string(n) + " expressions");
    std::vector<Expression> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(expr(j[i], field + "[" + std::to_string(i) + "]", dim));
    return out;
}

std::vector<std::vector<Expression>> expr_matrix(const Json& j, const std::string& field, int rows, int cols,
                                                 int dim) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows)
        throw ConfigError(field, "must have " + std::to_string(rows) + " rows");
    std::vector<std::vector<Expression>> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(expr_vector(j[i], field + "[" + std::to_string(i) + "]", cols, dim));
    return out;
}

Vec number_vector(const Json& j, const std::string& field, int n) {
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        throw ConfigError(field, "must be an array of " + std::to_string(n) + " numbers");
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = number(j[i], field + "[" + std::to_string(i) + "]");
    return v;
}

MeasureSpec parse_measure(const Json& j, const std::string& where, int dim) {
    MeasureSpec m;
    if (!j.is_object()) throw ConfigError(where, "must be an object");
    if (!j.contains("kind")) throw ConfigError(join(where, "kind"), "missing");
    const std::string kind = j["kind"].is_string() ? j["kind"].get<std::string>() : "";
    if (kind == "zero") {
        only_fields(j, where, {"kind"});
        m.kind = LevyMeasure::Kind::zero;
    } else if (kind == "discrete") {
        only_fields(j, where, {"kind", "atoms"});
        m.kind = LevyMeasure::Kind::discrete;
        const std::string f = join(where, "atoms");
        if (!j.contains("atoms") || !j["atoms"].is_array() || j["atoms"].empty())
            throw ConfigError(f, "must be a nonempty array");
        for (std::size_t i = 0; i < j["atoms"].size(); ++i) {
            const std::string fi = f + "[" + std::to_string(i) + "]";
            const Json& a = j["atoms"][i];
            only_fields(a, fi, {"jump", "rate"});
            if (!a.contains("jump") || !a.contains("rate")) throw ConfigError(fi, "needs jump and rate");
            AtomSpec s;
            s.jump = expr_vector(a["jump"], fi + ".jump", dim, dim);
            s.rate = expr(a["rate"], fi + ".rate", dim);
            m.atoms.push_back(std::move(s));
        }
    } else if (kind == "stable") {
        only_fields(j, where, {"kind", "alpha", "scale"});
        m.kind = LevyMeasure::Kind::alpha_stable;
        if (!j.contains("alpha")) throw ConfigError(join(where, "alpha"), "missing");
        m.alpha = expr(j["alpha"], join(where, "alpha"), dim);
        m.scale = j.contains("scale") ? expr(j["scale"], join(where, "scale"), dim) : Expression::constant(1.0);
    } else if (kind == "density") {
        only_fields(j, where, {"kind", "density", "eps", "y_max"});
        m.kind = LevyMeasure::Kind::density;
        if (!j.contains("density")) throw ConfigError(join(where, "density"), "missing");
        m.density = expr(j["density"], join(where, "density"), dim, true);
        if (j.contains("eps")) m.eps = number(j["eps"], join(where, "eps"));
        if (j.contains("y_max")) m.y_max = number(j["y_max"], join(where, "y_max"));
    } else {
        throw ConfigError(join(where, "kind"), "must be one of zero, discrete, stable, density");
    }
    return m;
}

CutoffFunction parse_cutoff(const Json& j, const std::string& where, int dim) {
    only_fields(j, where, {"kind", "radius", "radii"});
    const std::string kind = j.contains("kind") && j["kind"].is_string() ? j["kind"].get<std::string>() : "ball";
    try {
        if (kind == "ball") {
            if (j.contains("radii")) throw ConfigError(join(where, "radii"), "not used by a ball cut-off");
            return CutoffFunction::ball(j.contains("radius") ? number(j["radius"], join(where, "radius")) : 1.0);
        }
        if (kind == "product") {
            if (!j.contains("radii")) throw ConfigError(join(where, "radii"), "missing");
            return CutoffFunction::product(number_vector(j["radii"], join(where, "radii"), dim));
        }
    } catch (const ModelError& e) {
        throw ConfigError(where, e.what());
    }
    throw ConfigError(join(where, "kind"), "must be ball or product");
}

// Coefficient block shared by the model and the sde driver.
void parse_coefficients(const Json& j, const std::string& where, int dim, StateModelSpec& s) {
    auto f = [&](const char* key) { return join(where, key); };
    s.killing_rate = j.contains("killing_rate") ? expr(j["killing_rate"], f("killing_rate"), dim) : Expression::constant(0.0);
    if (j.contains("drift")) s.drift = expr_vector(j["drift"], f("drift"), dim, dim);
    if (j.contains("covariance")) s.covariance = expr_matrix(j["covariance"], f("covariance"), dim, dim, dim);
    if (j.contains("measure")) s.measure = parse_measure(j["measure"], f("measure"), dim);
    if (j.contains("cutoff")) s.cutoff = parse_cutoff(j["cutoff"], f("cutoff"), dim);
}

int parse_dim(const Json& j, const std::string& field) {
    if (!j.contains("dim")) throw ConfigError(field, "missing");
    const Json& v = j["dim"];
    if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > 64)
        throw ConfigError(field, "must be an integer in [1, 64]");
    return v.get<int>();
}

std::string point_text(const Vec& x) {
    std::string s = "(";
    for (Eigen::Index i = 0; i < x.size(); ++i) s += (i ? ", " : "") + format_number(x(i));
    return s + ")";
}

// Probe window: the domain box, clipped to [-10, 10] per axis where the box is effectively unbounded.
Box probe_box(const Box& b) {
    Box out = b;
    for (Eigen::Index i = 0; i < b.lower.size(); ++i) {
        if (b.lower(i) < -1e6) out.lower(i) = std::min(-10.0, b.upper(i) - 20.0);
        if (b.upper(i) > 1e6) out.upper(i) = std::max(10.0, out.lower(i) + 20.0);
    }
    return out;
}

std::vector<double> coefficient_vector(const StateModel& model, const Vec& x) {
    std::vector<double> out;
    if (model.mode() == ModelMode::sde) {
        const Mat f = model.f_at(x);
        out.assign(f.data(), f.data() + f.size());
        return out;
    }
    LocalCoefficients c;
    model.coefficients_at(x, c);
    out.push_back(c.killing_rate);
    out.insert(out.end(), c.drift.data(), c.drift.data() + c.drift.size());
    out.insert(out.end(), c.covariance.data(), c.covariance.data() + c.covariance.size());
    out.push_back(c.alpha);
    out.push_back(c.scale);
    for (const Atom& a : c.atoms) {
        out.push_back(a.rate);
        out.insert(out.end(), a.jump.data(), a.jump.data() + a.jump.size());
    }
    return out;
}

void spot_check(const StateModel& model) {
    const int d = model.dim();
    const int n = d == 1 ? 21 : d == 2 ? 9 : d == 3 ? 5 : 3;
    const Box box = probe_box(model.domain());
    const Vec width = box.upper - box.lower;
    for (const Vec& x : tensor_grid(box.lower, box.upper, n)) {
        std::vector<double> c;
        try {
            if (model.mode() != ModelMode::sde) {
                const double a = model.killing_rate_at(x);
                if (a < 0.0) throw ModelError("killing_rate negative at x=" + point_text(x));
                (void)model.triplet_at(x);
            }
            c = coefficient_vector(model, x);
        } catch (const DomainError& e) {
            throw ModelError(std::string(e.what()) + " at x=" + point_text(x));
        }
        for (double v : c)
            if (!std::isfinite(v)) throw ModelError("coefficient not finite at x=" + point_text(x));
        // Neighbouring probe inside the box: coefficients may not jump.
        for (int i = 0; i < d; ++i) {
            Vec y = x;
            const double h = 1e-7 * width(i);
            y(i) += y(i) + h <= box.upper(i) ? h : -h;
            std::vector<double> cy;
            try {
                cy = coefficient_vector(model, y);
            } catch (const DomainError& e) {
                throw ModelError(std::string(e.what()) + " at x=" + point_text(y));
            }
            for (std::size_t k = 0; k < c.size() && k < cy.size(); ++k)
                if (!(std::abs(cy[k] - c[k]) <= 1e-3 * (1.0 + std::abs(c[k]))))
                    throw ModelError("coefficient discontinuous near x=" + point_text(x));
        }
    }
}

}  // namespace

ModelConfig parse_model_config(const Json& j, const std::string& source) {
    only_fields(j, "", {"schema", "name", "dim", "mode", "killing_rate", "drift", "covariance", "measure", "cutoff",
                        "sde", "domain", "simulation"});
    if (!j.contains("schema") || !j["schema"].is_string()) throw ConfigError("schema", "missing");
    if (j["schema"].get<std::string>() != kModelSchema)
        throw ConfigError("schema", "expected " + std::string(kModelSchema) + ", got " + j["schema"].get<std::string>());

    ModelConfig cfg;
    cfg.source = source;
    StateModelSpec& s = cfg.spec;
    const int d = parse_dim(j, "dim");
    s.dim = d;
    s.name = j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>() : std::filesystem::path(source).stem().string();
    const std::string mode = j.contains("mode") && j["mode"].is_string() ? j["mode"].get<std::string>() : "autonomous";
    if (mode == "levy")
        s.mode = ModelMode::levy;
    else if (mode == "autonomous")
        s.mode = ModelMode::autonomous;
    else if (mode == "sde")
        s.mode = ModelMode::sde;
    else
        throw ConfigError("mode", "must be levy, autonomous or sde");

    if (j.contains("domain")) {
        only_fields(j["domain"], "domain", {"lower", "upper"});
        if (!j["domain"].contains("lower") || !j["domain"].contains("upper")) throw ConfigError("domain", "needs lower and upper");
        s.domain.lower = number_vector(j["domain"]["lower"], "domain.lower", d);
        s.domain.upper = number_vector(j["domain"]["upper"], "domain.upper", d);
    }

    if (s.mode == ModelMode::sde) {
        for (const char* k : {"killing_rate", "drift", "covariance", "measure", "cutoff"})
            if (j.contains(k)) throw ConfigError(k, "not used in sde mode (set it in the sde driver)");
        if (!j.contains("sde")) throw ConfigError("sde", "missing");
        const Json& b = j["sde"];
        only_fields(b, "sde", {"driver", "f"});
        if (!b.contains("driver") || !b.contains("f")) throw ConfigError("sde", "needs driver and f");
        const Json& dj = b["driver"];
        only_fields(dj, "sde.driver", {"dim", "killing_rate", "drift", "covariance", "measure", "cutoff"});
        const int m = dj.contains("dim") ? parse_dim(dj, "sde.driver.dim") : d;
        StateModelSpec ds;
        ds.dim = m;
        ds.mode = ModelMode::levy;
        parse_coefficients(dj, "sde.driver", m, ds);
        try {
            const StateModel driver(std::move(ds));
            if (!driver.constant_triplet()) throw ConfigError("sde.driver", "coefficients must be constants");
            SdeSpec sde;
            sde.driver = *driver.constant_triplet();
            sde.f = expr_matrix(b["f"], "sde.f", d, m, d);
            s.sde = std::move(sde);
        } catch (const ModelError& e) {
            throw ConfigError("sde.driver", e.what());
        }
    } else {
        if (j.contains("sde")) throw ConfigError("sde", "only used in sde mode");
        parse_coefficients(j, "", d, s);
    }

    Vec x0 = Vec::Zero(d);
    if (s.domain.lower.size() == d) {
        const Vec c = s.domain.center();
        for (int i = 0; i < d; ++i) x0(i) = std::isfinite(c(i)) ? c(i) : 0.0;
    }
    SimSpec& sim = cfg.simulation;
    sim.x0 = x0;
    if (j.contains("simulation")) {
        const Json& sj = j["simulation"];
        only_fields(sj, "simulation", {"x0", "horizon", "dt", "paths", "seed", "explosion_threshold", "small_jump_cut"});
        if (sj.contains("x0")) sim.x0 = number_vector(sj["x0"], "simulation.x0", d);
        if (sj.contains("horizon")) sim.horizon = number(sj["horizon"], "simulation.horizon");
        if (sj.contains("dt")) sim.dt = number(sj["dt"], "simulation.dt");
        if (sj.contains("paths")) {
            if (!sj["paths"].is_number_unsigned() || sj["paths"].get<unsigned long long>() == 0)
                throw ConfigError("simulation.paths", "must be a positive integer");
            sim.n_paths = sj["paths"].get<std::size_t>();
        }
        if (sj.contains("seed")) {
            if (!sj["seed"].is_number_unsigned()) throw ConfigError("simulation.seed", "must be a nonnegative integer");
            sim.seed = sj["seed"].get<std::uint64_t>();
        }
        if (sj.contains("explosion_threshold"))
            sim.explosion_threshold = number(sj["explosion_threshold"], "simulation.explosion_threshold");
        if (sj.contains("small_jump_cut")) sim.small_jump_cut = number(sj["small_jump_cut"], "simulation.small_jump_cut");
    }
    return cfg;
}

ModelConfig load_model_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("model", "cannot open " + path.string());
    Json j;
    try {
        j = Json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("model", std::string("invalid JSON: ") + e.what());
    }
    return parse_model_config(j, path.string());
}

StateModel build_model(const ModelConfig& config) {
    // Sign of a(x) first, so constant and state-dependent rates fail with the same message.
    const StateModelSpec& spec = config.spec;
    if (spec.mode != ModelMode::sde) {
        const Box domain = spec.domain.dim() == spec.dim
                               ? spec.domain
                               : Box{Vec::Constant(spec.dim, -1e12), Vec::Constant(spec.dim, 1e12)};
        const Box box = probe_box(domain);
        const int n = spec.dim == 1 ? 21 : spec.dim == 2 ? 9 : spec.dim == 3 ? 5 : 3;
        for (const Vec& x : tensor_grid(box.lower, box.upper, n)) {
            double a = 0.0;
            try {
                a = spec.killing_rate.evaluate(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
            } catch (const DomainError& e) {
                throw ModelError(std::string(e.what()) + " at x=" + point_text(x));
            }
            if (a < 0.0) throw ModelError("killing_rate negative at x=" + point_text(x));
        }
    }
    StateModel model(spec);
    spot_check(model);
    return model;
}

StateModel load_model(const std::filesystem::path& path) { return build_model(load_model_config(path)); }

}  // namespace symbolkit
