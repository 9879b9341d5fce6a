// Command-line front end: simulate, symbol, indices, conditions, verify, scaling.
// Exit codes: 0 success, 1 check failure, 2 usage or configuration error.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "symbolkit/errors.hpp"
#include "symbolkit/format.hpp"
#include "symbolkit/indices.hpp"
#include "symbolkit/json_io.hpp"
#include "symbolkit/martingale_oracle.hpp"
#include "symbolkit/model_config.hpp"
#include "symbolkit/symbol_probe.hpp"

namespace fs = std::filesystem;
using namespace symbolkit;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

struct Common {
    std::string model;
    std::string out = "symbolkit_out";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<double> dt;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--model", c.model, "model file (schema symbolkit-model/1)")->required();
    cmd->add_option("--out", c.out, "output directory")->capture_default_str();
    cmd->add_option("--seed", c.seed, "master seed");
    cmd->add_option("--paths", c.paths, "number of paths / samples");
    cmd->add_option("--dt", c.dt, "time step");
}

Vec parse_vec(const std::string& text, int dim, const std::string& flag) {
    std::vector<double> v;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find(',', pos), text.size());
        std::string item = text.substr(pos, end - pos);
        while (!item.empty() && item.front() == ' ') item.erase(item.begin());
        while (!item.empty() && item.back() == ' ') item.pop_back();
        double x = 0.0;
        const auto r = std::from_chars(item.data(), item.data() + item.size(), x);
        if (item.empty() || r.ec != std::errc() || r.ptr != item.data() + item.size())
            throw ConfigError(flag, "cannot parse '" + text + "' as a comma-separated vector");
        v.push_back(x);
        pos = end + 1;
    }
    if (static_cast<int>(v.size()) != dim)
        throw ConfigError(flag, "expected " + std::to_string(dim) + " coordinates, got " + std::to_string(v.size()));
    return Eigen::Map<Vec>(v.data(), dim);
}

struct Loaded {
    ModelConfig config;
    StateModel model;
    SimSpec sim;
};

Loaded load(const Common& c) {
    ModelConfig cfg = load_model_config(c.model);
    StateModel model = build_model(cfg);
    SimSpec sim = cfg.simulation;
    if (c.seed) sim.seed = *c.seed;
    if (c.paths) sim.n_paths = *c.paths;
    if (c.dt) sim.dt = *c.dt;
    return {std::move(cfg), std::move(model), sim};
}

fs::path out_dir(const Common& c) {
    fs::create_directories(c.out);
    return c.out;
}

Json condition_json(const ConditionEstimate& e) {
    return Json{{"constant", e.constant},
                {"satisfied", e.satisfied},
                {"witness_x", to_json(e.witness_x)},
                {"witness_xi", to_json(e.witness_xi)},
                {"n_x", e.n_x},
                {"n_xi", e.n_xi},
                {"grid", e.grid_spec}};
}

// Directions on the unit sphere used for frequency grids.
std::vector<Vec> directions(int dim) {
    std::vector<Vec> out;
    for (const Vec& v : unit_ball_grid(dim))
        if (std::abs(v.norm() - 1.0) < 1e-12) out.push_back(v);
    return out;
}

std::string fmt(double v) { return format_number(v); }

// ---------------------------------------------------------------------------

struct SimulateArgs {
    Common c;
    std::optional<double> horizon;
    std::optional<std::string> x0;
    std::optional<std::string> sampler;
    std::optional<double> explosion;
    std::optional<double> eps;
};

int run_simulate(const SimulateArgs& a) {
    Loaded L = load(a.c);
    if (a.horizon) L.sim.horizon = *a.horizon;
    if (a.x0) L.sim.x0 = parse_vec(*a.x0, L.model.dim(), "--x0");
    if (a.explosion) L.sim.explosion_threshold = *a.explosion;
    if (a.eps) L.sim.small_jump_cut = *a.eps;
    std::optional<SamplerKind> kind;
    if (a.sampler) {
        if (*a.sampler == "levy") kind = SamplerKind::levy;
        else if (*a.sampler == "autonomous") kind = SamplerKind::autonomous;
        else if (*a.sampler == "sde") kind = SamplerKind::sde;
        else throw ConfigError("--sampler", "must be levy, autonomous or sde");
    }
    const Simulator sim = kind ? Simulator(L.model, L.sim, *kind) : Simulator(L.model, L.sim);
    const Ensemble e = sim.sample();
    const fs::path dir = out_dir(a.c);
    export_ensemble(e, dir, L.model.name());
    std::cout << "simulated " << e.paths.size() << " paths (" << to_string(e.kind) << ", " << sim.n_steps()
              << " steps, " << e.invalid_count << " invalid) -> " << dir.string() << "\n";
    return kOk;
}

struct SymbolArgs {
    Common c;
    std::optional<std::string> x;
    std::vector<std::string> xi;
    double K = 1.0;
    std::vector<double> ladder;
    bool no_extrapolate = false;
    std::vector<double> radii;
    std::optional<double> explosion;
};

int run_symbol(const SymbolArgs& a) {
    Loaded L = load(a.c);
    const int d = L.model.dim();
    const Vec x = a.x ? parse_vec(*a.x, d, "--x") : L.sim.x0;
    std::vector<Vec> xis;
    for (const std::string& s : a.xi) xis.push_back(parse_vec(s, d, "--xi"));
    ProbeSettings ps;
    ps.K_radius = a.K;
    if (!a.ladder.empty()) ps.t_ladder = a.ladder;
    if (a.c.paths) ps.n_samples = *a.c.paths;
    if (a.c.dt) ps.dt = *a.c.dt;
    ps.seed = L.sim.seed;
    ps.extrapolate = !a.no_extrapolate;
    ps.explosion_threshold = a.explosion.value_or(L.sim.explosion_threshold);
    ps.validate();

    const std::vector<SymbolReport> reps = estimate_symbols(L.model, x, xis, ps);
    Json j;
    j["model"] = L.model.name();
    Json arr = Json::array();
    for (const SymbolReport& r : reps) arr.push_back(report_json(r));
    j["reports"] = arr;
    int code = kOk;
    if (!a.radii.empty()) {
        Json ind = Json::array();
        for (const Vec& xi : xis) {
            const IndependenceReport ir = symbol_independence_check(L.model, x, xi, a.radii, ps);
            ind.push_back(report_json(ir));
            if (!ir.consistent) code = kCheckFailed;
            std::cout << "independence xi=" << fmt(xi(0)) << (d > 1 ? ",..." : "") << ": max z "
                      << fmt(ir.max_pair_z) << (ir.consistent ? " consistent" : " INCONSISTENT") << "\n";
        }
        j["independence"] = ind;
    }
    const fs::path dir = out_dir(a.c);
    write_json_file(dir / "symbol.json", j);
    std::ofstream csv(dir / "symbol.csv");
    write_symbol_csv(csv, reps);
    for (const SymbolReport& r : reps) {
        std::cout << "xi=" << fmt(r.xi(0)) << (d > 1 ? ",..." : "") << "  analytic " << fmt(r.analytic.real()) << " "
                  << fmt(r.analytic.imag()) << "i  estimate " << fmt(r.final_estimate.estimate.real()) << " "
                  << fmt(r.final_estimate.estimate.imag()) << "i  stderr " << fmt(r.final_estimate.stderr())
                  << (r.low_confidence ? "  (low confidence)" : "") << "\n";
    }
    return code;
}

struct IndicesArgs {
    Common c;
    std::string direction = "origin";
    double rmin = 1e-2;
    double rmax = 1e2;
    int points = 41;
    std::optional<std::string> x;
    int y_points = 41;
    bool maximal = false;
    std::vector<double> t{0.1, 1.0};
    std::vector<double> R{1.0, 3.0, 10.0};
};

int run_indices(const IndicesArgs& a) {
    Loaded L = load(a.c);
    const int d = L.model.dim();
    IndexDirection dir;
    if (a.direction == "origin") dir = IndexDirection::origin;
    else if (a.direction == "infinity") dir = IndexDirection::infinity;
    else throw ConfigError("--direction", "must be origin or infinity");
    std::optional<Vec> x;
    if (a.x) x = parse_vec(*a.x, d, "--x");
    IndexGridSettings g;
    g.y_points_per_axis = a.y_points;
    const IndexReport rep = estimate_indices(L.model, a.rmin, a.rmax, a.points, dir, x, g);
    const fs::path out = out_dir(a.c);
    write_json_file(out / "indices.json", report_json(rep));
    std::ofstream csv(out / "slopes.csv");
    write_slope_csv(csv, rep);
    if (dir == IndexDirection::origin)
        std::cout << "beta0 " << fmt(rep.beta0) << "  beta0_lower " << fmt(rep.beta0_lower) << "  delta0_upper "
                  << fmt(rep.delta0_upper) << "  delta0 " << fmt(rep.delta0) << "\n";
    else
        std::cout << "beta_inf " << fmt(rep.beta_inf_x) << "  beta_inf_lower " << fmt(rep.beta_inf_x_lower)
                  << "  delta_inf_upper " << fmt(rep.delta_inf_x_upper) << "  delta_inf " << fmt(rep.delta_inf_x)
                  << "\n";
    if (rep.indeterminate || !rep.notes.empty()) std::cout << "note: " << rep.notes << "\n";

    if (a.maximal) {
        McSettings mc;
        mc.n_paths = L.sim.n_paths;
        mc.dt = L.sim.dt;
        mc.seed = L.sim.seed;
        mc.explosion_threshold = L.sim.explosion_threshold;
        const Vec x0 = x ? *x : L.sim.x0;
        const MaximalInequalityReport m = verify_maximal_inequality(L.model, x0, a.t, a.R, mc, g);
        write_json_file(out / "maximal.json", report_json(m));
        std::cout << "maximal inequality: sup ratio1 " << fmt(m.sup_ratio1) << " (half run " << fmt(m.sup_ratio1_half)
                  << ")" << (m.finite && m.stable ? "" : "  UNSTABLE") << "\n";
        if (!(m.finite && m.stable)) return kCheckFailed;
    }
    return kOk;
}

struct ConditionsArgs {
    Common c;
    int grid = 21;
    double xi_min = 1e-2;
    double xi_max = 1e2;
    int xi_points = 25;
};

int run_conditions(const ConditionsArgs& a) {
    Loaded L = load(a.c);
    const int d = L.model.dim();
    Box box = L.model.domain();
    for (int i = 0; i < d; ++i) {
        box.lower(i) = std::max(box.lower(i), -1e3);
        box.upper(i) = std::min(box.upper(i), 1e3);
    }
    const std::vector<Vec> xs = tensor_grid(box.lower, box.upper, a.grid);
    std::vector<Vec> xis;
    for (double r : logspace(a.xi_min, a.xi_max, a.xi_points))
        for (const Vec& v : directions(d)) xis.push_back(r * v);
    const ConditionEstimate growth = check_growth(L.model, xs, xis);
    const ConditionEstimate sector = check_sector(L.model, xs, xis);
    Json j{{"model", L.model.name()}, {"growth", condition_json(growth)}, {"sector", condition_json(sector)}};
    write_json_file(out_dir(a.c) / "conditions.json", j);
    std::cout << "growth constant " << fmt(growth.constant) << "\n";
    std::cout << "sector constant " << fmt(sector.constant) << (sector.satisfied ? "" : "  (not satisfied)") << "\n";
    return kOk;
}

struct VerifyArgs {
    Common c;
    std::string suite = "all";
    std::vector<double> t{0.25, 0.5, 1.0};
    std::vector<std::string> u{"1"};
    std::optional<double> h_radius;
    std::vector<double> radii{1.0, 2.0, 4.0};
    std::optional<std::string> x0;
};

int run_verify(const VerifyArgs& a) {
    const std::vector<std::string> known{"killing", "exponential", "canonical", "consistency", "all"};
    if (std::find(known.begin(), known.end(), a.suite) == known.end())
        throw ConfigError("--suite", "must be killing, exponential, canonical, consistency or all");
    Loaded L = load(a.c);
    const int d = L.model.dim();
    if (a.x0) L.sim.x0 = parse_vec(*a.x0, d, "--x0");
    L.sim.horizon = *std::max_element(a.t.begin(), a.t.end());
    std::vector<Vec> us;
    for (const std::string& s : a.u) us.push_back(parse_vec(s, d, "--u"));
    const bool all = a.suite == "all";
    const bool sde = L.model.mode() == ModelMode::sde;
    Json j{{"model", L.model.name()}, {"seed", L.sim.seed}, {"paths", L.sim.n_paths}, {"dt", L.sim.dt}};
    bool pass = true;
    auto skipped = [&](const char* name) {
        j[name] = Json{{"skipped", "needs a levy or autonomous model"}};
        std::cout << name << ": skipped (sde model)\n";
    };

    if (all || a.suite == "killing") {
        if (sde) {
            skipped("killing");
        } else {
            const CompensatorReport r = killing_compensator_check(L.model, L.sim, a.t);
            Json rj = report_json(r);
            bool ok = r.pass;
            if (L.model.spec().killing_rate.is_constant()) {
                // Closed-form survival e^{-a t} for constant killing.
                const double rate = L.model.killing_rate_at(L.sim.x0);
                Json rows = Json::array();
                for (const CompensatorRow& row : r.rows) {
                    const double s = std::exp(-rate * row.t);
                    const double se = std::sqrt(s * (1.0 - s) / static_cast<double>(r.n_used));
                    const double surv = 1.0 - row.killed_fraction;
                    const bool rp = std::abs(surv - s) <= 3.0 * se;
                    ok = ok && rp;
                    rows.push_back(Json{{"t", row.t}, {"survival", surv}, {"closed_form", s}, {"stderr", se}, {"pass", rp}});
                }
                rj["closed_form_survival"] = rows;
            }
            rj["pass"] = ok;
            j["killing"] = rj;
            pass = pass && ok;
            std::cout << "killing: " << (ok ? "PASS" : "FAIL") << " (" << r.n_used << " paths, " << r.n_excluded
                      << " excluded)\n";
        }
    }
    if (all || a.suite == "exponential") {
        if (sde) {
            skipped("exponential");
        } else {
            const MartingaleReport r = exponential_martingale_check(L.model, L.sim, us, a.t);
            j["exponential"] = report_json(r);
            pass = pass && r.pass;
            std::cout << "exponential (" << to_string(r.form) << "): " << (r.pass ? "PASS" : "FAIL")
                      << (r.oscillation ? " (oscillation flagged)" : "") << "\n";
        }
    }
    if (all || a.suite == "canonical") {
        if (sde) {
            skipped("canonical");
        } else {
            const double h = a.h_radius.value_or(L.model.cutoff().inner_radius());
            const ResidualReport r = canonical_representation_residual(L.model, L.sim, h, a.t);
            j["canonical"] = report_json(r);
            pass = pass && r.pass;
            std::cout << "canonical: " << (r.pass ? "PASS" : "FAIL") << "\n";
        }
    }
    if (all || a.suite == "consistency") {
        ProbeSettings ps;
        ps.n_samples = L.sim.n_paths;
        ps.seed = L.sim.seed;
        ps.explosion_threshold = L.sim.explosion_threshold;
        if (a.c.dt) ps.dt = *a.c.dt;
        const IndependenceReport ir = symbol_independence_check(L.model, L.sim.x0, us.front(), a.radii, ps);
        const SymbolReport& first = ir.reports.front();
        const double tol = std::max(0.1 * std::abs(first.analytic), 3.0 * first.final_estimate.stderr());
        const bool close = first.abs_error <= tol;
        const bool ok = close && ir.consistent;
        Json cj = report_json(ir);
        cj["analytic_tolerance"] = tol;
        cj["analytic_agreement"] = close;
        cj["pass"] = ok;
        j["consistency"] = cj;
        pass = pass && ok;
        std::cout << "consistency: " << (ok ? "PASS" : "FAIL") << " (max pair z " << fmt(ir.max_pair_z) << ")\n";
    }
    j["pass"] = pass;
    write_json_file(out_dir(a.c) / "verify.json", j);
    return pass ? kOk : kCheckFailed;
}

struct ScalingArgs {
    Common c;
    std::optional<std::string> x;
    std::vector<double> lambdas;
    std::vector<double> t;
    double tmin = 1e-3;
    double tmax = 1e-1;
    int tpoints = 9;
    std::string limit = "small";
};

int run_scaling(const ScalingArgs& a) {
    Loaded L = load(a.c);
    const Vec x = a.x ? parse_vec(*a.x, L.model.dim(), "--x") : L.sim.x0;
    TimeLimit lim;
    if (a.limit == "small") lim = TimeLimit::small_time;
    else if (a.limit == "large") lim = TimeLimit::large_time;
    else throw ConfigError("--limit", "must be small or large");
    const std::vector<double> t = a.t.empty() ? logspace(a.tmin, a.tmax, a.tpoints) : a.t;
    McSettings mc;
    mc.n_paths = L.sim.n_paths;
    mc.dt = L.sim.dt;
    mc.seed = L.sim.seed;
    mc.explosion_threshold = L.sim.explosion_threshold;
    const ScalingReport r = scaling_diagnostic(L.model, x, a.lambdas, t, lim, mc);
    write_json_file(out_dir(a.c) / "scaling.json", report_json(r));
    for (const ScalingResult& s : r.results)
        std::cout << "lambda " << fmt(s.lambda) << ": " << to_string(s.classification) << " (median slope "
                  << fmt(s.median_slope) << ")\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symbolkit: symbols, indices and martingale checks for processes with killing"};
    app.require_subcommand(1);

    SimulateArgs sim_a;
    auto* sim = app.add_subcommand("simulate", "sample an ensemble and export paths");
    add_common(sim, sim_a.c);
    sim->add_option("--horizon", sim_a.horizon, "horizon T (multiple of dt)");
    sim->add_option("--x0", sim_a.x0, "start point, comma separated");
    sim->add_option("--sampler", sim_a.sampler, "levy, autonomous or sde");
    sim->add_option("--explosion", sim_a.explosion, "explosion threshold");
    sim->add_option("--eps", sim_a.eps, "small-jump cut for density measures");

    SymbolArgs sym_a;
    auto* sym = app.add_subcommand("symbol", "Monte-Carlo probe of the symbol");
    add_common(sym, sym_a.c);
    sym->add_option("--x", sym_a.x, "start point");
    sym->add_option("--xi", sym_a.xi, "frequency (repeatable)")->required();
    sym->add_option("--K", sym_a.K, "radius of the stopping ball (inf allowed)")->capture_default_str();
    sym->add_option("--t-ladder", sym_a.ladder, "time ladder");
    sym->add_flag("--no-extrapolate", sym_a.no_extrapolate, "report the smallest rung");
    sym->add_option("--radii", sym_a.radii, "radii for the K-independence check");
    sym->add_option("--explosion", sym_a.explosion, "explosion threshold");

    IndicesArgs ind_a;
    auto* ind = app.add_subcommand("indices", "index estimates from H and h");
    add_common(ind, ind_a.c);
    ind->add_option("--direction", ind_a.direction, "origin or infinity")->capture_default_str();
    ind->add_option("--rmin", ind_a.rmin)->capture_default_str();
    ind->add_option("--rmax", ind_a.rmax)->capture_default_str();
    ind->add_option("--points", ind_a.points, "R grid points")->capture_default_str();
    ind->add_option("--x", ind_a.x, "base point (infinity direction)");
    ind->add_option("--y-points", ind_a.y_points, "y grid points per axis")->capture_default_str();
    ind->add_flag("--maximal", ind_a.maximal, "also run the maximal-inequality check");
    ind->add_option("--t", ind_a.t, "times for --maximal");
    ind->add_option("--R", ind_a.R, "radii for --maximal");

    ConditionsArgs con_a;
    auto* con = app.add_subcommand("conditions", "growth and sector constants on a grid");
    add_common(con, con_a.c);
    con->add_option("--grid", con_a.grid, "x grid points per axis")->capture_default_str();
    con->add_option("--xi-min", con_a.xi_min)->capture_default_str();
    con->add_option("--xi-max", con_a.xi_max)->capture_default_str();
    con->add_option("--xi-points", con_a.xi_points)->capture_default_str();

    VerifyArgs ver_a;
    auto* ver = app.add_subcommand("verify", "martingale oracle battery");
    add_common(ver, ver_a.c);
    ver->add_option("--suite", ver_a.suite, "killing, exponential, canonical, consistency or all")->capture_default_str();
    ver->add_option("--t", ver_a.t, "check times");
    ver->add_option("--u", ver_a.u, "frequencies (repeatable)");
    ver->add_option("--h-radius", ver_a.h_radius, "truncation radius for the canonical residual");
    ver->add_option("--radii", ver_a.radii, "radii for the consistency suite");
    ver->add_option("--x0", ver_a.x0, "start point");

    ScalingArgs sca_a;
    auto* sca = app.add_subcommand("scaling", "scaling diagnostic of the maximum process");
    add_common(sca, sca_a.c);
    sca->add_option("--x", sca_a.x, "start point");
    sca->add_option("--lambda", sca_a.lambdas, "exponents")->required();
    sca->add_option("--t", sca_a.t, "time grid (overrides --tmin/--tmax)");
    sca->add_option("--tmin", sca_a.tmin)->capture_default_str();
    sca->add_option("--tmax", sca_a.tmax)->capture_default_str();
    sca->add_option("--tpoints", sca_a.tpoints)->capture_default_str();
    sca->add_option("--limit", sca_a.limit, "small (t->0) or large (t->inf)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*sim) return run_simulate(sim_a);
        if (*sym) return run_symbol(sym_a);
        if (*ind) return run_indices(ind_a);
        if (*con) return run_conditions(con_a);
        if (*ver) return run_verify(ver_a);
        if (*sca) return run_scaling(sca_a);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kUsage;
    } catch (const ModelError& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kCheckFailed;
    }
    return kUsage;
}
