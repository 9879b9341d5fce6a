#include "symbolkit/simulator.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "symbolkit/errors.hpp"
#include "symbolkit/format.hpp"
#include "symbolkit/json_io.hpp"
#include "symbolkit/parallel.hpp"

namespace symbolkit {

double symmetric_stable(double alpha, double v, double w) {
    if (alpha == 1.0) return std::tan(v);
    const double a = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha);
    return a * std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
}

std::string to_string(SamplerKind kind) {
    switch (kind) {
        case SamplerKind::levy: return "levy";
        case SamplerKind::autonomous: return "autonomous";
        case SamplerKind::sde: return "sde";
    }
    return "?";
}

void SimSpec::validate() const {
    if (x0.size() == 0 || !x0.allFinite()) throw ConfigError("x0", "must be a finite vector");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt", "must be positive");
    if (!(horizon >= dt)) throw ConfigError("horizon", "must be at least dt");
    const double steps = horizon / dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * steps) throw ConfigError("horizon", "must be a multiple of dt");
    if (n_paths < 1) throw ConfigError("paths", "must be at least 1");
    if (!(explosion_threshold > x0.norm())) throw ConfigError("explosion_threshold", "must exceed |x0|");
}

std::size_t SimSpec::n_steps() const { return static_cast<std::size_t>(std::llround(horizon / dt)); }

// ---------------------------------------------------------------------------
// One-step increment of a frozen triplet
// ---------------------------------------------------------------------------

namespace {

struct Kernel {
    int m = 1;
    double dt = 0.0;
    std::vector<double> drift;         // l
    std::vector<double> compensation;  // int y chi(y) N(dy) over the simulated jumps
    std::vector<double> drift_dt;      // (l - compensation) dt
    std::vector<double> chol;          // sqrt(dt) L, row-major m x m
    bool gauss = false;
    struct AtomStep {
        std::vector<double> jump;
        double mean = 0.0;
    };
    std::vector<AtomStep> atoms;
    bool stable = false;
    double alpha = 2.0;
    double stable_scale = 0.0;
    const DensityData* density = nullptr;
    double density_mean = 0.0;
    double small_sd = 0.0;

    void set_gauss(const Mat& q) {
        if (!is_psd(q)) throw DomainError("covariance not positive semidefinite");
        const Mat l = covariance_factor(q) * std::sqrt(dt);
        chol.assign(static_cast<std::size_t>(m * m), 0.0);
        gauss = false;
        for (int i = 0; i < m; ++i)
            for (int k = 0; k < m; ++k) {
                chol[static_cast<std::size_t>(i * m + k)] = l(i, k);
                if (l(i, k) != 0.0) gauss = true;
            }
    }

    void set_atoms(const std::vector<Atom>& src, const CutoffFunction& cutoff) {
        atoms.resize(src.size());
        compensation.assign(static_cast<std::size_t>(m), 0.0);
        for (std::size_t k = 0; k < src.size(); ++k) {
            const Atom& a = src[k];
            if (!(a.rate >= 0.0) || !std::isfinite(a.rate)) throw DomainError("atom rate must be nonnegative");
            if (!a.jump.allFinite()) throw DomainError("atom jump must be finite");
            atoms[k].jump.assign(a.jump.data(), a.jump.data() + m);
            atoms[k].mean = a.rate * dt;
            if (cutoff(a.jump) > 0.0)
                for (int i = 0; i < m; ++i) compensation[static_cast<std::size_t>(i)] += a.rate * a.jump(i);
        }
    }

    void set_stable(double a, double c) {
        if (!(a > 0.0 && a <= 2.0)) throw DomainError("stable index outside (0, 2]");
        if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("stable scale must be positive");
        stable = true;
        alpha = a;
        stable_scale = std::pow(c * dt, 1.0 / a);
        compensation.assign(static_cast<std::size_t>(m), 0.0);
    }

    void set_density(const DensityData& dd, const CutoffFunction& cutoff) {
        density = &dd;
        density_mean = dd.rate * dt;
        small_sd = std::sqrt(dd.small_variance * dt);
        compensation.assign(static_cast<std::size_t>(m), dd.truncated_first_moment(cutoff.inner_radius()));
    }

    void set_drift(const Vec& l) {
        if (!l.allFinite()) throw DomainError("drift not finite");
        drift.assign(l.data(), l.data() + m);
        update_drift();
    }

    void update_drift() {
        if (compensation.size() != static_cast<std::size_t>(m)) compensation.assign(static_cast<std::size_t>(m), 0.0);
        drift_dt.resize(static_cast<std::size_t>(m));
        for (std::size_t i = 0; i < drift_dt.size(); ++i) drift_dt[i] = (drift[i] - compensation[i]) * dt;
    }

    void configure(const LevyTriplet& t, double step) {
        m = t.dim();
        dt = step;
        set_gauss(t.covariance);
        compensation.assign(static_cast<std::size_t>(m), 0.0);
        atoms.clear();
        stable = false;
        density = nullptr;
        switch (t.measure.kind()) {
            case LevyMeasure::Kind::zero: break;
            case LevyMeasure::Kind::discrete: set_atoms(t.measure.atoms(), t.cutoff); break;
            case LevyMeasure::Kind::alpha_stable: set_stable(t.measure.alpha(), t.measure.scale()); break;
            case LevyMeasure::Kind::density: set_density(t.measure.density_data(), t.cutoff); break;
        }
        set_drift(t.drift);
    }

    void sample(PathStreams& s, double* out) const {
        for (int i = 0; i < m; ++i) out[i] = drift_dt[static_cast<std::size_t>(i)];
        if (gauss) {
            double z[16];
            std::vector<double> zbig;
            double* zp = z;
            if (m > 16) {
                zbig.resize(static_cast<std::size_t>(m));
                zp = zbig.data();
            }
            for (int k = 0; k < m; ++k) zp[k] = s.diffusion.normal();
            for (int i = 0; i < m; ++i) {
                double acc = 0.0;
                // Full product: the eigen-decomposition fallback is not triangular.
                for (int k = 0; k < m; ++k) acc += chol[static_cast<std::size_t>(i * m + k)] * zp[k];
                out[i] += acc;
            }
        }
        for (const AtomStep& a : atoms) {
            const long n = s.jumps.poisson(a.mean);
            if (n > 0)
                for (int i = 0; i < m; ++i) out[i] += static_cast<double>(n) * a.jump[static_cast<std::size_t>(i)];
        }
        if (stable) {
            const double v = std::numbers::pi * (s.jumps.uniform() - 0.5);
            const double w = s.jumps.exponential();
            out[0] += stable_scale * symmetric_stable(alpha, v, w);
        }
        if (density) {
            if (small_sd > 0.0) out[0] += small_sd * s.diffusion.normal();
            const long n = s.jumps.poisson(density_mean);
            for (long j = 0; j < n; ++j) {
                const double u1 = s.jumps.uniform();
                const double u2 = s.jumps.uniform();
                out[0] += density->sample_jump(u1, u2);
            }
        }
    }
};

}  // namespace

// ---------------------------------------------------------------------------
// Implementation state shared by all walkers of a simulator
// ---------------------------------------------------------------------------

struct PathWalker::Impl {
    StateModel model;
    SimSpec spec;
    SamplerKind kind = SamplerKind::levy;
    std::size_t n_steps = 0;
    Kernel base;
    LevyTriplet driver;  // levy kernel triplet or SDE driver
    bool dep_kill = false;
    bool dep_drift = false;
    bool dep_cov = false;
    bool dep_measure = false;
    bool dep_f = false;
    double const_kill = 0.0;
    Mat f_const;
    SimulationInfo info;

    Impl(StateModel m, SimSpec s) : model(std::move(m)), spec(std::move(s)) {}

    double time_at(std::size_t i) const { return i == n_steps ? spec.horizon : static_cast<double>(i) * spec.dt; }
};

struct PathWalker::Scratch {
    Kernel kernel;
    LocalCoefficients coeffs;
    Vec x;
    Mat f;
};

PathWalker::PathWalker(std::shared_ptr<const Impl> impl, std::uint64_t path_index, const Vec& x0)
    : impl_(std::move(impl)), streams_(impl_->spec.seed, path_index) {
    const Impl& I = *impl_;
    if (x0.size() != I.model.dim()) throw ConfigError("x0", "dimension does not match the model");
    x_.assign(x0.data(), x0.data() + x0.size());
    dz_.assign(static_cast<std::size_t>(I.base.m), 0.0);
    dx_.assign(x_.size(), 0.0);
    const double a = I.kind == SamplerKind::autonomous ? 0.0 : I.driver.killing_rate;
    // The clock is always drawn so the hazard stream position does not depend on a.
    const double e = streams_.hazard.exponential();
    if (I.kind != SamplerKind::autonomous && a > 0.0) kill_clock_ = e / a;
    if (I.kind != SamplerKind::levy) {
        scratch_ = std::make_shared<Scratch>();
        scratch_->kernel = I.base;
        scratch_->x.resize(x0.size());
        if (I.kind == SamplerKind::sde) scratch_->f = I.f_const;
    }
    if (x0.norm() >= I.spec.explosion_threshold) explode_next_ = true;
}

double PathWalker::time() const { return impl_->time_at(step_); }

bool PathWalker::at_horizon() const { return step_ >= impl_->n_steps; }

bool PathWalker::step() {
    const Impl& I = *impl_;
    if (!valid_ || step_ >= I.n_steps) return false;
    ++step_;
    if (status_ != PointKind::finite) return true;
    if (explode_next_) {
        status_ = PointKind::infinity;
        return true;
    }
    const double t_new = I.time_at(step_);
    const int d = static_cast<int>(x_.size());

    try {
        switch (I.kind) {
            case SamplerKind::levy: {
                I.base.sample(streams_, dz_.data());
                if (t_new >= kill_clock_) {
                    status_ = PointKind::delta;
                    return true;
                }
                for (int i = 0; i < d; ++i) x_[static_cast<std::size_t>(i)] += dz_[static_cast<std::size_t>(i)];
                break;
            }
            case SamplerKind::autonomous: {
                Scratch& S = *scratch_;
                for (int i = 0; i < d; ++i) S.x(i) = x_[static_cast<std::size_t>(i)];
                const auto xs = std::span<const double>(x_.data(), x_.size());
                const StateModelSpec& ms = I.model.spec();
                double a = I.const_kill;
                if (I.dep_kill) a = ms.killing_rate.evaluate(xs);
                if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("killing rate negative or not finite");
                if (I.dep_cov) {
                    for (int i = 0; i < d; ++i)
                        for (int k = 0; k < d; ++k) S.coeffs.covariance(i, k) = ms.covariance[i][k].evaluate(xs);
                    S.kernel.set_gauss(S.coeffs.covariance);
                }
                if (I.dep_measure) {
                    I.model.coefficients_at(S.x, S.coeffs);
                    if (ms.measure.kind == LevyMeasure::Kind::discrete)
                        S.kernel.set_atoms(S.coeffs.atoms, I.model.cutoff());
                    else if (ms.measure.kind == LevyMeasure::Kind::alpha_stable)
                        S.kernel.set_stable(S.coeffs.alpha, S.coeffs.scale);
                }
                if (I.dep_drift) {
                    for (int i = 0; i < d; ++i) S.kernel.drift[static_cast<std::size_t>(i)] = ms.drift[i].evaluate(xs);
                    for (double v : S.kernel.drift)
                        if (!std::isfinite(v)) throw DomainError("drift not finite");
                }
                if (I.dep_drift || I.dep_measure) S.kernel.update_drift();
                const double u = streams_.hazard.uniform();
                S.kernel.sample(streams_, dz_.data());
                if (u < -std::expm1(-a * I.spec.dt)) {
                    status_ = PointKind::delta;
                    return true;
                }
                for (int i = 0; i < d; ++i) x_[static_cast<std::size_t>(i)] += dz_[static_cast<std::size_t>(i)];
                break;
            }
            case SamplerKind::sde: {
                Scratch& S = *scratch_;
                I.base.sample(streams_, dz_.data());
                if (t_new >= kill_clock_) {
                    status_ = PointKind::delta;
                    return true;
                }
                if (I.dep_f) {
                    const auto xs = std::span<const double>(x_.data(), x_.size());
                    const auto& f = I.model.sde()->f;
                    for (int i = 0; i < d; ++i)
                        for (int k = 0; k < I.base.m; ++k) S.f(i, k) = f[i][k].evaluate(xs);
                }
                for (int i = 0; i < d; ++i) {
                    double acc = 0.0;
                    for (int k = 0; k < I.base.m; ++k) acc += S.f(i, k) * dz_[static_cast<std::size_t>(k)];
                    dx_[static_cast<std::size_t>(i)] = acc;
                }
                for (int i = 0; i < d; ++i) x_[static_cast<std::size_t>(i)] += dx_[static_cast<std::size_t>(i)];
                break;
            }
        }
    } catch (const Error& e) {
        --step_;
        valid_ = false;
        failure_ = e.what();
        return false;
    }

    double sq = 0.0;
    bool finite = true;
    for (double v : x_) {
        finite = finite && std::isfinite(v);
        sq += v * v;
    }
    if (!finite) {
        status_ = PointKind::infinity;
    } else if (std::sqrt(sq) >= I.spec.explosion_threshold) {
        explode_next_ = true;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Simulator
// ---------------------------------------------------------------------------

namespace {

StateModel with_eps(const StateModel& model, const std::optional<double>& eps) {
    if (!eps || model.spec().measure.kind != LevyMeasure::Kind::density || !model.spec().measure.density.depends_on_jump())
        return model;
    StateModelSpec spec = model.spec();
    spec.measure.eps = eps;
    return StateModel(std::move(spec));
}

void fill_density_info(SimulationInfo& info, const LevyMeasure& m) {
    if (m.kind() != LevyMeasure::Kind::density) return;
    const DensityData& dd = m.density_data();
    info.eps = dd.eps;
    info.eps_automatic = dd.eps_automatic;
    info.small_jump_variance = dd.small_variance;
    info.small_jump_variance_ratio = dd.variance_ratio;
    info.small_jump_third_moment = dd.small_third_moment;
    info.jump_table_rate_error = dd.table_rate_error;
    info.exact_increments = false;
}

}  // namespace

Simulator::Simulator(const StateModel& model, SimSpec spec)
    : Simulator(model, std::move(spec),
                model.mode() == ModelMode::sde          ? SamplerKind::sde
                : model.mode() == ModelMode::autonomous ? SamplerKind::autonomous
                                                        : SamplerKind::levy) {}

Simulator::Simulator(const StateModel& model, SimSpec spec, SamplerKind kind) {
    spec.validate();
    auto impl = std::make_shared<PathWalker::Impl>(with_eps(model, spec.small_jump_cut), spec);
    impl->kind = kind;
    impl->n_steps = spec.n_steps();
    impl->info.kind = kind;
    const StateModel& m = impl->model;
    if (spec.x0.size() != m.dim()) throw ConfigError("x0", "dimension does not match the model");

    switch (kind) {
        case SamplerKind::levy: {
            if (m.mode() == ModelMode::sde) throw ConfigError("mode", "a Levy sampler needs a constant triplet, not an sde model");
            const LevyTriplet* t = m.constant_triplet();
            if (!t) throw ConfigError("mode", "a Levy sampler needs state-independent coefficients");
            impl->driver = *t;
            impl->base.configure(*t, spec.dt);
            fill_density_info(impl->info, t->measure);
            impl->info.killing_mechanism = "exponential clock; Delta from the first grid time after it rings";
            impl->info.notes = "increments exact in law per step";
            break;
        }
        case SamplerKind::autonomous: {
            if (m.mode() == ModelMode::sde) throw ConfigError("mode", "an autonomous sampler cannot run an sde model");
            if (m.spec().measure.kind == LevyMeasure::Kind::density && m.measure_depends_on_state())
                throw ConfigError("levy_measure", "state-dependent densities are not supported by the Euler sampler");
            const LevyTriplet t0 = m.triplet_at(spec.x0);
            impl->driver = t0;
            impl->base.configure(t0, spec.dt);
            impl->dep_kill = m.killing_depends_on_state();
            impl->dep_drift = m.drift_depends_on_state();
            impl->dep_cov = m.covariance_depends_on_state();
            impl->dep_measure = m.measure_depends_on_state();
            impl->const_kill = t0.killing_rate;
            fill_density_info(impl->info, t0.measure);
            impl->info.exact_increments = m.is_constant() && impl->info.exact_increments;
            impl->info.killing_mechanism = "hazard: Delta with probability 1 - exp(-a(X) dt) per step";
            impl->info.notes = "Euler scheme with the triplet frozen at the left grid point";
            break;
        }
        case SamplerKind::sde: {
            const SdeSpec* sde = m.sde();
            if (!sde) throw ConfigError("sde", "model has no sde block");
            impl->driver = sde->driver;
            impl->base.configure(sde->driver, spec.dt);
            impl->f_const = m.f_at(spec.x0);
            for (const auto& row : sde->f)
                for (const Expression& e : row) impl->dep_f = impl->dep_f || e.depends_on_state();
            fill_density_info(impl->info, sde->driver.measure);
            impl->info.exact_increments = false;
            impl->info.killing_mechanism = "driver exponential clock";
            impl->info.notes = "Euler scheme dX = f(X_-) dZ with exact driver increments";
            break;
        }
    }
    impl_ = std::move(impl);
}

const SimSpec& Simulator::spec() const { return impl_->spec; }
SamplerKind Simulator::kind() const { return impl_->kind; }
const StateModel& Simulator::model() const { return impl_->model; }
std::size_t Simulator::n_steps() const { return impl_->n_steps; }
double Simulator::time_at(std::size_t i) const { return impl_->time_at(i); }
SimulationInfo Simulator::info() const { return impl_->info; }

PathWalker Simulator::walker(std::uint64_t path_index) const { return walker(path_index, impl_->spec.x0); }

PathWalker Simulator::walker(std::uint64_t path_index, const Vec& x0) const {
    PathWalker w(impl_, path_index, x0);
    if (w.scratch_ && impl_->kind == SamplerKind::autonomous) {
        // Buffers for the state-dependent coefficients.
        impl_->model.coefficients_at(x0, w.scratch_->coeffs);
    }
    return w;
}

Path Simulator::sample_path(std::uint64_t path_index) const { return sample_path(path_index, impl_->spec.x0); }

Path Simulator::sample_path(std::uint64_t path_index, const Vec& x0) const {
    PathWalker w = walker(path_index, x0);
    Path path(w.dim());
    path.reserve(impl_->n_steps + 1);
    path.push_finite(0.0, w.state());
    while (w.step()) {
        switch (w.status()) {
            case PointKind::finite: path.push_finite(w.time(), w.state()); break;
            case PointKind::infinity: path.push_infinity(w.time()); break;
            case PointKind::delta: path.push_delta(w.time()); break;
        }
    }
    if (!w.valid()) path.set_invalid();
    return path;
}

Ensemble Simulator::sample() const {
    const SimSpec& s = impl_->spec;
    check_substream_collisions(s.seed, s.n_paths);
    Ensemble e;
    e.spec = s;
    e.kind = impl_->kind;
    e.info = impl_->info;
    e.paths.resize(s.n_paths);
    e.seed_ledger.resize(s.n_paths);
    parallel_for(s.n_paths, [&](std::size_t p) { e.paths[p] = sample_path(p); });
    for (std::size_t p = 0; p < s.n_paths; ++p) {
        e.seed_ledger[p] = SeedRecord{substream_id(s.seed, p, StreamPurpose::diffusion),
                                      substream_id(s.seed, p, StreamPurpose::jumps),
                                      substream_id(s.seed, p, StreamPurpose::hazard)};
        if (!e.paths[p].valid()) ++e.invalid_count;
    }
    return e;
}

Ensemble sample_levy(const LevyTriplet& triplet, const SimSpec& spec) {
    return Simulator(StateModel::from_triplet(triplet), spec, SamplerKind::levy).sample();
}

Ensemble sample_autonomous(const StateModel& model, const SimSpec& spec) {
    return Simulator(model, spec, SamplerKind::autonomous).sample();
}

Ensemble sample_sde(const std::vector<std::vector<Expression>>& f, const LevyTriplet& driver, const SimSpec& spec) {
    const int d = static_cast<int>(f.size());
    Box box{Vec::Constant(d, -1e12), Vec::Constant(d, 1e12)};
    return Simulator(StateModel::sde_model(driver, f, box), spec, SamplerKind::sde).sample();
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

void export_ensemble(const Ensemble& ensemble, const std::filesystem::path& dir, const std::string& model_name) {
    std::filesystem::create_directories(dir);
    for (std::size_t p = 0; p < ensemble.paths.size(); ++p) {
        char name[32];
        std::snprintf(name, sizeof name, "path_%06zu.csv", p);
        std::ofstream os(dir / name);
        if (!os) throw Error("cannot write " + (dir / name).string());
        write_path_csv(os, ensemble.paths[p]);
    }
    const SimSpec& s = ensemble.spec;
    Json manifest;
    manifest["model"] = model_name;
    manifest["sampler"] = to_string(ensemble.kind);
    manifest["spec"] = Json{{"x0", to_json(s.x0)},
                            {"horizon", s.horizon},
                            {"dt", s.dt},
                            {"paths", s.n_paths},
                            {"seed", s.seed},
                            {"explosion_threshold", s.explosion_threshold}};
    const SimulationInfo& info = ensemble.info;
    Json trunc;
    trunc["eps"] = info.eps ? Json(*info.eps) : Json(nullptr);
    trunc["eps_automatic"] = info.eps_automatic;
    trunc["small_jump_variance"] = info.small_jump_variance;
    trunc["small_jump_variance_ratio"] = info.small_jump_variance_ratio;
    trunc["exponent_error_coefficient"] = info.small_jump_third_moment / 6.0;
    trunc["jump_table_rate_error"] = info.jump_table_rate_error;
    manifest["truncation"] = trunc;
    manifest["bias"] = Json{{"exact_increments", info.exact_increments},
                            {"time_step", s.dt},
                            {"killing", info.killing_mechanism},
                            {"notes", info.notes}};
    manifest["invalid_paths"] = ensemble.invalid_count;
    Json ledger = Json::array();
    for (const SeedRecord& r : ensemble.seed_ledger)
        ledger.push_back(Json::array({r.diffusion, r.jumps, r.hazard}));
    manifest["seed_ledger"] = ledger;
    write_json_file(dir / "manifest.json", manifest);
}

}  // namespace symbolkit
