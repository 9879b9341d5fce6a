#include "symbolkit/martingale_oracle.hpp"

#include <cmath>
#include <functional>

#include "symbolkit/errors.hpp"
#include "symbolkit/parallel.hpp"

namespace symbolkit {

namespace {

using PathSource = std::function<const Path*(std::size_t, Path&)>;
// Fills out[0..n_stats) for one path; returns false to exclude it.
using PathStats = std::function<bool(const Path&, double*)>;

struct Moments {
    std::vector<double> mean;
    std::vector<double> stderr;
    std::size_t n_used = 0;
    std::size_t n_excluded = 0;
};

std::vector<std::size_t> grid_indices(const std::vector<double>& t_grid, double dt, std::size_t n_steps) {
    if (t_grid.empty()) throw ConfigError("t_grid", "must not be empty");
    std::vector<std::size_t> idx;
    for (double t : t_grid) {
        const double k = std::round(t / dt);
        if (!(t >= 0.0) || std::abs(k * dt - t) > 1e-9 * std::max(1.0, t))
            throw ConfigError("t_grid", "times must be nonnegative multiples of dt");
        if (k > static_cast<double>(n_steps)) throw ConfigError("t_grid", "time beyond the horizon");
        idx.push_back(static_cast<std::size_t>(k));
    }
    return idx;
}

Moments run(std::size_t n_paths, std::size_t n_stats, const PathSource& source, const PathStats& stats) {
    std::vector<double> values(n_paths * n_stats, 0.0);
    std::vector<char> used(n_paths, 0);
    parallel_for(n_paths, [&](std::size_t p) {
        Path scratch;
        const Path* path = source(p, scratch);
        if (!path->valid()) return;
        used[p] = stats(*path, values.data() + p * n_stats) ? 1 : 0;
    });
    Moments m;
    m.mean.assign(n_stats, 0.0);
    m.stderr.assign(n_stats, 0.0);
    for (std::size_t p = 0; p < n_paths; ++p) {
        if (!used[p]) continue;
        ++m.n_used;
        for (std::size_t k = 0; k < n_stats; ++k) m.mean[k] += values[p * n_stats + k];
    }
    m.n_excluded = n_paths - m.n_used;
    if (m.n_used == 0) throw EstimationError("no usable paths");
    for (double& v : m.mean) v /= static_cast<double>(m.n_used);
    if (m.n_used > 1) {
        std::vector<double> ss(n_stats, 0.0);
        for (std::size_t p = 0; p < n_paths; ++p) {
            if (!used[p]) continue;
            for (std::size_t k = 0; k < n_stats; ++k) {
                const double d = values[p * n_stats + k] - m.mean[k];
                ss[k] += d * d;
            }
        }
        const double n = static_cast<double>(m.n_used);
        for (std::size_t k = 0; k < n_stats; ++k) m.stderr[k] = std::sqrt(ss[k] / (n - 1.0) / n);
    }
    return m;
}

bool reaches_infinity(const Path& path, std::size_t last) {
    if (path.size() <= last) return true;
    for (std::size_t i = 0; i <= last; ++i)
        if (path.status(i) == PointKind::infinity) return true;
    return false;
}

Vec row(const Path& path, std::size_t i) {
    return Eigen::Map<const Vec>(path.values(i), path.dim());
}

PathSource ensemble_source(const Ensemble& e) {
    return [&e](std::size_t p, Path&) { return &e.paths[p]; };
}

PathSource stream_source(const Simulator& sim) {
    return [&sim](std::size_t p, Path& scratch) {
        scratch = sim.sample_path(p);
        return &scratch;
    };
}

std::size_t max_index(const std::vector<std::size_t>& idx) { return *std::max_element(idx.begin(), idx.end()); }

// ---------------------------------------------------------------------------

CompensatorReport compensator_impl(std::size_t n_paths, double dt, std::size_t n_steps, const PathSource& source,
                                   const StateModel& model, const std::vector<double>& t_grid) {
    const std::vector<std::size_t> idx = grid_indices(t_grid, dt, n_steps);
    const std::size_t last = max_index(idx);
    const std::size_t n_t = idx.size();
    const Moments m = run(n_paths, 3 * n_t, source, [&](const Path& path, double* out) {
        if (reaches_infinity(path, last)) return false;
        std::vector<double> A(last + 1, 0.0);
        std::vector<char> dead(last + 1, 0);
        double a_prev = path.status(0) == PointKind::finite ? model.killing_rate_at(row(path, 0)) : 0.0;
        dead[0] = path.status(0) == PointKind::delta;
        for (std::size_t i = 1; i <= last; ++i) {
            A[i] = A[i - 1];
            dead[i] = dead[i - 1];
            const double h = path.time(i) - path.time(i - 1);
            if (dead[i - 1]) continue;
            if (path.status(i) == PointKind::finite) {
                const double a = model.killing_rate_at(row(path, i));
                A[i] += 0.5 * h * (a_prev + a);
                a_prev = a;
            } else {
                // Killed during this step: only the left value is known.
                A[i] += h * a_prev;
                dead[i] = 1;
            }
        }
        for (std::size_t j = 0; j < n_t; ++j) {
            const double d = dead[idx[j]] ? 1.0 : 0.0;
            out[3 * j] = d;
            out[3 * j + 1] = A[idx[j]];
            out[3 * j + 2] = d - A[idx[j]];
        }
        return true;
    });
    CompensatorReport rep;
    rep.n_used = m.n_used;
    rep.n_excluded = m.n_excluded;
    for (std::size_t j = 0; j < n_t; ++j) {
        CompensatorRow r;
        r.t = static_cast<double>(idx[j]) * dt;
        r.killed_fraction = m.mean[3 * j];
        r.mean_compensator = m.mean[3 * j + 1];
        r.difference = m.mean[3 * j + 2];
        r.stderr = m.stderr[3 * j + 2];
        r.pass = std::abs(r.difference) <= 3.0 * r.stderr;
        rep.pass = rep.pass && r.pass;
        rep.rows.push_back(r);
    }
    return rep;
}

MartingaleReport exponential_impl(std::size_t n_paths, double dt, std::size_t n_steps, const Vec& x0,
                                  const PathSource& source, const StateModel& model, const std::vector<Vec>& us,
                                  const std::vector<double>& t_grid, bool force_autonomous) {
    if (us.empty()) throw ConfigError("u", "need at least one frequency");
    for (const Vec& u : us)
        if (u.size() != model.dim()) throw ConfigError("u", "dimension mismatch");
    const std::vector<std::size_t> idx = grid_indices(t_grid, dt, n_steps);
    const std::size_t last = max_index(idx);
    const std::size_t n_t = idx.size();
    const std::size_t n_u = us.size();
    const int d = model.dim();

    MartingaleReport rep;
    const LevyTriplet* fixed = model.constant_triplet();
    rep.form = (fixed && !force_autonomous && model.mode() != ModelMode::sde) ? MartingaleForm::levy
                                                                               : MartingaleForm::autonomous;
    if (rep.form == MartingaleForm::autonomous && model.mode() == ModelMode::sde)
        throw ConfigError("model", "the autonomous form needs a levy or autonomous model");

    PathStats stats;
    if (rep.form == MartingaleForm::levy) {
        stats = [&](const Path& path, double* out) {
            if (reaches_infinity(path, last)) return false;
            for (std::size_t k = 0; k < n_u; ++k)
                for (std::size_t j = 0; j < n_t; ++j) {
                    const std::size_t i = idx[j];
                    Complex e = 0.0;
                    if (path.status(i) == PointKind::finite) {
                        double phase = 0.0;
                        for (int c = 0; c < d; ++c) phase += us[k](c) * (path.values(i)[c] - x0(c));
                        e = std::polar(1.0, phase);
                    }
                    out[2 * (k * n_t + j)] = e.real();
                    out[2 * (k * n_t + j) + 1] = e.imag();
                }
            return true;
        };
    } else {
        std::vector<Complex> kill_factor(n_u);
        for (std::size_t k = 0; k < n_u; ++k) kill_factor[k] = std::polar(1.0, us[k].sum());
        stats = [&, kill_factor](const Path& path, double* out) {
            if (reaches_infinity(path, last)) return false;
            if (path.status(0) != PointKind::finite) return false;
            std::vector<Complex> integral(n_u, 0.0), g_prev(n_u), h_val(n_u), e0(n_u);
            auto integrand = [&](std::size_t i, std::vector<Complex>& g, std::vector<Complex>& e) {
                const Vec x = row(path, i);
                const double a = model.killing_rate_at(x);
                for (std::size_t k = 0; k < n_u; ++k) {
                    e[k] = std::polar(1.0, x.dot(us[k]));
                    g[k] = e[k] * (a * kill_factor[k] - eval_symbol(model, x, us[k]));
                }
            };
            integrand(0, g_prev, e0);
            h_val = e0;
            bool dead = false;
            std::vector<Complex> g(n_u), e(n_u);
            auto emit = [&](std::size_t i) {
                for (std::size_t j = 0; j < n_t; ++j) {
                    if (idx[j] != i) continue;
                    for (std::size_t k = 0; k < n_u; ++k) {
                        const Complex v = h_val[k] - e0[k] - integral[k];
                        out[2 * (k * n_t + j)] = v.real();
                        out[2 * (k * n_t + j) + 1] = v.imag();
                    }
                }
            };
            emit(0);
            for (std::size_t i = 1; i <= last; ++i) {
                if (!dead) {
                    const double h = path.time(i) - path.time(i - 1);
                    if (path.status(i) == PointKind::finite) {
                        integrand(i, g, e);
                        for (std::size_t k = 0; k < n_u; ++k) {
                            integral[k] += 0.5 * h * (g_prev[k] + g[k]);
                            h_val[k] = e[k];
                        }
                        g_prev.swap(g);
                    } else {
                        for (std::size_t k = 0; k < n_u; ++k) {
                            integral[k] += h * g_prev[k];
                            h_val[k] *= kill_factor[k];
                        }
                        dead = true;
                    }
                }
                emit(i);
            }
            return true;
        };
    }

    const Moments m = run(n_paths, 2 * n_u * n_t, source, stats);
    rep.n_used = m.n_used;
    rep.n_excluded = m.n_excluded;
    for (std::size_t k = 0; k < n_u; ++k)
        for (std::size_t j = 0; j < n_t; ++j) {
            const std::size_t s = 2 * (k * n_t + j);
            MartingaleRow r;
            r.u = us[k];
            r.t = static_cast<double>(idx[j]) * dt;
            const Complex mean(m.mean[s], m.mean[s + 1]);
            const double se = std::hypot(m.stderr[s], m.stderr[s + 1]);
            if (rep.form == MartingaleForm::levy) {
                const Complex phi = eval_exponent(*fixed, us[k]);
                const Complex growth = std::exp(r.t * phi);
                r.char_mean = mean;
                r.char_target = std::exp(-r.t * phi);
                r.char_stderr = se;
                r.mean = mean * growth;
                r.target = 1.0;
                r.stderr = se * std::abs(growth);
            } else {
                r.mean = mean;
                r.target = 0.0;
                r.stderr = se;
            }
            r.oscillation = r.stderr > 0.1;
            r.pass = std::abs(r.mean - r.target) <= 3.0 * r.stderr;
            rep.oscillation = rep.oscillation || r.oscillation;
            rep.pass = rep.pass && r.pass;
            rep.rows.push_back(r);
        }
    return rep;
}

ResidualReport residual_impl(std::size_t n_paths, double dt, std::size_t n_steps, const Vec& x0,
                             const PathSource& source, const StateModel& model, double h_radius,
                             const std::vector<double>& t_grid) {
    if (model.mode() == ModelMode::sde) throw ConfigError("model", "residual check needs a levy or autonomous model");
    if (!(h_radius > 0.0)) throw ConfigError("h_radius", "must be positive");
    const std::vector<std::size_t> idx = grid_indices(t_grid, dt, n_steps);
    const std::size_t last = max_index(idx);
    const std::size_t n_t = idx.size();
    const int d = model.dim();
    const Moments m = run(n_paths, n_t * static_cast<std::size_t>(d), source, [&](const Path& path, double* out) {
        if (reaches_infinity(path, last)) return false;
        if (path.status(0) != PointKind::finite) return false;
        const TruncationDecomposition tr = truncate_jumps(path, h_radius);
        Vec drift_int = Vec::Zero(d);
        Vec l_prev = model.drift_at(row(path, 0));
        Vec resid = Vec::Zero(d);
        for (std::size_t i = 0; i <= last; ++i) {
            if (i > 0 && i < tr.size()) {
                const Vec l = model.drift_at(row(path, i));
                drift_int += 0.5 * (path.time(i) - path.time(i - 1)) * (l_prev + l);
                l_prev = l;
            }
            if (i < tr.size()) {
                for (int c = 0; c < d; ++c) resid(c) = path.values(i)[c] - x0(c) - drift_int(c) - tr.big(i)[c];
            }
            for (std::size_t j = 0; j < n_t; ++j)
                if (idx[j] == i)
                    for (int c = 0; c < d; ++c) out[j * d + c] = resid(c);
        }
        return true;
    });
    ResidualReport rep;
    rep.h_radius = h_radius;
    rep.n_used = m.n_used;
    rep.n_excluded = m.n_excluded;
    for (std::size_t j = 0; j < n_t; ++j) {
        ResidualRow r;
        r.t = static_cast<double>(idx[j]) * dt;
        r.mean = Vec::Zero(d);
        r.stderr = Vec::Zero(d);
        for (int c = 0; c < d; ++c) {
            r.mean(c) = m.mean[j * d + c];
            r.stderr(c) = m.stderr[j * d + c];
            // Mean and stderr vanish together for deterministic residuals; allow rounding.
            if (std::abs(r.mean(c)) > 3.0 * r.stderr(c) + 1e-9) r.pass = false;
        }
        rep.pass = rep.pass && r.pass;
        rep.rows.push_back(r);
    }
    return rep;
}

SimSpec checked(const Ensemble& e) {
    if (e.paths.empty()) throw ConfigError("ensemble", "is empty");
    return e.spec;
}

}  // namespace

TruncationDecomposition truncate_jumps(const Path& path, double h_radius) {
    if (!(h_radius > 0.0)) throw ConfigError("h_radius", "must be positive");
    TruncationDecomposition out;
    out.dim = path.dim();
    out.h_radius = h_radius;
    const std::size_t d = static_cast<std::size_t>(path.dim());
    std::vector<double> big(d, 0.0), inc(d);
    for (std::size_t i = 0; i < path.size() && path.status(i) == PointKind::finite; ++i) {
        if (i > 0) {
            double sq = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                inc[c] = path.values(i)[c] - path.values(i - 1)[c];
                sq += inc[c] * inc[c];
            }
            if (std::sqrt(sq) > h_radius)
                for (std::size_t c = 0; c < d; ++c) big[c] += inc[c];
        }
        out.times.push_back(path.time(i));
        for (std::size_t c = 0; c < d; ++c) {
            out.big_jump.push_back(big[c]);
            out.truncated.push_back(path.values(i)[c] - big[c]);
        }
    }
    return out;
}

CompensatorReport killing_compensator_check(const Ensemble& ensemble, const StateModel& model,
                                            const std::vector<double>& t_grid) {
    const SimSpec s = checked(ensemble);
    return compensator_impl(ensemble.paths.size(), s.dt, s.n_steps(), ensemble_source(ensemble), model, t_grid);
}

CompensatorReport killing_compensator_check(const StateModel& model, const SimSpec& spec,
                                            const std::vector<double>& t_grid) {
    if (model.mode() == ModelMode::sde) throw ConfigError("model", "killing check needs a levy or autonomous model");
    const Simulator sim(model, spec, SamplerKind::autonomous);
    return compensator_impl(spec.n_paths, spec.dt, spec.n_steps(), stream_source(sim), model, t_grid);
}

std::string to_string(MartingaleForm f) { return f == MartingaleForm::levy ? "levy" : "autonomous"; }

MartingaleReport exponential_martingale_check(const Ensemble& ensemble, const StateModel& model,
                                              const std::vector<Vec>& us, const std::vector<double>& t_grid,
                                              bool force_autonomous) {
    const SimSpec s = checked(ensemble);
    return exponential_impl(ensemble.paths.size(), s.dt, s.n_steps(), s.x0, ensemble_source(ensemble), model, us,
                            t_grid, force_autonomous);
}

MartingaleReport exponential_martingale_check(const StateModel& model, const SimSpec& spec,
                                              const std::vector<Vec>& us, const std::vector<double>& t_grid,
                                              bool force_autonomous) {
    const Simulator sim(model, spec);
    return exponential_impl(spec.n_paths, spec.dt, spec.n_steps(), spec.x0, stream_source(sim), model, us, t_grid,
                            force_autonomous);
}

ResidualReport canonical_representation_residual(const Ensemble& ensemble, const StateModel& model,
                                                 double h_radius, const std::vector<double>& t_grid) {
    const SimSpec s = checked(ensemble);
    return residual_impl(ensemble.paths.size(), s.dt, s.n_steps(), s.x0, ensemble_source(ensemble), model, h_radius,
                         t_grid);
}

ResidualReport canonical_representation_residual(const StateModel& model, const SimSpec& spec, double h_radius,
                                                 const std::vector<double>& t_grid) {
    const Simulator sim(model, spec);
    return residual_impl(spec.n_paths, spec.dt, spec.n_steps(), spec.x0, stream_source(sim), model, h_radius,
                         t_grid);
}

Json report_json(const CompensatorReport& r) {
    Json rows = Json::array();
    for (const CompensatorRow& c : r.rows)
        rows.push_back(Json{{"t", c.t},
                            {"killed_fraction", c.killed_fraction},
                            {"mean_compensator", c.mean_compensator},
                            {"difference", c.difference},
                            {"stderr", c.stderr},
                            {"pass", c.pass}});
    return Json{{"check", "killing_compensator"},
                {"rows", rows},
                {"n_used", r.n_used},
                {"n_excluded", r.n_excluded},
                {"pass", r.pass}};
}

Json report_json(const MartingaleReport& r) {
    Json rows = Json::array();
    for (const MartingaleRow& c : r.rows) {
        Json j{{"u", to_json(c.u)},
               {"t", c.t},
               {"mean", complex_json(c.mean)},
               {"target", complex_json(c.target)},
               {"stderr", c.stderr}};
        if (r.form == MartingaleForm::levy) {
            j["char_mean"] = complex_json(c.char_mean);
            j["char_target"] = complex_json(c.char_target);
            j["char_stderr"] = c.char_stderr;
        }
        j["oscillation"] = c.oscillation;
        j["pass"] = c.pass;
        rows.push_back(j);
    }
    return Json{{"check", "exponential_martingale"},
                {"form", to_string(r.form)},
                {"rows", rows},
                {"n_used", r.n_used},
                {"n_excluded", r.n_excluded},
                {"oscillation", r.oscillation},
                {"pass", r.pass}};
}

Json report_json(const ResidualReport& r) {
    Json rows = Json::array();
    for (const ResidualRow& c : r.rows)
        rows.push_back(Json{{"t", c.t}, {"mean", to_json(c.mean)}, {"stderr", to_json(c.stderr)}, {"pass", c.pass}});
    return Json{{"check", "canonical_residual"},
                {"h_radius", r.h_radius},
                {"rows", rows},
                {"n_used", r.n_used},
                {"n_excluded", r.n_excluded},
                {"pass", r.pass}};
}

}  // namespace symbolkit
