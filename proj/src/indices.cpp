#include "symbolkit/indices.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "symbolkit/errors.hpp"
#include "symbolkit/format.hpp"
#include "symbolkit/parallel.hpp"

namespace symbolkit {

double kappa_from_c0(double c0) {
    if (!(c0 >= 0.0)) throw SectorError("sector constant must be nonnegative");
    // c0 = 0 gives atan(inf) = pi/2.
    return 1.0 / (4.0 * std::atan(1.0 / (2.0 * c0)));
}

std::string to_string(IndexDirection d) { return d == IndexDirection::origin ? "origin" : "infinity"; }
std::string to_string(TimeLimit l) { return l == TimeLimit::small_time ? "t->0" : "t->inf"; }

std::string to_string(ScalingClass c) {
    switch (c) {
        case ScalingClass::to_zero: return "->0";
        case ScalingClass::to_infinity: return "->inf";
        case ScalingClass::indeterminate: return "indeterminate";
    }
    return "?";
}

std::vector<Vec> index_y_grid(const StateModel& model, double R, const std::optional<Vec>& x,
                              const IndexGridSettings& g) {
    const int d = model.dim();
    const Box& box = model.domain();
    int n = std::max(1, g.y_points_per_axis);
    while (n > 2 && std::pow(static_cast<double>(n), d) > static_cast<double>(g.max_y_points)) n -= 2;
    if (!x) return tensor_grid(box.lower, box.upper, n);

    Vec lo = x->array() - 2.0 * R;
    Vec hi = x->array() + 2.0 * R;
    lo = lo.cwiseMax(box.lower);
    hi = hi.cwiseMin(box.upper);
    if ((lo.array() > hi.array()).any()) throw ModelError("ball around x does not meet the domain box");
    std::vector<Vec> out;
    for (const Vec& y : tensor_grid(lo, hi, n))
        if ((y - *x).norm() <= 2.0 * R * (1.0 + 1e-12)) out.push_back(y);
    if (box.contains(*x) && std::find(out.begin(), out.end(), *x) == out.end()) out.push_back(*x);
    if (out.empty()) out.push_back(lo.cwiseMax(x->cwiseMin(hi)));
    return out;
}

std::vector<Vec> unit_ball_grid(int dim, const IndexGridSettings& g) {
    std::vector<Vec> dirs;
    if (dim == 1) {
        dirs = {Vec::Constant(1, 1.0), Vec::Constant(1, -1.0)};
    } else if (dim == 2) {
        for (int k = 0; k < g.eps_directions; ++k) {
            const double a = 2.0 * std::numbers::pi * k / g.eps_directions;
            Vec v(2);
            v << std::cos(a), std::sin(a);
            dirs.push_back(v);
        }
    } else {
        // Fibonacci points on the sphere, completed by the coordinate axes.
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int k = 0; k < g.eps_directions; ++k) {
            Vec v = Vec::Zero(dim);
            const double z = 1.0 - 2.0 * (k + 0.5) / g.eps_directions;
            const double r = std::sqrt(1.0 - z * z);
            v(0) = r * std::cos(golden * k);
            v(1) = r * std::sin(golden * k);
            v(2) = z;
            dirs.push_back(v.normalized());
        }
        for (int i = 0; i < dim; ++i) {
            Vec e = Vec::Zero(dim);
            e(i) = 1.0;
            dirs.push_back(e);
            dirs.push_back(-e);
        }
    }
    std::vector<Vec> out;
    out.push_back(Vec::Zero(dim));
    for (int k = 1; k <= g.eps_radii; ++k) {
        const double r = static_cast<double>(k) / g.eps_radii;
        for (const Vec& v : dirs) out.push_back(r * v);
    }
    return out;
}

double quantity_H(const StateModel& model, double R, const std::optional<Vec>& x, const IndexGridSettings& g) {
    if (!(R > 0.0)) throw ConfigError("R", "must be positive");
    const std::vector<Vec> ys = index_y_grid(model, R, x, g);
    const std::vector<Vec> eps = unit_ball_grid(model.dim(), g);
    double best = 0.0;
    for (const Vec& y : ys)
        for (const Vec& e : eps) best = std::max(best, std::abs(eval_symbol(model, y, e / R)));
    return best;
}

double quantity_h(const StateModel& model, double R, double c0, const std::optional<Vec>& x,
                  const IndexGridSettings& g) {
    if (!(R > 0.0)) throw ConfigError("R", "must be positive");
    if (!std::isfinite(c0)) throw SectorError("h is only defined under the sector condition");
    const double kappa = kappa_from_c0(c0);
    const double scale = 1.0 / (4.0 * kappa * R);
    const std::vector<Vec> ys = index_y_grid(model, R, x, g);
    const std::vector<Vec> eps = unit_ball_grid(model.dim(), g);
    double inf_y = kNever;
    for (const Vec& y : ys) {
        double sup_eps = -kNever;
        for (const Vec& e : eps) sup_eps = std::max(sup_eps, eval_symbol(model, y, scale * e).real());
        inf_y = std::min(inf_y, sup_eps);
    }
    return inf_y;
}

double quantity_h(const StateModel& model, double R, const ConditionEstimate& sector, const std::optional<Vec>& x,
                  const IndexGridSettings& g) {
    if (!sector.satisfied) throw SectorError("h is only defined under the sector condition");
    return quantity_h(model, R, sector.constant, x, g);
}

ConditionEstimate index_sector_check(const StateModel& model, double xi_lo, double xi_hi, const std::optional<Vec>& x,
                                     const IndexGridSettings& g) {
    const int d = model.dim();
    std::vector<Vec> dirs;
    for (const Vec& v : unit_ball_grid(d, g))
        if (std::abs(v.norm() - 1.0) < 1e-12) dirs.push_back(v);
    std::vector<Vec> xis;
    for (double r : logspace(xi_lo, xi_hi, 33))
        for (const Vec& v : dirs) xis.push_back(r * v);
    const double R_probe = x ? 0.5 * (model.domain().upper - model.domain().lower).maxCoeff() : 1.0;
    return check_sector(model, index_y_grid(model, R_probe, x, g), xis);
}

IndexReport estimate_indices(const StateModel& model, double R_min, double R_max, int n_points,
                             IndexDirection direction, const std::optional<Vec>& x_in, const IndexGridSettings& g) {
    if (!(R_min > 0.0) || !(R_max > R_min)) throw ConfigError("R", "need 0 < rmin < rmax");
    if (n_points < 16) throw ConfigError("n_points", "need at least 16 grid points");
    if (R_max / R_min < 1e3 * (1.0 - 1e-12)) throw ConfigError("R", "grid must span at least three decades");

    IndexReport rep;
    rep.direction = direction;
    std::optional<Vec> x = x_in;
    if (direction == IndexDirection::infinity && !x) x = model.domain().center();
    // Indices at the origin use the global H(R), h(R).
    const std::optional<Vec> local = direction == IndexDirection::infinity ? x : std::nullopt;
    rep.x = local;
    rep.R_grid = logspace(R_min, R_max, n_points);

    const ConditionEstimate sector = index_sector_check(model, 1.0 / (10.0 * R_max), 10.0 / R_min, local, g);
    rep.sector_satisfied = sector.satisfied;
    rep.c0 = sector.constant;
    if (sector.satisfied) rep.kappa = kappa_from_c0(sector.constant);

    rep.H_values.resize(rep.R_grid.size());
    if (sector.satisfied) rep.h_values.resize(rep.R_grid.size());
    parallel_for(rep.R_grid.size(), [&](std::size_t i) {
        rep.H_values[i] = quantity_H(model, rep.R_grid[i], local, g);
        if (sector.satisfied) rep.h_values[i] = quantity_h(model, rep.R_grid[i], sector.constant, local, g);
    });

    // A finite frequency grid can miss peaks of oscillating symbols, so the raw grid
    // values need not be monotone. Frequencies probed at a larger R lie in the ball of
    // every smaller R, which makes the running maximum from the right a sharper bound.
    auto tail_of = [&](std::size_t i) {
        const double lo = direction == IndexDirection::origin ? R_max / 10.0 : R_min;
        const double hi = direction == IndexDirection::origin ? R_max : 10.0 * R_min;
        return rep.R_grid[i] >= lo * (1.0 - 1e-12) && rep.R_grid[i + 1] <= hi * (1.0 + 1e-12);
    };
    std::size_t raw_violations = 0;
    auto envelope = [&](std::vector<double>& v) {
        for (std::size_t i = v.size() - 1; i-- > 0;) {
            if (v[i + 1] > v[i] * (1.0 + 1e-9) + 1e-300) {
                if (tail_of(i)) ++raw_violations;
                v[i] = v[i + 1];
            }
        }
    };
    envelope(rep.H_values);
    if (sector.satisfied) envelope(rep.h_values);

    auto slopes = [&](const std::vector<double>& v) {
        std::vector<double> s;
        for (std::size_t i = 0; i + 1 < v.size(); ++i) {
            const double a = std::log(v[i + 1]) - std::log(v[i]);
            const double b = std::log(rep.R_grid[i + 1]) - std::log(rep.R_grid[i]);
            s.push_back(-a / b);
        }
        return s;
    };
    rep.H_slopes = slopes(rep.H_values);
    if (sector.satisfied) rep.h_slopes = slopes(rep.h_values);

    // Tail decade: the largest R for the origin, the smallest for infinity.
    const double tail_lo = direction == IndexDirection::origin ? R_max / 10.0 : R_min;
    const double tail_hi = direction == IndexDirection::origin ? R_max : 10.0 * R_min;
    rep.tail_begin = rep.H_slopes.size();
    rep.tail_end = 0;
    for (std::size_t i = 0; i < rep.H_slopes.size(); ++i) {
        const double lo = rep.R_grid[i];
        const double hi = rep.R_grid[i + 1];
        if (lo >= tail_lo * (1.0 - 1e-12) && hi <= tail_hi * (1.0 + 1e-12)) {
            rep.tail_begin = std::min(rep.tail_begin, i);
            rep.tail_end = std::max(rep.tail_end, i + 1);
        }
    }
    if (rep.tail_begin >= rep.tail_end) throw ConfigError("n_points", "grid too coarse for a tail decade");

    auto range = [&](const std::vector<double>& s, double& lo, double& hi) {
        lo = kNever;
        hi = -kNever;
        for (std::size_t i = rep.tail_begin; i < rep.tail_end; ++i) {
            lo = std::min(lo, s[i]);
            hi = std::max(hi, s[i]);
        }
    };
    range(rep.H_slopes, rep.H_tail_min, rep.H_tail_max);
    if (sector.satisfied) range(rep.h_slopes, rep.h_tail_min, rep.h_tail_max);

    // Raw grid values that rise with R inside the tail make the proxies unreliable.
    rep.indeterminate = raw_violations > 0;
    for (std::size_t i = rep.tail_begin; i < rep.tail_end; ++i)
        if (!std::isfinite(rep.H_slopes[i])) rep.indeterminate = true;
    if (rep.indeterminate) rep.notes = "H not monotone (or zero) over the tail on the raw grid; slopes are unreliable";
    if (!sector.satisfied) rep.notes += (rep.notes.empty() ? "" : "; ") + std::string("sector condition fails, h skipped");

    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (direction == IndexDirection::origin) {
        rep.beta0 = rep.H_tail_min;
        rep.beta0_lower = rep.H_tail_max;
        rep.delta0_upper = sector.satisfied ? rep.h_tail_min : nan;
        rep.delta0 = sector.satisfied ? rep.h_tail_max : nan;
        rep.beta_inf_x = rep.beta_inf_x_lower = rep.delta_inf_x_upper = rep.delta_inf_x = nan;
    } else {
        rep.beta_inf_x = rep.H_tail_max;
        rep.beta_inf_x_lower = rep.H_tail_min;
        rep.delta_inf_x_upper = sector.satisfied ? rep.h_tail_max : nan;
        rep.delta_inf_x = sector.satisfied ? rep.h_tail_min : nan;
        rep.beta0 = rep.beta0_lower = rep.delta0_upper = rep.delta0 = nan;
    }
    return rep;
}

Json report_json(const IndexReport& r) {
    Json j;
    j["direction"] = to_string(r.direction);
    j["x"] = r.x ? to_json(*r.x) : Json(nullptr);
    j["R_grid"] = r.R_grid;
    j["H"] = r.H_values;
    j["h"] = r.h_values;
    j["sector_satisfied"] = r.sector_satisfied;
    j["c0"] = r.c0;
    j["kappa"] = r.kappa;
    j["H_slopes"] = r.H_slopes;
    j["h_slopes"] = r.h_slopes;
    j["tail"] = Json{{"begin", r.tail_begin}, {"end", r.tail_end}};
    j["slope_spread"] = Json{{"H_min", r.H_tail_min}, {"H_max", r.H_tail_max}, {"h_min", r.h_tail_min}, {"h_max", r.h_tail_max}};
    j["indeterminate"] = r.indeterminate;
    j["notes"] = r.notes;
    j["indices"] = Json{{"beta0", r.beta0},
                        {"beta0_lower", r.beta0_lower},
                        {"delta0_upper", r.delta0_upper},
                        {"delta0", r.delta0},
                        {"beta_inf_x", r.beta_inf_x},
                        {"beta_inf_x_lower", r.beta_inf_x_lower},
                        {"delta_inf_x_upper", r.delta_inf_x_upper},
                        {"delta_inf_x", r.delta_inf_x}};
    return j;
}

void write_slope_csv(std::ostream& os, const IndexReport& r) {
    os << "R,H,h,slope_H,slope_h,tail\n";
    for (std::size_t i = 0; i < r.R_grid.size(); ++i) {
        os << format_number(r.R_grid[i]) << ',' << format_number(r.H_values[i]) << ','
           << (r.h_values.empty() ? "nan" : format_number(r.h_values[i])) << ',';
        if (i + 1 < r.R_grid.size()) {
            os << format_number(r.H_slopes[i]) << ',' << (r.h_slopes.empty() ? "nan" : format_number(r.h_slopes[i]));
            os << ',' << ((i >= r.tail_begin && i < r.tail_end) ? 1 : 0);
        } else {
            os << ",,0";
        }
        os << '\n';
    }
}

// ---------------------------------------------------------------------------
// Maximum process
// ---------------------------------------------------------------------------

namespace {

std::vector<std::size_t> snap_to_grid(const std::vector<double>& t_grid, double dt, bool strict) {
    std::vector<std::size_t> steps;
    for (double t : t_grid) {
        if (!(t > 0.0)) throw ConfigError("t_grid", "times must be positive");
        const double s = t / dt;
        if (strict && std::abs(s - std::round(s)) > 1e-9 * s) throw ConfigError("t_grid", "times must be multiples of dt");
        steps.push_back(static_cast<std::size_t>(std::max(1.0, std::round(s))));
    }
    return steps;
}

// Running maxima of |X_s - x| at the requested step indices, one row per path.
std::vector<double> maxima_at(const StateModel& model, const Vec& x, const std::vector<std::size_t>& steps,
                              const McSettings& mc) {
    const std::size_t last = *std::max_element(steps.begin(), steps.end());
    SimSpec spec;
    spec.x0 = x;
    spec.dt = mc.dt;
    spec.horizon = static_cast<double>(last) * mc.dt;
    spec.n_paths = mc.n_paths;
    spec.seed = mc.seed;
    spec.explosion_threshold = mc.explosion_threshold;
    const Simulator sim(model, spec);
    const std::size_t n_t = steps.size();
    std::vector<double> out(mc.n_paths * n_t, 0.0);
    const int d = model.dim();
    parallel_for(mc.n_paths, [&](std::size_t p) {
        PathWalker w = sim.walker(p, x);
        double running = 0.0;
        for (std::size_t k = 1; k <= last; ++k) {
            if (!w.step()) {
                running = std::numeric_limits<double>::quiet_NaN();
                break;
            }
            if (w.status() != PointKind::finite) {
                running = kNever;
            } else {
                double sq = 0.0;
                for (int i = 0; i < d; ++i) {
                    const double v = w.state()[i] - x(i);
                    sq += v * v;
                }
                running = std::max(running, std::sqrt(sq));
            }
            for (std::size_t j = 0; j < n_t; ++j)
                if (steps[j] == k) out[p * n_t + j] = running;
        }
    });
    return out;
}

double relative_change(double full, double half) {
    if (full == 0.0 && half == 0.0) return 0.0;
    return std::abs(full - half) / std::max(std::abs(full), std::abs(half));
}

}  // namespace

MaximalInequalityReport verify_maximal_inequality(const StateModel& model, const Vec& x,
                                                  const std::vector<double>& t_grid,
                                                  const std::vector<double>& R_grid, const McSettings& mc,
                                                  const IndexGridSettings& g) {
    if (mc.n_paths < 2) throw ConfigError("paths", "need at least two paths");
    const std::vector<std::size_t> steps = snap_to_grid(t_grid, mc.dt, true);
    const std::vector<double> maxima = maxima_at(model, x, steps, mc);
    const std::size_t n_t = steps.size();

    MaximalInequalityReport rep;
    rep.x = x;
    rep.n_paths = mc.n_paths;
    std::optional<double> c0;
    {
        const double r_max = *std::max_element(R_grid.begin(), R_grid.end());
        const double r_min = *std::min_element(R_grid.begin(), R_grid.end());
        const ConditionEstimate sector = index_sector_check(model, 1.0 / (10.0 * r_max), 10.0 / r_min, x, g);
        if (sector.satisfied)
            c0 = sector.constant;
        else
            rep.notice = "sector condition fails; ratio2 skipped";
    }
    rep.ratio2_available = c0.has_value();

    const std::size_t half = mc.n_paths / 2;
    for (double R : R_grid) {
        const double H = quantity_H(model, R, x, g);
        const double h = c0 ? quantity_h(model, R, *c0, x, g) : std::numeric_limits<double>::quiet_NaN();
        for (std::size_t j = 0; j < n_t; ++j) {
            MaximalCell cell;
            cell.t = static_cast<double>(steps[j]) * mc.dt;
            cell.R = R;
            cell.H = H;
            cell.h = h;
            std::size_t hits = 0, hits_half = 0, used = 0, used_half = 0;
            for (std::size_t p = 0; p < mc.n_paths; ++p) {
                const double m = maxima[p * n_t + j];
                if (std::isnan(m)) continue;
                ++used;
                if (m >= R) ++hits;
                if (p < half) {
                    ++used_half;
                    if (m >= R) ++hits_half;
                }
            }
            cell.p_exceed = static_cast<double>(hits) / static_cast<double>(used);
            cell.p_exceed_half = static_cast<double>(hits_half) / static_cast<double>(used_half);
            // No exceedances give a zero ratio even where H vanishes.
            auto ratio = [&](double p) { return p == 0.0 ? 0.0 : p / (cell.t * H); };
            cell.ratio1 = ratio(cell.p_exceed);
            cell.ratio1_half = ratio(cell.p_exceed_half);
            if (c0) {
                cell.ratio2 = (1.0 - cell.p_exceed) * cell.t * h;
                cell.ratio2_half = (1.0 - cell.p_exceed_half) * cell.t * h;
            }
            rep.sup_ratio1 = std::max(rep.sup_ratio1, cell.ratio1);
            rep.sup_ratio1_half = std::max(rep.sup_ratio1_half, cell.ratio1_half);
            rep.sup_ratio2 = std::max(rep.sup_ratio2, cell.ratio2);
            rep.sup_ratio2_half = std::max(rep.sup_ratio2_half, cell.ratio2_half);
            rep.cells.push_back(cell);
        }
    }
    rep.ratio1_change = relative_change(rep.sup_ratio1, rep.sup_ratio1_half);
    rep.ratio2_change = relative_change(rep.sup_ratio2, rep.sup_ratio2_half);
    rep.finite = std::isfinite(rep.sup_ratio1) && std::isfinite(rep.sup_ratio1_half) &&
                 (!c0 || (std::isfinite(rep.sup_ratio2) && std::isfinite(rep.sup_ratio2_half)));
    rep.stable = rep.ratio1_change < 0.5 && (!c0 || rep.ratio2_change < 0.5);
    return rep;
}

ScalingReport scaling_diagnostic(const StateModel& model, const Vec& x, const std::vector<double>& lambdas,
                                 const std::vector<double>& t_grid, TimeLimit limit, const McSettings& mc) {
    if (t_grid.size() < 2) throw ConfigError("t_grid", "need at least two times");
    std::vector<std::size_t> steps = snap_to_grid(t_grid, mc.dt, false);
    std::sort(steps.begin(), steps.end());
    steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
    if (steps.size() < 2) throw ConfigError("t_grid", "need at least two distinct grid times");
    const std::vector<double> maxima = maxima_at(model, x, steps, mc);
    const std::size_t n_t = steps.size();

    ScalingReport rep;
    rep.limit = limit;
    rep.n_paths = mc.n_paths;
    std::vector<double> logt(n_t);
    for (std::size_t j = 0; j < n_t; ++j) {
        rep.t_grid.push_back(static_cast<double>(steps[j]) * mc.dt);
        logt[j] = std::log(rep.t_grid.back());
    }
    double mean_lt = 0.0;
    for (double v : logt) mean_lt += v;
    mean_lt /= static_cast<double>(n_t);
    double stt = 0.0;
    for (double v : logt) stt += (v - mean_lt) * (v - mean_lt);

    // Slope of log max against log t per path; shifting by -log(t)/lambda is linear in the slope.
    std::vector<double> path_slope;
    path_slope.reserve(mc.n_paths);
    for (std::size_t p = 0; p < mc.n_paths; ++p) {
        double sxy = 0.0;
        bool ok = true;
        for (std::size_t j = 0; j < n_t; ++j) {
            const double m = maxima[p * n_t + j];
            if (!(m > 0.0) || !std::isfinite(m)) {
                ok = false;
                break;
            }
            sxy += (logt[j] - mean_lt) * std::log(m);
        }
        if (ok) path_slope.push_back(sxy / stt);
    }
    for (double lambda : lambdas) {
        if (!(lambda > 0.0)) throw ConfigError("lambda", "must be positive");
        ScalingResult res;
        res.lambda = lambda;
        std::vector<double> g;
        g.reserve(path_slope.size());
        for (double s : path_slope) {
            const double slope = s - 1.0 / lambda;
            g.push_back(limit == TimeLimit::small_time ? slope : -slope);
        }
        std::size_t to_zero = 0, to_inf = 0;
        for (double v : g) {
            if (v > 0.2) ++to_zero;
            if (v < -0.2) ++to_inf;
        }
        if (!g.empty()) {
            std::vector<double> sorted = g;
            std::sort(sorted.begin(), sorted.end());
            const std::size_t n = sorted.size();
            res.median_slope = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
            res.fraction_to_zero = static_cast<double>(to_zero) / static_cast<double>(n);
            res.fraction_to_infinity = static_cast<double>(to_inf) / static_cast<double>(n);
            if (res.median_slope > 0.2)
                res.classification = ScalingClass::to_zero;
            else if (res.median_slope < -0.2)
                res.classification = ScalingClass::to_infinity;
        }
        rep.results.push_back(res);
    }
    return rep;
}

Json report_json(const MaximalInequalityReport& r) {
    Json j;
    j["x"] = to_json(r.x);
    j["n_paths"] = r.n_paths;
    Json cells = Json::array();
    for (const MaximalCell& c : r.cells)
        cells.push_back(Json{{"t", c.t},
                             {"R", c.R},
                             {"H", c.H},
                             {"h", c.h},
                             {"p_exceed", c.p_exceed},
                             {"p_exceed_half", c.p_exceed_half},
                             {"ratio1", c.ratio1},
                             {"ratio1_half", c.ratio1_half},
                             {"ratio2", c.ratio2},
                             {"ratio2_half", c.ratio2_half}});
    j["cells"] = cells;
    j["sup_ratio1"] = r.sup_ratio1;
    j["sup_ratio1_half"] = r.sup_ratio1_half;
    j["ratio1_change"] = r.ratio1_change;
    j["ratio2_available"] = r.ratio2_available;
    j["sup_ratio2"] = r.sup_ratio2;
    j["sup_ratio2_half"] = r.sup_ratio2_half;
    j["ratio2_change"] = r.ratio2_change;
    j["finite"] = r.finite;
    j["stable"] = r.stable;
    j["notice"] = r.notice;
    return j;
}

Json report_json(const ScalingReport& r) {
    Json j;
    j["limit"] = to_string(r.limit);
    j["t_grid"] = r.t_grid;
    j["n_paths"] = r.n_paths;
    Json res = Json::array();
    for (const ScalingResult& s : r.results)
        res.push_back(Json{{"lambda", s.lambda},
                           {"median_slope", s.median_slope},
                           {"fraction_to_zero", s.fraction_to_zero},
                           {"fraction_to_infinity", s.fraction_to_infinity},
                           {"classification", to_string(s.classification)}});
    j["results"] = res;
    return j;
}

}  // namespace symbolkit
