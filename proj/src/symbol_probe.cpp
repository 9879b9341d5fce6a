#include "symbolkit/symbol_probe.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "symbolkit/errors.hpp"
#include "symbolkit/format.hpp"
#include "symbolkit/parallel.hpp"

namespace symbolkit {

void ProbeSettings::validate() const {
    if (!(K_radius > 0.0)) throw ConfigError("K_radius", "must be positive");
    if (t_ladder.empty()) throw ConfigError("t_ladder", "must not be empty");
    for (std::size_t k = 0; k < t_ladder.size(); ++k) {
        if (!(t_ladder[k] > 0.0)) throw ConfigError("t_ladder", "times must be positive");
        if (k > 0 && !(t_ladder[k] < t_ladder[k - 1])) throw ConfigError("t_ladder", "must be strictly decreasing");
    }
    if (n_samples < 2) throw ConfigError("n_samples", "must be at least 2");
    if (extrapolate && t_ladder.size() < 2) throw ConfigError("t_ladder", "extrapolation needs at least two times");
    if (dt < 0.0) throw ConfigError("dt", "must be nonnegative");
}

double ProbeSettings::effective_dt() const { return dt > 0.0 ? dt : t_ladder.back() / 50.0; }

double LadderEstimate::stderr() const { return std::hypot(stderr_re, stderr_im); }

std::vector<double> intercept_weights(const std::vector<double>& t) {
    const double n = static_cast<double>(t.size());
    double mean = 0.0;
    for (double v : t) mean += v;
    mean /= n;
    double stt = 0.0;
    for (double v : t) stt += (v - mean) * (v - mean);
    std::vector<double> w(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) w[k] = 1.0 / n - mean * (t[k] - mean) / stt;
    return w;
}

namespace {

struct Moments {
    double sum_re = 0.0, sum_im = 0.0, sq_re = 0.0, sq_im = 0.0;

    void add(Complex z) {
        sum_re += z.real();
        sum_im += z.imag();
        sq_re += z.real() * z.real();
        sq_im += z.imag() * z.imag();
    }
    void merge(const Moments& o) {
        sum_re += o.sum_re;
        sum_im += o.sum_im;
        sq_re += o.sq_re;
        sq_im += o.sq_im;
    }
    LadderEstimate estimate(double t, double n) const {
        LadderEstimate e;
        e.t = t;
        const double mr = sum_re / n;
        const double mi = sum_im / n;
        e.estimate = Complex(mr, mi);
        e.stderr_re = std::sqrt(std::max(0.0, (sq_re - n * mr * mr) / (n - 1.0)) / n);
        e.stderr_im = std::sqrt(std::max(0.0, (sq_im - n * mi * mi) / (n - 1.0)) / n);
        return e;
    }
};

struct ChunkResult {
    std::vector<Moments> rung;       // [xi][rung]
    std::vector<Moments> intercept;  // [xi]
    std::size_t used = 0;
    std::size_t first_step_exits = 0;
    std::size_t killed = 0;
    std::size_t invalid = 0;
};

}  // namespace

std::vector<SymbolReport> estimate_symbols(const StateModel& model, const Vec& x, const std::vector<Vec>& xis,
                                           const ProbeSettings& settings) {
    settings.validate();
    if (xis.empty()) return {};
    const double dt = settings.effective_dt();
    const std::size_t n_rungs = settings.t_ladder.size();
    std::vector<std::size_t> rung_step(n_rungs);
    for (std::size_t k = 0; k < n_rungs; ++k) {
        const double s = settings.t_ladder[k] / dt;
        if (std::abs(s - std::round(s)) > 1e-9 * s) throw ConfigError("t_ladder", "times must be multiples of dt");
        rung_step[k] = static_cast<std::size_t>(std::llround(s));
    }
    const std::vector<double> weights =
        settings.extrapolate ? intercept_weights(settings.t_ladder) : std::vector<double>(n_rungs, 0.0);

    SimSpec spec;
    spec.x0 = x;
    spec.horizon = settings.t_ladder.front();
    spec.dt = dt;
    spec.n_paths = settings.n_samples;
    spec.seed = settings.seed;
    spec.explosion_threshold = settings.explosion_threshold;
    const Simulator sim(model, spec);
    const std::size_t n_steps = sim.n_steps();

    const std::size_t n_xi = xis.size();
    const int d = model.dim();
    const double K = settings.K_radius;
    const std::size_t n_chunks = std::min<std::size_t>(settings.n_samples, 256);
    std::vector<ChunkResult> chunks(n_chunks);

    parallel_for(n_chunks, [&](std::size_t c) {
        ChunkResult& R = chunks[c];
        R.rung.assign(n_xi * n_rungs, Moments{});
        R.intercept.assign(n_xi, Moments{});
        std::vector<Complex> y(n_xi * n_rungs);
        std::vector<double> rel(static_cast<std::size_t>(d));
        const std::size_t begin = c * settings.n_samples / n_chunks;
        const std::size_t end = (c + 1) * settings.n_samples / n_chunks;
        for (std::size_t p = begin; p < end; ++p) {
            PathWalker w = sim.walker(p, x);
            bool stopped = false;
            bool killed = false;
            bool invalid = false;
            std::size_t next_rung = n_rungs;  // rungs visited from the smallest time upward
            for (std::size_t step = 1; step <= n_steps; ++step) {
                if (!stopped && !killed) {
                    if (!w.step()) {
                        invalid = true;
                        break;
                    }
                    if (w.status() != PointKind::finite) {
                        killed = true;
                    } else {
                        double sq = 0.0;
                        for (int i = 0; i < d; ++i) {
                            rel[static_cast<std::size_t>(i)] = w.state()[i] - x(i);
                            sq += rel[static_cast<std::size_t>(i)] * rel[static_cast<std::size_t>(i)];
                        }
                        if (std::sqrt(sq) > K) {
                            stopped = true;
                            if (step == 1) ++R.first_step_exits;
                        }
                    }
                }
                while (next_rung > 0 && rung_step[next_rung - 1] == step) {
                    const std::size_t k = next_rung - 1;
                    const double t = settings.t_ladder[k];
                    for (std::size_t j = 0; j < n_xi; ++j) {
                        Complex e(0.0, 0.0);
                        if (!killed) {
                            double theta = 0.0;
                            for (int i = 0; i < d; ++i) theta += (w.state()[i] - x(i)) * xis[j](i);
                            e = Complex(std::cos(theta), std::sin(theta));
                        }
                        y[j * n_rungs + k] = (Complex(1.0, 0.0) - e) / t;
                    }
                    --next_rung;
                }
            }
            if (invalid) {
                ++R.invalid;
                continue;
            }
            ++R.used;
            if (killed) ++R.killed;
            for (std::size_t j = 0; j < n_xi; ++j) {
                Complex icpt(0.0, 0.0);
                for (std::size_t k = 0; k < n_rungs; ++k) {
                    R.rung[j * n_rungs + k].add(y[j * n_rungs + k]);
                    icpt += weights[k] * y[j * n_rungs + k];
                }
                R.intercept[j].add(icpt);
            }
        }
    });

    ChunkResult total;
    total.rung.assign(n_xi * n_rungs, Moments{});
    total.intercept.assign(n_xi, Moments{});
    for (const ChunkResult& R : chunks) {
        for (std::size_t i = 0; i < R.rung.size(); ++i) total.rung[i].merge(R.rung[i]);
        for (std::size_t i = 0; i < R.intercept.size(); ++i) total.intercept[i].merge(R.intercept[i]);
        total.used += R.used;
        total.first_step_exits += R.first_step_exits;
        total.killed += R.killed;
        total.invalid += R.invalid;
    }
    if (total.used < 2) throw EstimationError("fewer than two valid paths for the symbol estimate");
    const double n = static_cast<double>(total.used);
    const double exit_fraction = static_cast<double>(total.first_step_exits) / n;
    if (exit_fraction >= 0.99)
        throw EstimationError("K radius " + format_number(K) + " too small for dt " + format_number(dt) + ": " +
                              format_number(100.0 * exit_fraction) + "% of paths leave K in the first step");

    std::vector<SymbolReport> out;
    out.reserve(n_xi);
    for (std::size_t j = 0; j < n_xi; ++j) {
        SymbolReport r;
        r.x = x;
        r.xi = xis[j];
        r.settings = settings;
        const ExponentValue a = eval_symbol_detailed(model, x, xis[j]);
        r.analytic = a.value;
        r.analytic_error_bound = a.error_bound;
        for (std::size_t k = 0; k < n_rungs; ++k)
            r.ladder.push_back(total.rung[j * n_rungs + k].estimate(settings.t_ladder[k], n));
        if (settings.extrapolate) {
            r.extrapolated = total.intercept[j].estimate(0.0, n);
            r.final_estimate = r.extrapolated;
        } else {
            r.extrapolated = r.ladder.back();
            r.final_estimate = r.ladder.back();
        }
        r.abs_error = std::abs(r.final_estimate.estimate - r.analytic);
        if (std::abs(r.analytic) > 1e-8) r.rel_error = r.abs_error / std::abs(r.analytic);
        r.low_confidence = r.final_estimate.stderr() > std::abs(r.final_estimate.estimate);
        r.first_step_exit_fraction = exit_fraction;
        r.killed_fraction = static_cast<double>(total.killed) / n;
        r.invalid_paths = total.invalid;
        out.push_back(std::move(r));
    }
    return out;
}

SymbolReport estimate_symbol(const StateModel& model, const Vec& x, const Vec& xi, const ProbeSettings& settings) {
    return estimate_symbols(model, x, {xi}, settings).front();
}

IndependenceReport symbol_independence_check(const StateModel& model, const Vec& x, const Vec& xi,
                                             const std::vector<double>& radii, const ProbeSettings& settings) {
    IndependenceReport rep;
    rep.radii = radii;
    for (std::size_t i = 0; i < radii.size(); ++i)
        for (std::size_t k = 0; k < i; ++k)
            if (radii[i] == radii[k]) throw ConfigError("radii", "must be distinct");
    for (double r : radii) {
        ProbeSettings s = settings;
        s.K_radius = r;
        rep.reports.push_back(estimate_symbol(model, x, xi, s));
    }
    for (std::size_t i = 0; i < rep.reports.size(); ++i) {
        for (std::size_t k = 0; k < i; ++k) {
            const LadderEstimate& a = rep.reports[i].final_estimate;
            const LadderEstimate& b = rep.reports[k].final_estimate;
            const double se = std::hypot(a.stderr(), b.stderr());
            const double diff = std::abs(a.estimate - b.estimate);
            const double z = se > 0.0 ? diff / se : (diff > 0.0 ? kNever : 0.0);
            rep.max_pair_z = std::max(rep.max_pair_z, z);
            if (diff > 3.0 * se) rep.consistent = false;
        }
    }
    return rep;
}

namespace {

Json ladder_json(const LadderEstimate& e) {
    return Json{{"t", e.t},
                {"estimate", complex_json(e.estimate)},
                {"stderr_re", e.stderr_re},
                {"stderr_im", e.stderr_im},
                {"stderr", e.stderr()}};
}

}  // namespace

Json report_json(const SymbolReport& r) {
    Json j;
    j["x"] = to_json(r.x);
    j["xi"] = to_json(r.xi);
    j["analytic"] = complex_json(r.analytic);
    j["analytic_error_bound"] = r.analytic_error_bound;
    Json ladder = Json::array();
    for (const LadderEstimate& e : r.ladder) ladder.push_back(ladder_json(e));
    j["ladder"] = ladder;
    j["extrapolated"] = ladder_json(r.extrapolated);
    j["estimate"] = ladder_json(r.final_estimate);
    j["abs_error"] = r.abs_error;
    j["rel_error"] = std::isnan(r.rel_error) ? Json(nullptr) : Json(r.rel_error);
    j["low_confidence"] = r.low_confidence;
    j["first_step_exit_fraction"] = r.first_step_exit_fraction;
    j["killed_fraction"] = r.killed_fraction;
    j["invalid_paths"] = r.invalid_paths;
    j["settings"] = Json{{"K_radius", r.settings.K_radius},
                         {"t_ladder", r.settings.t_ladder},
                         {"n_samples", r.settings.n_samples},
                         {"extrapolate", r.settings.extrapolate},
                         {"dt", r.settings.effective_dt()},
                         {"seed", r.settings.seed}};
    return j;
}

Json report_json(const IndependenceReport& r) {
    Json j;
    j["radii"] = r.radii;
    Json reps = Json::array();
    for (const SymbolReport& s : r.reports) reps.push_back(report_json(s));
    j["reports"] = reps;
    j["max_pair_z"] = r.max_pair_z;
    j["consistent"] = r.consistent;
    return j;
}

void write_symbol_csv(std::ostream& os, const std::vector<SymbolReport>& reports) {
    if (reports.empty()) return;
    const int d = static_cast<int>(reports.front().x.size());
    os << "";
    for (int i = 0; i < d; ++i) os << (i ? "," : "") << "x" << (i + 1);
    for (int i = 0; i < d; ++i) os << ",xi" << (i + 1);
    os << ",analytic_re,analytic_im,estimate_re,estimate_im,stderr_re,stderr_im,abs_error,rel_error,low_confidence\n";
    for (const SymbolReport& r : reports) {
        for (int i = 0; i < d; ++i) os << (i ? "," : "") << format_number(r.x(i));
        for (int i = 0; i < d; ++i) os << ',' << format_number(r.xi(i));
        os << ',' << format_number(r.analytic.real()) << ',' << format_number(r.analytic.imag()) << ','
           << format_number(r.final_estimate.estimate.real()) << ',' << format_number(r.final_estimate.estimate.imag())
           << ',' << format_number(r.final_estimate.stderr_re) << ',' << format_number(r.final_estimate.stderr_im) << ','
           << format_number(r.abs_error) << ',' << format_number(r.rel_error) << ',' << (r.low_confidence ? 1 : 0)
           << '\n';
    }
}

}  // namespace symbolkit
