#include "symbolkit/triplet.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <sstream>

#include "symbolkit/errors.hpp"

namespace symbolkit {

namespace {

constexpr double kQuadratureTolerance = 1e-8;

// sin(u) - u without cancellation for small arguments.
double sin_minus_id(double u) {
    if (std::abs(u) < 0.1) {
        const double u2 = u * u;
        return u * u2 * (-1.0 / 6.0 + u2 * (1.0 / 120.0 + u2 * (-1.0 / 5040.0 + u2 / 362880.0)));
    }
    return std::sin(u) - u;
}

// 1 - cos(u) = 2 sin^2(u/2).
double one_minus_cos(double u) {
    const double s = std::sin(0.5 * u);
    return 2.0 * s * s;
}

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;
};

// One 31-point rule on [a, b]. The rule is applied on [-1, 1] to the mapped integrand:
// Boost 1.74 leaves subinterval error estimates unscaled by the half-width, so its own
// adaptive driver misjudges narrow intervals.
template <class F>
QuadResult gk_panel(F& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    auto g = [&](double u) { return half * f(mid + half * u); };
    QuadResult r;
    r.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, -1.0, 1.0, 0, 0.0, &r.error, &r.l1);
    return r;
}

template <class F>
QuadResult gk_adaptive(F& f, double a, double b, double tol, int depth) {
    QuadResult r = gk_panel(f, a, b);
    if (depth == 0 || r.error <= tol * r.l1 || !(b > a)) return r;
    const double mid = 0.5 * (a + b);
    const QuadResult left = gk_adaptive(f, a, mid, tol, depth - 1);
    const QuadResult right = gk_adaptive(f, mid, b, tol, depth - 1);
    return {left.value + right.value, left.error + right.error, left.l1 + right.l1};
}

template <class F>
QuadResult gauss_kronrod(F f, double a, double b, const char* what) {
    QuadResult r;
    if (!(b > a)) return r;
    r = gk_adaptive(f, a, b, 1e-11, 24);
    if (!std::isfinite(r.value)) throw QuadratureError(std::string(what) + ": non-finite integral", r.error);
    const double scale = std::max(r.l1, 1e-300);
    if (r.error > kQuadratureTolerance * scale && r.error > 1e-15)
        throw QuadratureError(std::string(what) + ": tolerance 1e-8 not reached", r.error / scale);
    return r;
}

// Integral over (0, b] of a function that may be singular at 0.
template <class F>
double tanh_sinh_to(F f, double b, const char* what) {
    if (!(b > 0.0)) return 0.0;
    boost::math::quadrature::tanh_sinh<double> integrator;
    double error = 0.0;
    double l1 = 0.0;
    double value = 0.0;
    try {
        // Integrands like y^2 n(y) are 0 * inf once y^2 underflows; that sliver carries no mass.
        auto g = [&](double y) {
            const double v = f(y);
            return !std::isfinite(v) && y < 1e-100 ? 0.0 : v;
        };
        value = integrator.integrate(g, 0.0, b, 1e-10, &error, &l1);
    } catch (const std::exception& e) {
        throw ModelError(std::string(what) + ": integral near the origin diverges (" + e.what() + ")");
    }
    if (!std::isfinite(value) || error > 1e-6 * std::max(std::abs(l1), 1e-300) + 1e-300)
        throw ModelError(std::string(what) + ": integral near the origin diverges or is unresolved");
    return value;
}

}  // namespace

// ---------------------------------------------------------------------------
// CutoffFunction
// ---------------------------------------------------------------------------

CutoffFunction CutoffFunction::ball(double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw ModelError("cut-off radius must be positive and finite");
    CutoffFunction c;
    c.kind_ = Kind::indicator_ball;
    c.radius_ = radius;
    return c;
}

CutoffFunction CutoffFunction::product(Vec radii) {
    if (radii.size() == 0) throw ModelError("product cut-off needs at least one radius");
    for (Eigen::Index i = 0; i < radii.size(); ++i)
        if (!(radii(i) > 0.0) || !std::isfinite(radii(i)))
            throw ModelError("product cut-off radii must be positive and finite");
    CutoffFunction c;
    c.kind_ = Kind::product_indicator;
    c.radius_ = radii.minCoeff();
    c.radii_ = std::move(radii);
    return c;
}

double CutoffFunction::operator()(const Vec& y) const {
    if (kind_ == Kind::indicator_ball) return y.norm() <= radius_ ? 1.0 : 0.0;
    if (y.size() != radii_.size()) throw ModelError("cut-off dimension mismatch");
    for (Eigen::Index i = 0; i < y.size(); ++i)
        if (std::abs(y(i)) > radii_(i)) return 0.0;
    return 1.0;
}

double CutoffFunction::operator()(double y) const {
    const double r = kind_ == Kind::indicator_ball ? radius_ : radii_(0);
    return std::abs(y) <= r ? 1.0 : 0.0;
}

double CutoffFunction::inner_radius() const { return radius_; }

std::string CutoffFunction::describe() const {
    std::ostringstream os;
    os.precision(17);
    if (kind_ == Kind::indicator_ball) {
        os << "indicator_ball(radius=" << radius_ << ")";
    } else {
        os << "product_indicator(radii=[";
        for (Eigen::Index i = 0; i < radii_.size(); ++i) os << (i ? "," : "") << radii_(i);
        os << "])";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// DensityData
// ---------------------------------------------------------------------------

double DensityData::truncated_first_moment(double r) const {
    double sum = 0.0;
    double prev = 0.0;
    for (std::size_t k = 0; k < cell_lower.size(); ++k) {
        const double mass = rate * (cell_cdf[k] - prev);
        prev = cell_cdf[k];
        const double lo = std::max(cell_lower[k], -r);
        const double hi = std::min(cell_upper[k], r);
        if (hi <= lo) continue;
        const double width = cell_upper[k] - cell_lower[k];
        sum += mass / width * 0.5 * (hi * hi - lo * lo);
    }
    return sum;
}

double DensityData::sample_jump(double u1, double u2) const {
    auto it = std::upper_bound(cell_cdf.begin(), cell_cdf.end(), u1);
    std::size_t k = static_cast<std::size_t>(it - cell_cdf.begin());
    if (k >= cell_cdf.size()) k = cell_cdf.size() - 1;
    return cell_lower[k] + u2 * (cell_upper[k] - cell_lower[k]);
}

// ---------------------------------------------------------------------------
// LevyMeasure
// ---------------------------------------------------------------------------

LevyMeasure LevyMeasure::zero() { return LevyMeasure{}; }

LevyMeasure LevyMeasure::discrete(std::vector<Atom> atoms) {
    LevyMeasure m;
    m.kind_ = atoms.empty() ? Kind::zero : Kind::discrete;
    for (const Atom& a : atoms) {
        if (!(a.rate > 0.0) || !std::isfinite(a.rate)) throw ModelError("atom rate must be positive and finite");
        if (a.jump.size() == 0 || !a.jump.allFinite()) throw ModelError("atom jump must be a finite vector");
        if (a.jump.squaredNorm() == 0.0) throw ModelError("atom at the origin (N({0}) must vanish)");
        if (a.jump.size() != atoms.front().jump.size()) throw ModelError("atoms have inconsistent dimensions");
    }
    m.atoms_ = std::move(atoms);
    return m;
}

LevyMeasure LevyMeasure::alpha_stable(double alpha, double scale) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw ModelError("stable index alpha must lie in (0, 2], got " + std::to_string(alpha));
    if (!(scale > 0.0) || !std::isfinite(scale)) throw ModelError("stable scale must be positive, got " + std::to_string(scale));
    LevyMeasure m;
    m.kind_ = Kind::alpha_stable;
    m.alpha_ = alpha;
    m.scale_ = scale;
    return m;
}

LevyMeasure LevyMeasure::density(std::function<double(double)> n, const DensityOptions& options) {
    const double y_max = options.y_max;
    if (!(y_max > 0.0) || !std::isfinite(y_max)) throw ModelError("density y_max must be positive and finite");

    auto data = std::make_shared<DensityData>();
    data->n = n;
    data->y_max = y_max;
    auto sym = [&](double y) { return n(y) + n(-y); };

    // Pointwise sanity on a log grid of both half-lines.
    for (int k = 0; k <= 200; ++k) {
        const double y = y_max * std::pow(10.0, -12.0 * k / 200.0);
        for (double s : {y, -y}) {
            const double v = n(s);
            if (!std::isfinite(v) || v < 0.0)
                throw ModelError("density must be finite and nonnegative, got " + std::to_string(v) +
                                 " at y=" + std::to_string(s));
        }
    }

    auto small_variance = [&](double eps) {
        return tanh_sinh_to([&](double y) { return y * y * sym(y); }, eps, "density second moment");
    };
    auto rate_above = [&](double eps) {
        return gauss_kronrod([&](double y) { return sym(y); }, eps, y_max, "density mass").value;
    };

    data->unit_variance = small_variance(std::min(1.0, y_max));
    const double reference = options.covariance_trace + data->unit_variance;
    const double eps_cap = std::min(options.cutoff_inner_radius, y_max);

    if (options.eps) {
        const double eps = *options.eps;
        if (!(eps > 0.0) || !(eps < eps_cap))
            throw ModelError("density eps must lie in (0, min(cut-off radius, y_max))");
        data->eps = eps;
    } else {
        data->eps_automatic = true;
        double eps = 0.5 * eps_cap;
        double accepted = eps;
        for (int k = 0; k < 80; ++k) {
            if (rate_above(eps) > options.max_rate) break;
            accepted = eps;
            if (small_variance(eps) <= 1e-4 * reference) break;
            eps *= 0.5;
        }
        data->eps = accepted;
    }
    data->small_variance = small_variance(data->eps);
    data->small_third_moment =
        tanh_sinh_to([&](double y) { return y * y * y * sym(y); }, data->eps, "density third moment");
    data->variance_ratio = reference > 0.0 ? data->small_variance / reference : 0.0;

    // Inverse-CDF table: geometric cells on each half-line with exact masses.
    constexpr int kCells = 2048;
    std::vector<double> bounds(kCells + 1);
    const double ratio = y_max / data->eps;
    for (int k = 0; k <= kCells; ++k) bounds[k] = data->eps * std::pow(ratio, static_cast<double>(k) / kCells);
    bounds[kCells] = y_max;

    std::vector<double> masses;
    for (int k = kCells - 1; k >= 0; --k) {
        const double m = gauss_kronrod([&](double y) { return n(-y); }, bounds[k], bounds[k + 1], "density cell").value;
        data->cell_lower.push_back(-bounds[k + 1]);
        data->cell_upper.push_back(-bounds[k]);
        masses.push_back(m);
    }
    for (int k = 0; k < kCells; ++k) {
        const double m = gauss_kronrod([&](double y) { return n(y); }, bounds[k], bounds[k + 1], "density cell").value;
        data->cell_lower.push_back(bounds[k]);
        data->cell_upper.push_back(bounds[k + 1]);
        masses.push_back(m);
    }
    double total = 0.0;
    for (double m : masses) total += m;
    data->rate = total;
    data->table_rate_error = std::abs(total - rate_above(data->eps));
    data->cell_cdf.resize(masses.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < masses.size(); ++k) {
        acc += masses[k];
        data->cell_cdf[k] = total > 0.0 ? acc / total : 1.0;
    }
    if (!data->cell_cdf.empty()) data->cell_cdf.back() = 1.0;

    LevyMeasure m;
    m.kind_ = Kind::density;
    m.density_ = std::move(data);
    return m;
}

int LevyMeasure::implied_dim() const {
    switch (kind_) {
        case Kind::zero: return -1;
        case Kind::discrete: return static_cast<int>(atoms_.front().jump.size());
        case Kind::alpha_stable:
        case Kind::density: return 1;
    }
    return -1;
}

bool LevyMeasure::is_symmetric() const {
    switch (kind_) {
        case Kind::zero:
        case Kind::alpha_stable: return true;
        case Kind::discrete: {
            for (const Atom& a : atoms_) {
                bool found = false;
                for (const Atom& b : atoms_)
                    if (b.rate == a.rate && b.jump == -a.jump) found = true;
                if (!found) return false;
            }
            return true;
        }
        case Kind::density: {
            for (int k = 0; k <= 64; ++k) {
                const double y = density_->y_max * std::pow(10.0, -6.0 * k / 64.0);
                if (density_->n(y) != density_->n(-y)) return false;
            }
            return true;
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// LevyTriplet
// ---------------------------------------------------------------------------

LevyTriplet LevyTriplet::zero(int d) {
    LevyTriplet t;
    t.drift = Vec::Zero(d);
    t.covariance = Mat::Zero(d, d);
    return t;
}

double min_eigenvalue(const Mat& q) {
    if (q.size() == 0) return 0.0;
    if (q.rows() == 1) return q(0, 0);
    const Mat sym = 0.5 * (q + q.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> solver(sym, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

bool is_psd(const Mat& q, double tol) {
    if (!q.allFinite()) return false;
    const double scale = 1.0 + q.cwiseAbs().maxCoeff();
    if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) return false;
    return min_eigenvalue(q) >= -tol;
}

Mat covariance_factor(const Mat& q) {
    const Eigen::Index d = q.rows();
    if (d == 1) return Mat::Constant(1, 1, std::sqrt(std::max(q(0, 0), 0.0)));
    if (q.isZero(0.0)) return Mat::Zero(d, d);
    Eigen::LLT<Mat> llt(q);
    if (llt.info() == Eigen::Success) {
        Mat l = llt.matrixL();
        if (l.allFinite()) return l;
    }
    Eigen::SelfAdjointEigenSolver<Mat> solver(0.5 * (q + q.transpose()));
    const Vec root = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return solver.eigenvectors() * root.asDiagonal();
}

void LevyTriplet::validate() const {
    const int d = dim();
    if (d < 1) throw ModelError("triplet dimension must be at least 1");
    if (!std::isfinite(killing_rate)) throw ModelError("killing rate must be finite");
    if (killing_rate < 0.0) throw ModelError("killing rate must be nonnegative, got " + std::to_string(killing_rate));
    if (!drift.allFinite()) throw ModelError("drift must be finite");
    if (covariance.rows() != d || covariance.cols() != d) throw ModelError("covariance must be d x d");
    if (!is_psd(covariance))
        throw ModelError("covariance is not symmetric positive semidefinite (min eigenvalue " +
                         std::to_string(min_eigenvalue(covariance)) + ")");
    const int md = measure.implied_dim();
    if (md >= 0 && md != d) throw ModelError("Levy measure dimension does not match the triplet");
    if (cutoff.kind() == CutoffFunction::Kind::product_indicator && cutoff.radii().size() != d)
        throw ModelError("product cut-off needs one radius per coordinate");
}

// ---------------------------------------------------------------------------
// Exponent
// ---------------------------------------------------------------------------

ExponentValue measure_exponent(const LevyMeasure& measure, const CutoffFunction& cutoff, const Vec& xi) {
    ExponentValue out{Complex(0.0, 0.0), 0.0};
    switch (measure.kind()) {
        case LevyMeasure::Kind::zero: break;
        case LevyMeasure::Kind::discrete: {
            double re = 0.0;
            double im = 0.0;
            for (const Atom& a : measure.atoms()) {
                const double theta = a.jump.dot(xi);
                re += a.rate * one_minus_cos(theta);
                const double s = cutoff(a.jump) > 0.0 ? sin_minus_id(theta) : std::sin(theta);
                im -= a.rate * s;
            }
            out.value = Complex(re, im);
            break;
        }
        case LevyMeasure::Kind::alpha_stable: {
            out.value = Complex(measure.scale() * std::pow(std::abs(xi(0)), measure.alpha()), 0.0);
            break;
        }
        case LevyMeasure::Kind::density: {
            const DensityData& dd = measure.density_data();
            const double u = xi(0);
            const double r = cutoff.kind() == CutoffFunction::Kind::indicator_ball ? cutoff.radius() : cutoff.radii()(0);
            auto even = [&](double y) { return dd.n(y) + dd.n(-y); };
            auto odd = [&](double y) { return dd.n(y) - dd.n(-y); };
            const double inner_hi = std::min(r, dd.y_max);
            double re = 0.0;
            double im = 0.0;
            re += gauss_kronrod([&](double y) { return one_minus_cos(y * u) * even(y); }, dd.eps, inner_hi, "density exponent").value;
            re += gauss_kronrod([&](double y) { return one_minus_cos(y * u) * even(y); }, inner_hi, dd.y_max, "density exponent").value;
            im -= gauss_kronrod([&](double y) { return sin_minus_id(y * u) * odd(y); }, dd.eps, inner_hi, "density exponent").value;
            im -= gauss_kronrod([&](double y) { return std::sin(y * u) * odd(y); }, inner_hi, dd.y_max, "density exponent").value;
            // Jumps below eps enter through their Gaussian substitute.
            re += 0.5 * dd.small_variance * u * u;
            out.value = Complex(re, im);
            out.error_bound = std::abs(u * u * u) / 6.0 * dd.small_third_moment;
            break;
        }
    }
    return out;
}

ExponentValue eval_exponent_detailed(const LevyTriplet& triplet, const Vec& xi) {
    if (xi.size() != triplet.dim()) throw ModelError("frequency dimension does not match the triplet");
    if (!xi.allFinite()) throw ModelError("frequency must be finite");
    ExponentValue m = measure_exponent(triplet.measure, triplet.cutoff, xi);
    const double poly = 0.5 * xi.dot(triplet.covariance * xi);
    m.value += Complex(triplet.killing_rate + poly, -triplet.drift.dot(xi));
    return m;
}

Complex eval_exponent(const LevyTriplet& triplet, const Vec& xi) { return eval_exponent_detailed(triplet, xi).value; }

}  // namespace symbolkit
