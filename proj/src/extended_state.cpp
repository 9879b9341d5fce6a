#include "symbolkit/extended_state.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "symbolkit/errors.hpp"
#include "symbolkit/format.hpp"

namespace symbolkit {

const char* status_label(PointKind kind) {
    switch (kind) {
        case PointKind::finite: return "F";
        case PointKind::infinity: return "INF";
        case PointKind::delta: return "DELTA";
    }
    return "?";
}

ExtPoint ExtPoint::finite(Vec x) {
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (std::isnan(x(i))) throw PathStructureError("finite point with NaN coordinate");
    ExtPoint p;
    p.kind_ = PointKind::finite;
    p.dim_ = static_cast<int>(x.size());
    p.value_ = std::move(x);
    return p;
}

ExtPoint ExtPoint::infinity(int dim) {
    ExtPoint p;
    p.kind_ = PointKind::infinity;
    p.dim_ = dim;
    return p;
}

ExtPoint ExtPoint::delta(int dim) {
    ExtPoint p;
    p.kind_ = PointKind::delta;
    p.dim_ = dim;
    return p;
}

const Vec& ExtPoint::value() const {
    if (!is_finite()) throw UndefinedOperation("coordinates of a killing point");
    return value_;
}

bool operator==(const ExtPoint& a, const ExtPoint& b) {
    if (a.kind_ != b.kind_ || a.dim_ != b.dim_) return false;
    return !a.is_finite() || a.value_ == b.value_;
}

namespace {

void require_same_dim(int a, int b) {
    if (a != b) throw UndefinedOperation("dimension mismatch in extended arithmetic");
}

}  // namespace

ExtPoint ext_add(const ExtPoint& p, const ExtPoint& q) {
    require_same_dim(p.dim(), q.dim());
    if (p.is_delta() || q.is_delta()) return ExtPoint::delta(p.dim());
    if (p.is_infinity() && q.is_infinity()) throw UndefinedOperation("inf + inf is not defined");
    if (p.is_infinity() || q.is_infinity()) return ExtPoint::infinity(p.dim());
    return ExtPoint::finite(p.value() + q.value());
}

ExtPoint ext_add(const ExtPoint& p, const Vec& r) { return ext_add(p, ExtPoint::finite(r)); }

ExtPoint ext_sub(const ExtPoint& p, const ExtPoint& q) {
    require_same_dim(p.dim(), q.dim());
    if (p.is_delta()) {
        if (q.is_delta()) throw UndefinedOperation("Delta - Delta is not defined");
        return ExtPoint::delta(p.dim());
    }
    if (q.is_finite()) {
        if (p.is_infinity()) return ExtPoint::infinity(p.dim());
        return ExtPoint::finite(p.value() - q.value());
    }
    throw UndefinedOperation(std::string(status_label(p.kind())) + " - " + status_label(q.kind()) + " is not defined");
}

ExtPoint ext_sub(const ExtPoint& p, const Vec& r) { return ext_sub(p, ExtPoint::finite(r)); }

ExtPoint ext_scale(const ExtPoint& p, double r) {
    if (std::isnan(r)) throw UndefinedOperation("scaling by NaN");
    if (p.is_finite()) return ExtPoint::finite(r * p.value());
    if (r == 0.0) return ExtPoint::finite(Vec::Zero(p.dim()));
    return p;
}

double ext_norm(const ExtPoint& p) { return p.is_finite() ? p.value().norm() : kNever; }

Complex e_xi(const ExtPoint& p, const Vec& xi) {
    if (!p.is_finite()) return {0.0, 0.0};
    const double theta = p.value().dot(xi);
    return {std::cos(theta), std::sin(theta)};
}

// ---------------------------------------------------------------------------
// Path
// ---------------------------------------------------------------------------

void Path::reserve(std::size_t n) {
    times_.reserve(n);
    values_.reserve(n * static_cast<std::size_t>(dim_));
    status_.reserve(n);
}

void Path::push_finite(double t, const double* x) {
    times_.push_back(t);
    values_.insert(values_.end(), x, x + dim_);
    status_.push_back(PointKind::finite);
}

void Path::push_point(double t, const ExtPoint& p) {
    if (p.dim() != dim_) throw PathStructureError("point dimension does not match the path");
    switch (p.kind()) {
        case PointKind::finite: push_finite(t, p.value().data()); break;
        case PointKind::infinity: push_infinity(t); break;
        case PointKind::delta: push_delta(t); break;
    }
}

void Path::push_infinity(double t) {
    times_.push_back(t);
    values_.insert(values_.end(), static_cast<std::size_t>(dim_), std::numeric_limits<double>::infinity());
    status_.push_back(PointKind::infinity);
}

void Path::push_delta(double t) {
    times_.push_back(t);
    values_.insert(values_.end(), static_cast<std::size_t>(dim_), std::numeric_limits<double>::quiet_NaN());
    status_.push_back(PointKind::delta);
}

ExtPoint Path::state(std::size_t i) const {
    switch (status_[i]) {
        case PointKind::finite: return ExtPoint::finite(Eigen::Map<const Vec>(values(i), dim_));
        case PointKind::infinity: return ExtPoint::infinity(dim_);
        case PointKind::delta: return ExtPoint::delta(dim_);
    }
    return {};
}

double Path::norm(std::size_t i) const {
    if (status_[i] != PointKind::finite) return kNever;
    return Eigen::Map<const Vec>(values(i), dim_).norm();
}

void Path::validate() const {
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (!std::isfinite(times_[i])) throw PathStructureError("non-finite grid time");
        if (i > 0 && !(times_[i] > times_[i - 1])) throw PathStructureError("grid times must be strictly increasing");
        if (status_[i] == PointKind::finite) {
            for (int k = 0; k < dim_; ++k)
                if (std::isnan(values(i)[k])) throw PathStructureError("finite state with NaN coordinate");
        }
        if (i == 0) continue;
        const PointKind prev = status_[i - 1];
        const PointKind cur = status_[i];
        if (prev == PointKind::delta && cur != PointKind::delta)
            throw PathStructureError("Delta is absorbing but is followed by " + std::string(status_label(cur)) +
                                     " at t=" + format_number(times_[i]));
        if (prev == PointKind::infinity && cur == PointKind::finite)
            throw PathStructureError("inf may only be followed by inf or Delta (finite state at t=" +
                                     format_number(times_[i]) + ")");
    }
}

bool operator==(const Path& a, const Path& b) {
    if (a.dim_ != b.dim_ || a.times_ != b.times_ || a.status_ != b.status_ || a.valid_ != b.valid_) return false;
    for (std::size_t i = 0; i < a.values_.size(); ++i) {
        const double x = a.values_[i];
        const double y = b.values_[i];
        if (!(x == y || (std::isnan(x) && std::isnan(y)))) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Killing times
// ---------------------------------------------------------------------------

KillingTimes classify_killing(const Path& path, long long n_max, long long n_record) {
    path.validate();
    if (n_max < 1) throw PathStructureError("n_max must be at least 1");
    KillingTimes kt;
    kt.n_max = n_max;
    const std::size_t n = path.size();

    std::size_t killed_at = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (path.status(i) != PointKind::finite) {
            killed_at = i;
            break;
        }
    }
    if (killed_at < n) kt.zeta_partial = path.time(killed_at);

    // Running maximum of ||X_t|| v ||X_{t-}|| up to each grid point.
    const long long n_rec = std::min(n_max, n_record);
    kt.sigma_prime.assign(static_cast<std::size_t>(n_rec), kNever);
    double running = 0.0;
    double max_before_kill = 0.0;
    long long next = 1;
    for (std::size_t i = 0; i < n && next <= n_rec; ++i) {
        double level = path.norm(i);
        if (i > 0) level = std::max(level, path.norm(i - 1));
        running = std::max(running, level);
        while (next <= n_rec && running >= static_cast<double>(next)) {
            kt.sigma_prime[static_cast<std::size_t>(next - 1)] = path.time(i);
            ++next;
        }
    }
    for (std::size_t i = 0; i < killed_at; ++i) max_before_kill = std::max(max_before_kill, path.norm(i));

    if (killed_at < n) {
        // Some sigma'_n with n <= n_max coincides with the killing time iff the path
        // stayed below n_max before it.
        if (max_before_kill < static_cast<double>(n_max))
            kt.zeta_delta = kt.zeta_partial;
        else
            kt.zeta_infty = kt.zeta_partial;
    }

    kt.sigma.resize(kt.sigma_prime.size());
    kt.tau.resize(kt.sigma_prime.size());
    kt.alpha.resize(kt.sigma_prime.size());
    for (std::size_t k = 0; k < kt.sigma_prime.size(); ++k) {
        const double sp = kt.sigma_prime[k];
        kt.sigma[k] = sp < kt.zeta_partial ? sp : kNever;
        kt.tau[k] = std::min(kt.sigma[k], static_cast<double>(k + 1));
        kt.alpha[k] = std::min(kt.tau[k], kt.zeta_delta);
    }
    return kt;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

void write_path_csv(std::ostream& os, const Path& path) {
    os << "time";
    for (int k = 0; k < path.dim(); ++k) os << ",x" << (k + 1);
    os << ",status\n";
    for (std::size_t i = 0; i < path.size(); ++i) {
        os << format_number(path.time(i));
        const PointKind s = path.status(i);
        for (int k = 0; k < path.dim(); ++k) {
            os << ',';
            if (s == PointKind::finite)
                os << format_number(path.values(i)[k]);
            else
                os << (s == PointKind::infinity ? "inf" : "nan");
        }
        os << ',' << status_label(s) << '\n';
    }
}

Path read_path_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw PathStructureError("empty path CSV");
    const int dim = static_cast<int>(std::count(line.begin(), line.end(), ',')) - 1;
    if (dim < 1 || line.rfind("time", 0) != 0) throw PathStructureError("malformed path CSV header");
    Path path(dim);
    std::vector<double> x(static_cast<std::size_t>(dim));
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        const double t = std::stod(cell);
        for (int k = 0; k < dim; ++k) {
            std::getline(ss, cell, ',');
            x[static_cast<std::size_t>(k)] = std::stod(cell);
        }
        std::getline(ss, cell, ',');
        if (cell == "F")
            path.push_finite(t, x.data());
        else if (cell == "INF")
            path.push_infinity(t);
        else if (cell == "DELTA")
            path.push_delta(t);
        else
            throw PathStructureError("unknown status flag '" + cell + "'");
    }
    path.validate();
    return path;
}

}  // namespace symbolkit
