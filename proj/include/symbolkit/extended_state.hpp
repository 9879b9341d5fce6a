#pragma once

// The extended state space R^d u {inf, Delta}, discretely sampled paths on
// it and the classification of killing times along a path.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include "symbolkit/triplet.hpp"

namespace symbolkit {

enum class PointKind : std::uint8_t { finite, infinity, delta };

const char* status_label(PointKind kind);

class ExtPoint {
public:
    ExtPoint() = default;

    static ExtPoint finite(Vec x);
    static ExtPoint infinity(int dim);
    static ExtPoint delta(int dim);

    PointKind kind() const { return kind_; }
    bool is_finite() const { return kind_ == PointKind::finite; }
    bool is_infinity() const { return kind_ == PointKind::infinity; }
    bool is_delta() const { return kind_ == PointKind::delta; }
    int dim() const { return dim_; }
    /// Coordinates of a finite point; throws for the killing points.
    const Vec& value() const;

    friend bool operator==(const ExtPoint& a, const ExtPoint& b);

private:
    PointKind kind_ = PointKind::finite;
    int dim_ = 0;
    Vec value_;
};

/// p + q. Undefined for inf + inf.
ExtPoint ext_add(const ExtPoint& p, const ExtPoint& q);
ExtPoint ext_add(const ExtPoint& p, const Vec& r);
/// p - q. Defined for Delta - (R^d u {inf}), inf - R^d and finite - finite.
ExtPoint ext_sub(const ExtPoint& p, const ExtPoint& q);
ExtPoint ext_sub(const ExtPoint& p, const Vec& r);
/// r * p; the killing points are absorbing except for r = 0, which maps them to the origin.
ExtPoint ext_scale(const ExtPoint& p, double r);
/// Euclidean norm; +inf for the killing points.
double ext_norm(const ExtPoint& p);
/// e^{i x'xi} for finite x, 0 at the killing points.
Complex e_xi(const ExtPoint& p, const Vec& xi);

inline constexpr double kNever = std::numeric_limits<double>::infinity();

/// Discretely sampled path stored column-wise: times, d values per time, status per time.
class Path {
public:
    Path() = default;
    explicit Path(int dim) : dim_(dim) {}

    int dim() const { return dim_; }
    std::size_t size() const { return times_.size(); }
    bool empty() const { return times_.empty(); }

    void reserve(std::size_t n);
    void push_finite(double t, const double* x);
    void push_finite(double t, const Vec& x) { push_finite(t, x.data()); }
    void push_point(double t, const ExtPoint& p);
    void push_infinity(double t);
    void push_delta(double t);

    double time(std::size_t i) const { return times_[i]; }
    PointKind status(std::size_t i) const { return status_[i]; }
    const double* values(std::size_t i) const { return values_.data() + i * static_cast<std::size_t>(dim_); }
    ExtPoint state(std::size_t i) const;
    double norm(std::size_t i) const;
    const std::vector<double>& times() const { return times_; }

    /// Marked invalid when coefficient evaluation failed during simulation.
    bool valid() const { return valid_; }
    void set_invalid() { valid_ = false; }

    /// Throws PathStructureError if the absorbing structure or the time grid is violated.
    void validate() const;

    friend bool operator==(const Path& a, const Path& b);

private:
    int dim_ = 0;
    std::vector<double> times_;
    std::vector<double> values_;
    std::vector<PointKind> status_;
    bool valid_ = true;
};

struct KillingTimes {
    double zeta_partial = kNever;
    double zeta_delta = kNever;
    double zeta_infty = kNever;
    /// Thresholds 1..n_max distinguish explosion from sudden killing.
    long long n_max = 0;
    /// sigma'_n, sigma_n, tau_n = sigma_n ^ n and alpha_n = tau_n ^ zeta_delta for n = 1..size().
    std::vector<double> sigma_prime;
    std::vector<double> sigma;
    std::vector<double> tau;
    std::vector<double> alpha;

    friend bool operator==(const KillingTimes&, const KillingTimes&) = default;
};

/// Classifies the killing times of a path with separating thresholds n = 1..n_max.
/// The per-n sequences are recorded for n = 1..min(n_max, n_record).
KillingTimes classify_killing(const Path& path, long long n_max, long long n_record = 64);

void write_path_csv(std::ostream& os, const Path& path);
Path read_path_csv(std::istream& is);

}  // namespace symbolkit
