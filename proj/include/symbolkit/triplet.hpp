#pragma once

// Levy-Khintchine data (a, l, Q, N, chi) and the characteristic exponent
//
//   phi(xi) = a - i l'xi + 1/2 xi'Q xi - int (e^{i y'xi} - 1 - i y'xi chi(y)) N(dy).

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace symbolkit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Complex = std::complex<double>;

class CutoffFunction {
public:
    enum class Kind { indicator_ball, product_indicator };

    /// Indicator of the closed ball of the given radius (default: unit ball).
    static CutoffFunction ball(double radius = 1.0);
    /// Product of one-dimensional indicators 1{|y_i| <= r_i}.
    static CutoffFunction product(Vec radii);

    Kind kind() const { return kind_; }
    double radius() const { return radius_; }
    const Vec& radii() const { return radii_; }

    double operator()(const Vec& y) const;
    double operator()(double y) const;

    /// chi = 1 on the open ball of this radius.
    double inner_radius() const;
    std::string describe() const;

    friend bool operator==(const CutoffFunction& a, const CutoffFunction& b) {
        return a.kind_ == b.kind_ && a.radius_ == b.radius_ && a.radii_.size() == b.radii_.size() &&
               (a.radii_.size() == 0 || a.radii_ == b.radii_);
    }

private:
    Kind kind_ = Kind::indicator_ball;
    double radius_ = 1.0;
    Vec radii_;
};

struct Atom {
    Vec jump;
    double rate = 0.0;
};

struct DensityOptions {
    /// Simulation cut; chosen automatically when absent.
    std::optional<double> eps;
    double y_max = 1.0;
    /// trace(Q) of the surrounding triplet; enters the automatic choice of eps.
    double covariance_trace = 0.0;
    /// eps must stay below the radius where the cut-off equals one.
    double cutoff_inner_radius = 1.0;
    /// Cap on the compound-Poisson rate above eps used by the automatic choice.
    double max_rate = 1e6;
};

/// Precomputed data of a one-dimensional Levy density n(y) on 0 < |y| <= y_max.
struct DensityData {
    std::function<double(double)> n;
    double eps = 0.0;
    double y_max = 0.0;
    bool eps_automatic = false;
    double small_variance = 0.0;       // int_{0<|y|<eps} y^2 n(y) dy
    double small_third_moment = 0.0;   // int_{0<|y|<eps} |y|^3 n(y) dy
    double unit_variance = 0.0;        // int_{0<|y|<=1} y^2 n(y) dy
    double variance_ratio = 0.0;       // small_variance / trace(Q + unit part)

    // Compound-Poisson part above eps, piecewise uniform on cells with exact masses.
    std::vector<double> cell_lower;    // signed cell bounds, ordered
    std::vector<double> cell_upper;
    std::vector<double> cell_cdf;      // cumulative normalized mass
    double rate = 0.0;                 // total mass above eps
    double table_rate_error = 0.0;     // |table mass - direct quadrature mass|

    /// int over the table of y * 1{|y| <= r} with respect to the table measure.
    double truncated_first_moment(double r) const;
    double sample_jump(double u1, double u2) const;
};

class LevyMeasure {
public:
    enum class Kind { zero, discrete, alpha_stable, density };

    LevyMeasure() = default;

    static LevyMeasure zero();
    static LevyMeasure discrete(std::vector<Atom> atoms);
    /// Symmetric one-dimensional alpha-stable part, exponent scale * |xi|^alpha.
    static LevyMeasure alpha_stable(double alpha, double scale);
    /// Density n(y) in one dimension. Integrability is checked by quadrature.
    static LevyMeasure density(std::function<double(double)> n, const DensityOptions& options);

    Kind kind() const { return kind_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    double alpha() const { return alpha_; }
    double scale() const { return scale_; }
    const DensityData& density_data() const { return *density_; }
    bool has_density() const { return static_cast<bool>(density_); }

    /// Dimension implied by the data, or -1 when it carries none (zero measure).
    int implied_dim() const;
    bool is_symmetric() const;

private:
    Kind kind_ = Kind::zero;
    std::vector<Atom> atoms_;
    double alpha_ = 0.0;
    double scale_ = 0.0;
    std::shared_ptr<const DensityData> density_;
};

struct LevyTriplet {
    double killing_rate = 0.0;
    Vec drift;
    Mat covariance;
    LevyMeasure measure;
    CutoffFunction cutoff = CutoffFunction::ball();

    int dim() const { return static_cast<int>(drift.size()); }

    static LevyTriplet zero(int d);

    /// Throws ModelError when shapes disagree, a < 0, Q is not PSD or N violates its invariants.
    void validate() const;
};

struct ExponentValue {
    Complex value;
    /// Bound on the part of the exponent not computed exactly (density small jumps).
    double error_bound = 0.0;
};

ExponentValue eval_exponent_detailed(const LevyTriplet& triplet, const Vec& xi);
Complex eval_exponent(const LevyTriplet& triplet, const Vec& xi);

/// Exponent of the Levy measure alone: -int (e^{iy'xi} - 1 - i y'xi chi(y)) N(dy).
ExponentValue measure_exponent(const LevyMeasure& measure, const CutoffFunction& cutoff, const Vec& xi);

/// Smallest eigenvalue of the symmetric part of Q.
double min_eigenvalue(const Mat& q);
bool is_psd(const Mat& q, double tol = 1e-12);

/// Factor L with L L' = Q for a PSD matrix (Cholesky, eigen-decomposition when singular).
Mat covariance_factor(const Mat& q);

}  // namespace symbolkit
