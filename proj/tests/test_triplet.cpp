#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "symbolkit/errors.hpp"
#include "symbolkit/state_model.hpp"

using namespace symbolkit;
using fixtures::vec1;

namespace {

const Complex I(0.0, 1.0);

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

std::vector<Vec> line_grid(double lo, double hi, int n) {
    std::vector<Vec> out;
    for (double v : linspace(lo, hi, n)) out.push_back(vec1(v));
    return out;
}

LevyTriplet random_symmetric(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.1, 3.0);
    LevyTriplet t = LevyTriplet::zero(1);
    t.covariance(0, 0) = u(rng);
    switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
        case 0: {
            const double j = u(rng), r = u(rng);
            t.measure = LevyMeasure::discrete({{vec1(j), r}, {vec1(-j), r}});
            break;
        }
        case 1: t.measure = LevyMeasure::alpha_stable(std::uniform_real_distribution<double>(0.1, 2.0)(rng), u(rng)); break;
        default: {
            const double s = u(rng);
            DensityOptions o;
            o.y_max = 5.0;
            t.measure = LevyMeasure::density([s](double y) { return std::exp(-s * std::abs(y)) / (y * y); }, o);
        }
    }
    return t;
}

}  // namespace

TEST(Exponent, TwoDimensionalGaussian) {
    LevyTriplet t = LevyTriplet::zero(2);
    t.covariance = Mat::Identity(2, 2);
    const Complex p = eval_exponent(t, vec2(1.0, 1.0));
    EXPECT_DOUBLE_EQ(p.real(), 1.0);
    EXPECT_DOUBLE_EQ(p.imag(), 0.0);
}

TEST(Exponent, CauchyClosedForm) {
    const Complex p = eval_exponent(fixtures::stable_triplet(1.0), vec1(3.0));
    EXPECT_DOUBLE_EQ(p.real(), 3.0);
    EXPECT_DOUBLE_EQ(p.imag(), 0.0);
}

TEST(Exponent, SingleAtomOutsideCutoff) {
    const LevyTriplet t = fixtures::poisson_triplet(0.5, 2.0);
    for (double xi : {-3.0, -0.7, 0.25, 1.0, 2.5}) {
        const Complex want = 0.5 * (1.0 - std::exp(2.0 * I * xi));
        EXPECT_NEAR(std::abs(eval_exponent(t, vec1(xi)) - want), 0.0, 1e-15) << xi;
    }
}

TEST(Exponent, AtomInsideCutoffIsCompensated) {
    const LevyTriplet t = fixtures::poisson_triplet(1.5, 0.5);
    for (double xi : {-2.0, 0.3, 4.0}) {
        const Complex want = -1.5 * (std::exp(0.5 * I * xi) - 1.0 - I * 0.5 * xi);
        EXPECT_NEAR(std::abs(eval_exponent(t, vec1(xi)) - want), 0.0, 1e-14) << xi;
    }
}

TEST(Exponent, ZeroFrequencyGivesKillingRate) {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 20; ++k) {
        LevyTriplet t = random_symmetric(rng);
        t.killing_rate = 0.25 * k;
        t.drift(0) = 0.1 * k - 1.0;
        EXPECT_EQ(eval_exponent(t, vec1(0.0)), Complex(t.killing_rate, 0.0));
    }
}

TEST(Exponent, SymmetricDataHasRealExponent) {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 30; ++k) {
        const LevyTriplet t = random_symmetric(rng);
        for (double xi : {-5.0, -1.0, 0.3, 2.0, 7.0}) EXPECT_NEAR(eval_exponent(t, vec1(xi)).imag(), 0.0, 1e-9);
    }
}

TEST(Exponent, ConjugateSymmetryAndNonnegativeRealPart) {
    std::mt19937_64 rng(13);
    for (int k = 0; k < 30; ++k) {
        LevyTriplet t = random_symmetric(rng);
        t.drift(0) = 0.3 * k - 4.0;
        t.killing_rate = 0.1 * k;
        if (k % 3 == 0) t.measure = LevyMeasure::discrete({{vec1(0.4 + k), 0.2}, {vec1(-0.3), 1.1}});
        for (double xi : {0.1, 0.9, 3.0, 12.0}) {
            const Complex a = eval_exponent(t, vec1(xi));
            const Complex b = eval_exponent(t, vec1(-xi));
            EXPECT_NEAR(std::abs(b - std::conj(a)), 0.0, 1e-12 * (1.0 + std::abs(a)));
            EXPECT_GE(a.real(), -1e-12);
        }
    }
}

TEST(Exponent, AdditiveInDisjointAtoms) {
    LevyTriplet a = LevyTriplet::zero(2);
    a.killing_rate = 0.3;
    a.drift = vec2(0.5, -1.0);
    a.covariance << 2.0, 0.5, 0.5, 1.0;
    LevyTriplet b = a, both = a;
    a.measure = LevyMeasure::discrete({{vec2(0.2, 0.1), 1.0}, {vec2(3.0, 0.0), 0.5}});
    b.measure = LevyMeasure::discrete({{vec2(-0.4, 0.4), 2.0}});
    both.measure = LevyMeasure::discrete({{vec2(0.2, 0.1), 1.0}, {vec2(3.0, 0.0), 0.5}, {vec2(-0.4, 0.4), 2.0}});
    LevyTriplet base = a;
    base.measure = LevyMeasure::zero();
    for (const Vec& xi : {vec2(1.0, 1.0), vec2(-2.0, 0.5), vec2(0.0, 3.0)}) {
        const Complex lhs = eval_exponent(both, xi);
        const Complex rhs = eval_exponent(a, xi) + eval_exponent(b, xi) - eval_exponent(base, xi);
        EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-13);
    }
}

TEST(Exponent, LaplaceDensityMatchesClosedForm) {
    // n(y) = e^{-|y|}: psi(xi) = 2 xi^2 / (1 + xi^2).
    LevyTriplet t = LevyTriplet::zero(1);
    DensityOptions o;
    o.y_max = 40.0;
    t.measure = LevyMeasure::density([](double y) { return std::exp(-std::abs(y)); }, o);
    for (double xi : {0.2, 1.0, 3.0, 10.0}) {
        const ExponentValue v = eval_exponent_detailed(t, vec1(xi));
        const double want = 2.0 * xi * xi / (1.0 + xi * xi);
        EXPECT_NEAR(v.value.real(), want, v.error_bound + 1e-7) << xi;
        EXPECT_NEAR(v.value.imag(), 0.0, 1e-9);
    }
}

TEST(Exponent, OneSidedDensityMatchesClosedForm) {
    // n(y) = e^{-y} on y > 0 with the unit cut-off.
    LevyTriplet t = LevyTriplet::zero(1);
    DensityOptions o;
    o.y_max = 40.0;
    t.measure = LevyMeasure::density([](double y) { return y > 0.0 ? std::exp(-y) : 0.0; }, o);
    for (double xi : {-2.0, 0.5, 1.0, 4.0}) {
        const ExponentValue v = eval_exponent_detailed(t, vec1(xi));
        const Complex want = -(1.0 / (1.0 - I * xi) - 1.0 - I * xi * (1.0 - 2.0 / std::numbers::e));
        EXPECT_NEAR(std::abs(v.value - want), 0.0, v.error_bound + 1e-7) << xi;
    }
}

TEST(Exponent, NonIntegrableDensityIsRejected) {
    DensityOptions o;
    o.y_max = 2.0;
    EXPECT_THROW(LevyMeasure::density([](double y) { return 1.0 / std::pow(std::abs(y), 3.5); }, o), ModelError);
}

TEST(Triplet, CovarianceMustBePsd) {
    LevyTriplet t = LevyTriplet::zero(2);
    t.covariance << 1.0, 0.0, 0.0, -1e-13;
    EXPECT_NO_THROW(t.validate());
    t.covariance(1, 1) = -1e-6;
    EXPECT_THROW(t.validate(), ModelError);
    t.covariance << 1.0, 0.5, 0.0, 1.0;
    EXPECT_THROW(t.validate(), ModelError);
    t = LevyTriplet::zero(1);
    t.killing_rate = -0.1;
    EXPECT_THROW(t.validate(), ModelError);
}

TEST(Triplet, StableIndexRange) {
    EXPECT_THROW(LevyMeasure::alpha_stable(0.0, 1.0), ModelError);
    EXPECT_THROW(LevyMeasure::alpha_stable(2.5, 1.0), ModelError);
    EXPECT_NO_THROW(LevyMeasure::alpha_stable(2.0, 1.0));
    EXPECT_THROW(LevyMeasure::discrete({{vec1(0.0), 1.0}}), ModelError);
}

TEST(Cutoff, ProductIsProductOfAxes) {
    const CutoffFunction c = CutoffFunction::product(vec2(1.0, 0.5));
    const CutoffFunction a = CutoffFunction::ball(1.0);
    const CutoffFunction b = CutoffFunction::ball(0.5);
    for (double u : {-1.2, -0.7, 0.0, 0.4, 0.5, 0.9, 1.0, 1.5})
        for (double v : {-0.6, -0.5, 0.0, 0.2, 0.51})
            EXPECT_EQ(c(vec2(u, v)), a(u) * b(v)) << u << "," << v;
    EXPECT_EQ(CutoffFunction::ball(2.0)(vec2(1.2, 1.6)), 1.0);
    EXPECT_EQ(CutoffFunction::ball(2.0)(vec2(1.3, 1.6)), 0.0);
}

TEST(Symbol, ConstantModelIsSpaceHomogeneous) {
    const StateModel m = fixtures::levy(fixtures::bm_triplet());
    for (double x : {-5.0, 0.0, 3.0})
        for (double xi : {-2.0, 0.5, 4.0}) EXPECT_EQ(eval_symbol(m, vec1(x), vec1(xi)), Complex(0.5 * xi * xi, 0.0));
}

TEST(Symbol, SdeUsesDriverAtScaledFrequency) {
    const StateModel m = fixtures::sde_cauchy();
    const Complex p = eval_symbol(m, vec1(2.0), vec1(1.0));
    EXPECT_DOUBLE_EQ(p.real(), 2.0);
    EXPECT_DOUBLE_EQ(p.imag(), 0.0);
}

TEST(Symbol, PureKilling) {
    const StateModel m = fixtures::from_json(R"({"dim": 1, "killing_rate": "1 + x1^2"})");
    for (double xi : {-3.0, 0.0, 1.7}) EXPECT_EQ(eval_symbol(m, vec1(1.0), vec1(xi)), Complex(2.0, 0.0));
}

TEST(Symbol, StateDependentStableIndex) {
    const StateModel m = fixtures::stable_like();
    EXPECT_NEAR(eval_symbol(m, vec1(0.0), vec1(2.0)).real(), std::pow(2.0, 0.7), 1e-14);
    EXPECT_NEAR(eval_symbol(m, vec1(1.0), vec1(2.0)).real(), std::pow(2.0, 0.5), 1e-14);
}

TEST(Growth, BrownianMotion) {
    const StateModel m = fixtures::levy(fixtures::bm_triplet());
    const std::vector<Vec> xi = line_grid(-10.0, 10.0, 41);
    const ConditionEstimate g = check_growth(m, line_grid(-1.0, 1.0, 3), xi);
    EXPECT_NEAR(g.constant, 0.5 * 100.0 / 101.0, 1e-15);
    EXPECT_EQ(std::abs(g.witness_xi(0)), 10.0);
    EXPECT_TRUE(g.satisfied);
}

TEST(Growth, CauchyPeaksAtUnitFrequency) {
    const StateModel m = fixtures::levy(fixtures::stable_triplet(1.0));
    const ConditionEstimate g = check_growth(m, line_grid(0.0, 0.0, 1), line_grid(-10.0, 10.0, 41));
    EXPECT_NEAR(g.constant, 0.5, 1e-15);
    EXPECT_EQ(std::abs(g.witness_xi(0)), 1.0);
}

TEST(Growth, ZeroModel) {
    const StateModel m = fixtures::levy(LevyTriplet::zero(1));
    EXPECT_EQ(check_growth(m, line_grid(0.0, 1.0, 3), line_grid(-5.0, 5.0, 11)).constant, 0.0);
}

TEST(Sector, SymmetricModel) {
    const StateModel m = fixtures::levy(fixtures::stable_triplet(1.5));
    const ConditionEstimate s = check_sector(m, line_grid(0.0, 1.0, 3), line_grid(-10.0, 10.0, 41));
    EXPECT_TRUE(s.satisfied);
    EXPECT_EQ(s.constant, 0.0);
}

TEST(Sector, PureDriftFails) {
    const StateModel m = fixtures::levy(fixtures::bm_triplet(0.0, 1.0));
    EXPECT_FALSE(check_sector(m, line_grid(0.0, 0.0, 1), line_grid(-10.0, 10.0, 41)).satisfied);
}

TEST(Sector, BrownianMotionWithDrift) {
    // |Im p| / Re p = 2 / |xi|, largest at the smallest nonzero grid frequency.
    const StateModel m = fixtures::levy(fixtures::bm_triplet(1.0, 1.0));
    const std::vector<Vec> xi = line_grid(-10.0, 10.0, 41);
    const ConditionEstimate s = check_sector(m, line_grid(0.0, 0.0, 1), xi);
    EXPECT_TRUE(s.satisfied);
    EXPECT_NEAR(s.constant, 2.0 / 0.5, 1e-12);
}

TEST(StateModel, RejectsBadCoefficients) {
    EXPECT_THROW(fixtures::from_json(R"({"dim": 1, "covariance": [["x1"]]})").triplet_at(vec1(-1.0)), ModelError);
    EXPECT_THROW(fixtures::from_json(R"({"dim": 1, "drift": ["x2"]})"), ConfigError);
}
