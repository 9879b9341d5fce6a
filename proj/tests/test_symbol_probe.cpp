#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "symbolkit/errors.hpp"
#include "symbolkit/symbol_probe.hpp"

using namespace symbolkit;
using fixtures::vec1;

namespace {

ProbeSettings quick(std::size_t n = 20000) {
    ProbeSettings s;
    s.n_samples = n;
    s.seed = 17;
    return s;
}

double combined(const LadderEstimate& a, const LadderEstimate& b) {
    return std::sqrt(a.stderr() * a.stderr() + b.stderr() * b.stderr());
}

}  // namespace

TEST(SymbolProbe, InterceptWeightsReproduceLines) {
    const std::vector<double> t{0.04, 0.02, 0.01, 0.005};
    const std::vector<double> w = intercept_weights(t);
    double at = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) at += w[k] * (3.0 - 7.0 * t[k]);
    EXPECT_NEAR(at, 3.0, 1e-12);
}

TEST(SymbolProbe, BrownianMotion) {
    const SymbolReport r = estimate_symbol(fixtures::levy(fixtures::bm_triplet()), vec1(0.0), vec1(2.0), quick());
    EXPECT_DOUBLE_EQ(r.analytic.real(), 2.0);
    EXPECT_LT(std::abs(r.final_estimate.estimate - r.analytic), 0.1 * 2.0);
    EXPECT_EQ(r.ladder.size(), 4u);
    EXPECT_FALSE(r.low_confidence);
}

TEST(SymbolProbe, PureKilling) {
    const StateModel m = fixtures::levy(fixtures::killing_triplet(0.5));
    for (double x : {-1.0, 3.0}) {
        const SymbolReport r = estimate_symbol(m, vec1(x), vec1(1.7), quick());
        EXPECT_DOUBLE_EQ(r.analytic.real(), 0.5);
        EXPECT_LE(r.abs_error, 3.0 * r.final_estimate.stderr() + 1e-12);
        EXPECT_GT(r.killed_fraction, 0.0);
    }
}

TEST(SymbolProbe, SdeSymbolIsDriverExponentOfFx) {
    const SymbolReport r = estimate_symbol(fixtures::sde_cauchy(), vec1(2.0), vec1(1.0), quick(40000));
    EXPECT_NEAR(r.analytic.real(), 2.0, 1e-12);
    EXPECT_LT(std::abs(r.final_estimate.estimate - 2.0), 0.15 * 2.0);
}

TEST(SymbolProbe, IndependentOfRadiusForBrownianMotion) {
    const IndependenceReport r = symbol_independence_check(fixtures::levy(fixtures::bm_triplet()), vec1(0.0), vec1(1.0),
                                                           {1.0, 2.0, 4.0}, quick());
    EXPECT_TRUE(r.consistent) << r.max_pair_z;
    EXPECT_EQ(r.reports.size(), 3u);
}

TEST(SymbolProbe, IndependentOfRadiusForCompoundPoisson) {
    const LevyTriplet t = fixtures::poisson_triplet(1.0, 2.0);
    const IndependenceReport r =
        symbol_independence_check(fixtures::levy(t), vec1(0.0), vec1(0.8), {1.0, 3.0}, quick());
    EXPECT_TRUE(r.consistent) << r.max_pair_z;
    // psi(xi) = 1 - e^{2 i xi} for a jump outside the cut-off.
    const Complex want = 1.0 - std::exp(Complex(0.0, 1.6));
    EXPECT_NEAR(std::abs(r.reports[0].analytic - want), 0.0, 1e-12);
    for (const SymbolReport& s : r.reports)
        EXPECT_LE(std::abs(s.final_estimate.estimate - want), std::max(0.1 * std::abs(want), 3.0 * s.final_estimate.stderr()));
}

TEST(SymbolProbe, DegenerateRadiusIsDiagnosed) {
    ProbeSettings s = quick(2000);
    s.K_radius = 1e-6;
    s.t_ladder = {0.004, 0.002};
    s.dt = 1e-3;
    EXPECT_THROW(estimate_symbol(fixtures::levy(fixtures::bm_triplet()), vec1(0.0), vec1(1.0), s), EstimationError);
}

TEST(SymbolProbe, SettingsValidation) {
    ProbeSettings s = quick();
    s.t_ladder = {0.01, 0.02};
    EXPECT_THROW(s.validate(), ConfigError);
    s = quick();
    s.K_radius = 0.0;
    EXPECT_THROW(s.validate(), ConfigError);
    EXPECT_THROW(symbol_independence_check(fixtures::levy(fixtures::bm_triplet()), vec1(0.0), vec1(1.0), {1.0, 1.0},
                                           quick(100)),
                 ConfigError);
}

TEST(SymbolProbe, SpaceHomogeneityForConstantTriplets) {
    LevyTriplet t = fixtures::bm_triplet(0.5, 0.4);
    t.measure = LevyMeasure::discrete({{vec1(0.3), 2.0}});
    const StateModel m = fixtures::levy(t);
    const SymbolReport a = estimate_symbol(m, vec1(0.0), vec1(1.5), quick());
    ProbeSettings other = quick();
    other.seed = 23;
    const SymbolReport b = estimate_symbol(m, vec1(4.0), vec1(1.5), other);
    EXPECT_LE(std::abs(a.final_estimate.estimate - b.final_estimate.estimate),
              3.0 * combined(a.final_estimate, b.final_estimate));
}

TEST(SymbolProbe, BiasDecaysAlongLadder) {
    ProbeSettings s = quick();
    s.extrapolate = false;
    s.t_ladder = {0.16, 0.08, 0.04, 0.02};
    const SymbolReport r = estimate_symbol(fixtures::levy(fixtures::bm_triplet()), vec1(0.0), vec1(2.0), s);
    for (std::size_t k = 1; k < r.ladder.size(); ++k) {
        const double prev = std::abs(r.ladder[k - 1].estimate - r.analytic);
        const double cur = std::abs(r.ladder[k].estimate - r.analytic);
        EXPECT_LE(cur, prev + 2.0 * r.ladder[k].stderr());
    }
    // Extrapolation off: the final value is the smallest-t rung.
    EXPECT_EQ(r.final_estimate.t, 0.02);
}

TEST(SymbolProbe, ConjugateSymmetry) {
    LevyTriplet t = fixtures::bm_triplet(1.0, 0.5);
    t.measure = LevyMeasure::discrete({{vec1(0.4), 1.0}});
    const std::vector<SymbolReport> r =
        estimate_symbols(fixtures::levy(t), vec1(0.0), {vec1(1.2), vec1(-1.2)}, quick());
    ASSERT_EQ(r.size(), 2u);
    const Complex a = r[0].final_estimate.estimate, b = std::conj(r[1].final_estimate.estimate);
    EXPECT_LE(std::abs(a - b), 3.0 * combined(r[0].final_estimate, r[1].final_estimate) + 1e-12);
}

TEST(SymbolProbe, ZeroFrequencyIsKillingRate) {
    const SymbolReport cons = estimate_symbol(fixtures::levy(fixtures::bm_triplet()), vec1(0.0), vec1(0.0), quick());
    EXPECT_LE(std::abs(cons.final_estimate.estimate), 3.0 * cons.final_estimate.stderr() + 1e-12);
    const SymbolReport killed =
        estimate_symbol(fixtures::levy(fixtures::bm_triplet(1.0, 0.0, 2.0)), vec1(0.0), vec1(0.0), quick());
    EXPECT_LE(std::abs(killed.final_estimate.estimate - 2.0), 3.0 * killed.final_estimate.stderr());
    EXPECT_NEAR(killed.final_estimate.estimate.imag(), 0.0, 1e-12);
}

TEST(SymbolProbe, ReportExports) {
    const SymbolReport r = estimate_symbol(fixtures::levy(fixtures::bm_triplet()), vec1(0.0), vec1(1.0), quick(500));
    const Json j = report_json(r);
    EXPECT_TRUE(j.contains("ladder"));
    EXPECT_EQ(j["ladder"].size(), 4u);
    std::ostringstream os;
    write_symbol_csv(os, {r, r});
    const std::string csv = os.str();
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}
