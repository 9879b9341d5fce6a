#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "symbolkit/errors.hpp"
#include "symbolkit/martingale_oracle.hpp"

using namespace symbolkit;
using fixtures::vec1;

namespace {

SimSpec spec1(double x0, double horizon, double dt, std::size_t n, std::uint64_t seed = 29) {
    SimSpec s;
    s.x0 = vec1(x0);
    s.horizon = horizon;
    s.dt = dt;
    s.n_paths = n;
    s.seed = seed;
    return s;
}

const std::vector<double> kTimes{0.25, 0.5, 1.0};

Path step_path(const std::vector<std::pair<double, double>>& jumps, double dt, double horizon) {
    Path p(1);
    const long n = std::lround(horizon / dt);
    for (long i = 0; i <= n; ++i) {
        const double t = i * dt;
        double x = 0.0;
        for (const auto& [when, size] : jumps)
            if (t >= when - 1e-12) x += size;
        p.push_finite(t, vec1(x));
    }
    return p;
}

}  // namespace

TEST(Truncation, BigJumpRoutedSmallJumpKept) {
    const Path p = step_path({{0.3, 2.0}, {0.7, 0.1}}, 0.1, 1.0);
    const TruncationDecomposition d = truncate_jumps(p, 1.0);
    ASSERT_EQ(d.size(), p.size());
    EXPECT_DOUBLE_EQ(d.big(d.size() - 1)[0], 2.0);
    EXPECT_NEAR(d.rest(d.size() - 1)[0], 0.1, 1e-12);
    EXPECT_DOUBLE_EQ(d.big(2)[0], 0.0);
    EXPECT_DOUBLE_EQ(d.big(3)[0], 2.0);
}

TEST(Truncation, ContinuousPathHasNoBigJumps) {
    Path p(1);
    for (int i = 0; i <= 100; ++i) p.push_finite(0.01 * i, vec1(std::sin(0.01 * i)));
    const TruncationDecomposition d = truncate_jumps(p, 0.5);
    for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(d.big(i)[0], 0.0);
}

TEST(Truncation, ExactOnPiecewiseConstantPaths) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> size(-3.0, 3.0), when(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<std::pair<double, double>> jumps;
        for (int k = 0; k < 8; ++k) jumps.emplace_back(when(rng), size(rng));
        const Path p = step_path(jumps, 0.01, 1.0);
        const TruncationDecomposition d = truncate_jumps(p, 1.0);
        for (std::size_t i = 0; i < d.size(); ++i) {
            EXPECT_NEAR(d.big(i)[0] + d.rest(i)[0], p.values(i)[0], 1e-12 * static_cast<double>(i + 1));
            if (i > 0) {
                EXPECT_LE(std::abs(d.rest(i)[0] - d.rest(i - 1)[0]), 1.0 + 1e-12);
            }
        }
    }
}

TEST(Truncation, StopsAtKilling) {
    Path p = step_path({{0.2, 2.0}}, 0.1, 0.4);
    p.push_delta(0.5);
    const TruncationDecomposition d = truncate_jumps(p, 1.0);
    EXPECT_EQ(d.size(), 5u);
}

TEST(Truncation, CompoundPoissonBigJumpMean) {
    const std::size_t n = 20000;
    const Ensemble e = sample_levy(fixtures::poisson_triplet(1.0, 3.0), spec1(0.0, 1.0, 0.01, n));
    double sum = 0.0;
    for (const Path& p : e.paths) {
        const TruncationDecomposition d = truncate_jumps(p, 1.0);
        sum += d.big(d.size() - 1)[0];
    }
    EXPECT_NEAR(sum / n, 3.0, 4.0 * 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST(Compensator, ConstantRates) {
    for (double a : {0.0, 0.1, 0.5, 2.0}) {
        const StateModel m = fixtures::levy(fixtures::bm_triplet(1.0, 0.0, a));
        const CompensatorReport r = killing_compensator_check(m, spec1(0.0, 1.0, 0.01, 20000), kTimes);
        EXPECT_TRUE(r.pass) << a;
        EXPECT_EQ(r.n_excluded, 0u);
        ASSERT_EQ(r.rows.size(), 3u);
        for (const CompensatorRow& row : r.rows) {
            const double want = 1.0 - std::exp(-a * row.t);
            EXPECT_NEAR(row.killed_fraction, want, 4.0 * std::sqrt(want * (1 - want) / 20000.0) + 1e-12);
            EXPECT_NEAR(row.mean_compensator, want, 0.02);
            if (a == 0.0) {
                EXPECT_EQ(row.killed_fraction, 0.0);
                EXPECT_EQ(row.mean_compensator, 0.0);
            }
        }
    }
}

TEST(Compensator, QuadraticKilling) {
    const CompensatorReport r =
        killing_compensator_check(fixtures::quadratic_killing(), spec1(0.0, 1.0, 0.001, 20000), kTimes);
    EXPECT_TRUE(r.pass);
    for (const CompensatorRow& row : r.rows) {
        const double want = 1.0 - std::exp(-row.t * row.t * row.t / 3.0);
        EXPECT_NEAR(row.mean_compensator, want, 5e-3);
    }
}

TEST(Compensator, EnsembleOverloadMatchesStreaming) {
    const StateModel m = fixtures::sine_killing();
    const SimSpec s = spec1(0.0, 1.0, 0.01, 500);
    const CompensatorReport a = killing_compensator_check(m, s, kTimes);
    const CompensatorReport b = killing_compensator_check(sample_autonomous(m, s), m, kTimes);
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(a.rows[i].killed_fraction, b.rows[i].killed_fraction);
        EXPECT_NEAR(a.rows[i].mean_compensator, b.rows[i].mean_compensator, 1e-12);
    }
}

TEST(Compensator, TimesMustLieOnGrid) {
    const StateModel m = fixtures::levy(fixtures::killing_triplet(1.0));
    EXPECT_THROW(killing_compensator_check(m, spec1(0.0, 1.0, 0.01, 10), {0.255}), ConfigError);
    EXPECT_THROW(killing_compensator_check(m, spec1(0.0, 1.0, 0.01, 10), {2.0}), ConfigError);
}

TEST(ExponentialMartingale, BrownianMotion) {
    const MartingaleReport r = exponential_martingale_check(fixtures::levy(fixtures::bm_triplet()),
                                                            spec1(0.0, 1.0, 0.25, 20000), {vec1(1.0)}, kTimes);
    EXPECT_EQ(r.form, MartingaleForm::levy);
    EXPECT_TRUE(r.pass);
    for (const MartingaleRow& row : r.rows) {
        EXPECT_NEAR(std::abs(row.char_target - std::exp(-0.5 * row.t)), 0.0, 1e-14);
        EXPECT_FALSE(row.oscillation);
    }
}

TEST(ExponentialMartingale, KilledLevy) {
    LevyTriplet t = fixtures::bm_triplet(1.0, 0.3, 0.5);
    t.measure = LevyMeasure::discrete({{vec1(0.6), 1.0}});
    const MartingaleReport r =
        exponential_martingale_check(fixtures::levy(t), spec1(0.0, 1.0, 0.25, 20000), {vec1(-1.0), vec1(2.0)}, kTimes);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.rows.size(), 6u);
}

TEST(ExponentialMartingale, AutonomousSineKilling) {
    const MartingaleReport r = exponential_martingale_check(fixtures::sine_killing(), spec1(0.0, 1.0, 0.005, 20000),
                                                            {vec1(1.0)}, kTimes);
    EXPECT_EQ(r.form, MartingaleForm::autonomous);
    EXPECT_TRUE(r.pass);
    for (const MartingaleRow& row : r.rows) EXPECT_EQ(row.target, Complex(0.0, 0.0));
}

TEST(ExponentialMartingale, FormsAgreeOnConstantModel) {
    const StateModel m = fixtures::levy(fixtures::bm_triplet(1.0, 0.0, 0.5));
    const SimSpec s = spec1(0.0, 1.0, 0.005, 20000);
    const MartingaleReport lev = exponential_martingale_check(m, s, {vec1(1.0)}, kTimes);
    const MartingaleReport aut = exponential_martingale_check(m, s, {vec1(1.0)}, kTimes, true);
    EXPECT_EQ(lev.form, MartingaleForm::levy);
    EXPECT_EQ(aut.form, MartingaleForm::autonomous);
    EXPECT_EQ(lev.pass, aut.pass);
    EXPECT_TRUE(aut.pass);
}

TEST(ExponentialMartingale, LargeFrequencyFlagsOscillation) {
    const MartingaleReport r = exponential_martingale_check(fixtures::levy(fixtures::bm_triplet()),
                                                            spec1(0.0, 1.0, 0.25, 2000), {vec1(3.0)}, {1.0});
    EXPECT_TRUE(r.oscillation);
}

TEST(Residual, BrownianWithDrift) {
    const ResidualReport r = canonical_representation_residual(fixtures::levy(fixtures::bm_triplet(1.0, 2.0)),
                                                               spec1(0.0, 1.0, 0.01, 20000), 1.0, kTimes);
    EXPECT_TRUE(r.pass);
    for (const ResidualRow& row : r.rows) EXPECT_NEAR(row.stderr(0), std::sqrt(row.t / 20000.0), 0.1 * std::sqrt(row.t / 20000.0));
}

TEST(Residual, CompoundPoissonIsAllBigJumps) {
    const ResidualReport r = canonical_representation_residual(fixtures::levy(fixtures::poisson_triplet(1.0, 3.0)),
                                                               spec1(0.0, 1.0, 0.01, 5000), 1.0, kTimes);
    EXPECT_TRUE(r.pass);
    for (const ResidualRow& row : r.rows) EXPECT_NEAR(row.mean(0), 0.0, 1e-12);
}

TEST(Residual, StableOneAndHalf) {
    const ResidualReport r = canonical_representation_residual(fixtures::levy(fixtures::stable_triplet(1.5)),
                                                               spec1(0.0, 1.0, 0.01, 20000), 1.0, kTimes);
    EXPECT_TRUE(r.pass);
}

TEST(Residual, RejectsSdeModels) {
    EXPECT_THROW(canonical_representation_residual(fixtures::sde_cauchy(), spec1(1.0, 1.0, 0.01, 10), 1.0, kTimes),
                 Error);
}

TEST(Reports, JsonCarriesRowsAndVerdict) {
    const StateModel m = fixtures::levy(fixtures::bm_triplet(1.0, 0.0, 0.5));
    const SimSpec s = spec1(0.0, 1.0, 0.25, 200);
    const Json a = report_json(killing_compensator_check(m, s, kTimes));
    const Json b = report_json(exponential_martingale_check(m, s, {vec1(1.0)}, kTimes));
    const Json c = report_json(canonical_representation_residual(m, s, 1.0, kTimes));
    for (const Json* j : {&a, &b, &c}) {
        EXPECT_TRUE(j->contains("pass"));
        EXPECT_EQ((*j)["rows"].size(), 3u);
    }
}
