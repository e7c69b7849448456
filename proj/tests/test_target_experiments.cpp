#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <hypershrink/target_experiments.hpp>

using namespace hypershrink;

namespace {

ExperimentConfig small_config(RadiusSequence seq, std::int64_t T = 2000, std::int64_t trials = 200)
{
    ExperimentConfig cfg;
    cfg.radius = std::move(seq);
    cfg.T = T;
    cfg.trials = trials;
    cfg.seed = 1234;
    cfg.threads = 1;
    return cfg;
}

void expect_same_trials(const std::vector<TrialRecord>& a, const std::vector<TrialRecord>& b)
{
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
        EXPECT_EQ(a[j].seed, b[j].seed);
        EXPECT_EQ(a[j].hit_times, b[j].hit_times);
        EXPECT_EQ(a[j].checkpoint_counts, b[j].checkpoint_counts);
    }
}

const HPoint kCenter{0.0, 2.0};

} // namespace

TEST(Experiment, ZeroRadiusNeverHits)
{
    const auto rep = run_experiment(small_config(RadiusSequence(Constant{0.0}), 500, 20));
    for (const auto& tr : rep.trials) {
        EXPECT_EQ(tr.S_T, 0);
        EXPECT_EQ(tr.first_hit(), 0);
        EXPECT_EQ(tr.last_hit(), 0);
    }
    EXPECT_EQ(rep.final_row().I_T, 0.0);
    EXPECT_EQ(rep.final_row().mean_ratio, 0.0);
}

TEST(Experiment, TrialsAreDeterministicAndIndependentOfThreads)
{
    ExperimentConfig cfg = small_config(RadiusSequence(Constant{0.3}), 800, 12);
    const auto one = run_experiment(cfg);
    cfg.threads = 3;
    const auto three = run_experiment(cfg);
    expect_same_trials(one.trials, three.trials);
    EXPECT_EQ(one.final_row().second_moment, three.final_row().second_moment);
    const TrialRecord single = run_trial(cfg, 7);
    EXPECT_EQ(single.seed, cfg.seed ^ 7u);
    EXPECT_EQ(single.hit_times, one.trials[7].hit_times);
}

TEST(Experiment, RecordsAreConsistent)
{
    ExperimentConfig cfg = small_config(RadiusSequence(Constant{0.3}), 1000, 10);
    cfg.checkpoints = {100, 333, 1000, 600};
    const auto rep = run_experiment(cfg);
    ASSERT_EQ(rep.rows.size(), 4u);
    for (std::size_t c = 1; c < rep.rows.size(); ++c)
        EXPECT_LT(rep.rows[c - 1].T, rep.rows[c].T);
    for (const auto& tr : rep.trials) {
        EXPECT_TRUE(std::is_sorted(tr.hit_times.begin(), tr.hit_times.end()));
        EXPECT_EQ(tr.checkpoint_counts.back(), tr.S_T);
        for (std::size_t c = 0; c < rep.rows.size(); ++c) {
            const std::int64_t Tc = rep.rows[c].T;
            std::int64_t count = 0;
            bool late = false;
            for (std::int64_t t : tr.hit_times) {
                count += t <= Tc;
                late = late || (2 * t >= Tc && t <= Tc);
            }
            EXPECT_EQ(tr.checkpoint_counts[c], count);
            EXPECT_EQ(tr.late_hit[c], late);
        }
    }
}

TEST(Experiment, MeanHitsMatchExpectedForConstantTarget)
{
    const double r = 0.3;
    const auto rep = run_experiment(small_config(RadiusSequence(Constant{r})));
    const auto& row = rep.final_row();
    EXPECT_NEAR(row.I_T, 2000 * ball_area(r) / (2 * kPi), 1e-9);
    EXPECT_NEAR(row.mean_S, row.I_T, 4 * row.se_mean);
    EXPECT_TRUE(rep.embedded);
    EXPECT_FALSE(rep.within_R);
}

TEST(Experiment, MeanHitsMatchExpectedForShrinkingTarget)
{
    const auto rep = run_experiment(small_config(RadiusSequence(PowerLaw{0.5, 0.5})));
    const auto& row = rep.final_row();
    EXPECT_NEAR(row.mean_S, row.I_T, 4 * row.se_mean);
    EXPECT_GE(row.second_moment, row.mean_ratio * row.mean_ratio);
}

TEST(Experiment, NestedTargetsGiveNestedHits)
{
    const auto big = run_experiment(small_config(RadiusSequence(Constant{0.3}), 1000, 20));
    const auto small = run_experiment(small_config(RadiusSequence(PowerLaw{0.3, 0.25}), 1000, 20));
    for (std::size_t j = 0; j < big.trials.size(); ++j) {
        EXPECT_LE(small.trials[j].S_T, big.trials[j].S_T);
        for (std::int64_t t : small.trials[j].hit_times)
            EXPECT_TRUE(std::binary_search(big.trials[j].hit_times.begin(), big.trials[j].hit_times.end(), t));
    }
    EXPECT_LT(small.final_row().I_T, big.final_row().I_T);
}

TEST(Experiment, RadiusFlags)
{
    EXPECT_TRUE(ExperimentContext(small_config(RadiusSequence(Constant{0.1}), 10, 2)).within_R());
    const ExperimentContext big(small_config(RadiusSequence(Constant{0.6}), 10, 2));
    EXPECT_FALSE(big.within_R());
    EXPECT_FALSE(big.embedded());
    EXPECT_NEAR(big.R(), 0.25 * 0.5 * std::acosh(1.5), 1e-12);
}

TEST(Experiment, InputErrors)
{
    auto cfg = small_config(RadiusSequence(Constant{0.1}), 10, 1);
    EXPECT_THROW(run_experiment(cfg), DomainError);
    cfg.trials = 2;
    cfg.h = 0;
    EXPECT_THROW(ExperimentContext{cfg}, DomainError);
    cfg.h = 11;
    EXPECT_THROW(ExperimentContext{cfg}, DomainError);
    cfg.h = 1;
    cfg.p0 = {3, 1};
    EXPECT_THROW(ExperimentContext{cfg}, DomainError);
    cfg.p0 = kCenter;
    cfg.checkpoints = {11};
    EXPECT_THROW(ExperimentContext{cfg}, DomainError);
    cfg.checkpoints = {};
    cfg.radius = RadiusSequence(Table{{0.2, 0.1}});
    EXPECT_THROW(ExperimentContext{cfg}, RangeError);
    cfg.radius = RadiusSequence(Constant{3.5});
    EXPECT_THROW(ExperimentContext{cfg}, DomainError);
}

TEST(ExpectedSum, ConstantClosedForm)
{
    for (double r : {0.05, 0.2, 0.4})
        EXPECT_NEAR(expected_sum_I(RadiusSequence(Constant{r}), 1000, GroupKind::Gamma2, kCenter),
                    1000 * (std::cosh(r) - 1), 1e-9);
    // the cutoff removes early terms
    EXPECT_NEAR(expected_sum_I(RadiusSequence(Constant{0.2}, 2, 11), 1000, GroupKind::Gamma2, kCenter),
                990 * (std::cosh(0.2) - 1), 1e-9);
}

TEST(ExpectedSum, SandwichedBySquareSums)
{
    // embedded balls: r^2/2 <= cosh r - 1 <= cosh(r) r^2/2
    const RadiusSequence seq(PowerLaw{0.45, 0.5});
    const std::int64_t T = 5000;
    double sq = 0;
    for (std::int64_t t = 1; t <= T; ++t)
        sq += seq(t) * seq(t);
    const double I = expected_sum_I(seq, T, GroupKind::Gamma2, kCenter);
    EXPECT_GE(I, 0.5 * sq);
    EXPECT_LE(I, 0.5 * std::cosh(0.45) * sq);
}

TEST(ExpectedSum, OverlappingBallsAreCorrected)
{
    const double r = 0.6;
    const double I = expected_sum_I(RadiusSequence(Constant{r}), 10, GroupKind::Gamma2, kCenter);
    EXPECT_LT(I, 10 * (std::cosh(r) - 1));
    EXPECT_GT(I, 0.5 * 10 * (std::cosh(r) - 1));
}

TEST(MassAfterFlow, PreservedAndThreadIndependent)
{
    const auto a = mass_after_flow(GroupKind::Gamma2, kCenter, 0.3, 1.0, 20, 4000, 5, 1);
    EXPECT_LT(std::fabs(a.z_score()), 4);
    const auto b = mass_after_flow(GroupKind::Gamma2, kCenter, 0.3, 1.0, 20, 4000, 5, 3);
    EXPECT_EQ(a.fraction, b.fraction);
    const auto c = mass_after_flow(GroupKind::PSL2Z, {0, 1.5}, 0.2, 0.7, 15, 4000, 6, 1);
    EXPECT_LT(std::fabs(c.z_score()), 4);
}

TEST(TwoBall, DecaysLikeExponentialOfDistance)
{
    const HPoint o1{0, 1};
    std::vector<double> logs;
    for (double d : {4.0, 6.0, 8.0}) {
        const auto rep = two_ball_experiment(o1, 0.4, {0, std::exp(d)}, 0.4, 1.0, 300000, 3, 1);
        EXPECT_TRUE(rep.gate);
        EXPECT_NEAR(rep.d, d, 1e-12);
        ASSERT_GT(rep.hits, 0);
        logs.push_back(std::log(rep.estimate));
    }
    const double slope = (logs[2] - logs[0]) / 4.0;
    EXPECT_GT(slope, -1.2);
    EXPECT_LT(slope, -0.8);
}

TEST(TwoBall, ScalesQuadraticallyInSecondRadius)
{
    const HPoint o1{0, 1}, o2{0, std::exp(4.0)};
    const auto big = two_ball_experiment(o1, 0.4, o2, 0.4, 1.0, 300000, 4, 1);
    const auto small = two_ball_experiment(o1, 0.4, o2, 0.2, 1.0, 300000, 4, 1);
    const double ratio = big.estimate / small.estimate;
    EXPECT_GT(ratio, 3.0);
    EXPECT_LT(ratio, 4.6);
}

TEST(TwoBall, GateViolationGivesZero)
{
    const auto rep = two_ball_experiment({0, 1}, 0.2, {0, std::exp(4.5)}, 0.2, 1.0, 100000, 5, 1);
    EXPECT_FALSE(rep.gate);
    EXPECT_EQ(rep.hits, 0);
    EXPECT_EQ(rep.estimate, 0.0);
}

TEST(TwoBall, ThreadIndependent)
{
    const HPoint o1{0, 1}, o2{0, std::exp(5.0)};
    const auto a = two_ball_experiment(o1, 0.3, o2, 0.3, 1.0, 50000, 6, 1);
    const auto b = two_ball_experiment(o1, 0.3, o2, 0.3, 1.0, 50000, 6, 4);
    EXPECT_EQ(a.hits, b.hits);
    EXPECT_EQ(a.estimate, b.estimate);
}

TEST(TwoBall, Preconditions)
{
    const HPoint o1{0, 1}, o2{0, std::exp(4.0)};
    EXPECT_THROW(two_ball_experiment(o1, 1.0, o2, 0.3, 1.0, 10, 0), DomainError);
    EXPECT_THROW(two_ball_experiment(o1, 0.3, o2, 0.0, 1.0, 10, 0), DomainError);
    EXPECT_THROW(two_ball_experiment(o1, 0.3, {0, 5}, 0.3, 1.0, 10, 0), DomainError);
    EXPECT_THROW(two_ball_experiment(o1, 0.5, o2, 0.5, 1.0, 10, 0), DomainError);
    EXPECT_THROW(two_ball_experiment(o1, 0.3, o2, 0.3, 1.0, 0, 0), DomainError);
}
