#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <hypershrink/quotient_flow.hpp>

#include "oracles.hpp"

using namespace hypershrink;

namespace {

const HPoint kCenter{0.0, 2.0};

const Reducer& gamma2_reducer()
{
    static const Reducer r(GroupKind::Gamma2);
    return r;
}

const Reducer& psl_reducer()
{
    static const Reducer r(GroupKind::PSL2Z);
    return r;
}

const TranslateSet& gamma2_translates()
{
    static const TranslateSet ts = TranslateSet::build(GroupKind::Gamma2, kCenter);
    return ts;
}

// Images of p0 under every element of the brute-force ball of radius t.
std::vector<HPoint> oracle_images(double t, bool gamma2, const HPoint& p0)
{
    std::vector<HPoint> out;
    for (const auto& [a, b, c, d] : oracle::brute_force_ball(t, gamma2))
        out.push_back(oracle::act(double(a), double(b), double(c), double(d), p0));
    return out;
}

double oracle_quotient_dist(const HPoint& z, const std::vector<HPoint>& images)
{
    double best = INFINITY;
    for (const HPoint& w : images)
        best = std::min(best, oracle::dist(z, w));
    return best;
}

Frame random_frame(Rng& rng)
{
    return frame_from({rng.uniform(-20.0, 20.0), std::exp(rng.uniform(-5.0, 3.0))}, rng.uniform(0.0, 2 * kPi));
}

// Area of the part of a radius-r disk beyond a geodesic at distance a, by
// quadrature in polar coordinates: the point (rho, phi) lies beyond when
// tanh(rho) cos(phi) >= tanh(a).
double segment_area_quadrature(double a, double r)
{
    const int n = 200000;
    const double phi_max = std::acos(std::min(1.0, std::tanh(a) / std::tanh(r)));
    double sum = 0;
    for (int k = 0; k < n; ++k) {
        const double phi = -phi_max + (k + 0.5) * (2 * phi_max / n);
        const double rho0 = std::atanh(std::tanh(a) / std::cos(phi));
        sum += std::cosh(r) - std::cosh(rho0);
    }
    return sum * (2 * phi_max / n);
}

} // namespace

TEST(ReductionRegion, Membership)
{
    EXPECT_TRUE(in_reduction_region({0, 1}, GroupKind::PSL2Z));
    EXPECT_TRUE(in_reduction_region({0.5, std::sqrt(0.75)}, GroupKind::PSL2Z));
    EXPECT_FALSE(in_reduction_region({0.6, 2}, GroupKind::PSL2Z));
    EXPECT_FALSE(in_reduction_region({0, 0.9}, GroupKind::PSL2Z));
    EXPECT_TRUE(in_reduction_region({0, 2}, GroupKind::Gamma2));
    EXPECT_TRUE(in_reduction_region({0.9, 0.5}, GroupKind::Gamma2));
    EXPECT_FALSE(in_reduction_region({0.5, 0.4}, GroupKind::Gamma2));
    EXPECT_FALSE(in_reduction_region({1.2, 3}, GroupKind::Gamma2));
}

TEST(Reduce, PureTranslation)
{
    const QuotientState q = psl_reducer().reduce(frame_from({5, 1}, 0.3));
    EXPECT_NEAR(q.point().x, 0, 1e-12);
    EXPECT_NEAR(q.point().y, 1, 1e-12);
    EXPECT_NEAR(direction(q.frame), 0.3, 1e-12);
}

TEST(Reduce, DeepPointViaInversion)
{
    const Frame f = frame_from({0, 0.1}, 1.0);
    ReductionTrace tr;
    const QuotientState q = psl_reducer().reduce(f, &tr);
    EXPECT_TRUE(in_reduction_region(q.point(), GroupKind::PSL2Z));
    EXPECT_NEAR(q.point().y, 10, 1e-9);
    const Mat2 w = tr.word.to_mat2();
    EXPECT_LT(oracle::dist(oracle::act(w.a, w.b, w.c, w.d, basepoint(f)), q.point()), 1e-8);
}

TEST(Reduce, AlreadyReducedIsUnchanged)
{
    for (const Reducer* r : {&psl_reducer(), &gamma2_reducer()}) {
        const Frame f = frame_from({0.1, 1.7}, 2.0);
        const QuotientState q = r->reduce(f);
        EXPECT_EQ(q.word_length, 0);
        EXPECT_EQ(q.frame.matrix().a, f.matrix().a);
        EXPECT_EQ(q.frame.matrix().d, f.matrix().d);
    }
}

TEST(Reduce, WordMapsOriginalToReduced)
{
    Rng rng(21);
    for (const Reducer* r : {&psl_reducer(), &gamma2_reducer()}) {
        for (int k = 0; k < 2000; ++k) {
            const Frame f = random_frame(rng);
            ReductionTrace tr;
            const QuotientState q = r->reduce(f, &tr);
            EXPECT_TRUE(in_reduction_region(q.point(), r->kind()));
            EXPECT_TRUE(satisfies_congruence(r->kind(), tr.word));
            const Mat2 w = tr.word.to_mat2();
            EXPECT_LT(oracle::dist(oracle::act(w.a, w.b, w.c, w.d, basepoint(f)), q.point()), 1e-8);
            EXPECT_NEAR(direction(q.frame), direction(Frame::unchecked(w * f.matrix())), 1e-8);
        }
    }
}

TEST(Reduce, Gamma2PointsAreDirichletOptimal)
{
    const auto images = oracle_images(4.5, true, kCenter);
    Rng rng(22);
    for (int k = 0; k < 2000; ++k) {
        const HPoint z = gamma2_reducer().reduce(random_frame(rng)).point();
        EXPECT_LE(oracle::dist(z, kCenter), oracle_quotient_dist(z, images) + 1e-9);
    }
}

TEST(Reduce, InvalidFrameAndMoveBudget)
{
    EXPECT_THROW(psl_reducer().reduce(Frame::unchecked(Mat2{2, 0, 0, 2})), DomainError);
    const Reducer tight(GroupKind::PSL2Z, 0, {3, kDefaultDetTolerance});
    EXPECT_THROW(tight.reduce(frame_from({0.3, 1e-6}, 0)), CorruptionError);
}

TEST(Step, ZeroIsIdentityAndRange)
{
    Rng rng(23);
    const QuotientState q = sample_liouville(gamma2_reducer(), rng);
    const QuotientState s = step(q, 0, gamma2_reducer());
    EXPECT_EQ(s.frame.matrix().a, q.frame.matrix().a);
    EXPECT_EQ(s.frame.matrix().c, q.frame.matrix().c);
    EXPECT_THROW(step(q, 10.5, gamma2_reducer()), DomainError);
    EXPECT_THROW(step(q, -1, gamma2_reducer()), DomainError);
}

TEST(Step, SemigroupProperty)
{
    Rng rng(24);
    for (int k = 0; k < 2000; ++k) {
        const QuotientState q = sample_liouville(gamma2_reducer(), rng);
        const double h = rng.uniform(0.1, 3.0);
        const QuotientState two = step(step(q, h, gamma2_reducer()), h, gamma2_reducer());
        const QuotientState one = step(q, 2 * h, gamma2_reducer());
        EXPECT_LT(quotient_dist_between(two.point(), one.point(), gamma2_translates()), 1e-8);
    }
}

TEST(Step, CuspExcursionReturns)
{
    // horizontal frame high in the cusp: the geodesic is a large semicircle
    QuotientState q = psl_reducer().reduce(frame_from({0, 50}, 0));
    double prev = q.point().y;
    for (int k = 0; k < 3; ++k) {
        q = step(q, 1.0, psl_reducer());
        EXPECT_LT(q.point().y, prev);
        prev = q.point().y;
    }
}

TEST(Step, DeterminantStaysUnitOverLongOrbits)
{
    Rng rng(25);
    QuotientState q = sample_liouville(gamma2_reducer(), rng);
    for (int k = 0; k < 20000; ++k) {
        q = step(q, 1.0, gamma2_reducer());
        ASSERT_LT(std::fabs(q.frame.matrix().det() - 1), 1e-9);
        ASSERT_TRUE(in_reduction_region(q.point(), GroupKind::Gamma2));
    }
}

TEST(QuotientDist, AtCenterAndBelowPlainDistance)
{
    EXPECT_EQ(quotient_dist(kCenter, kCenter, gamma2_translates()), 0.0);
    Rng rng(26);
    for (int k = 0; k < 1000; ++k) {
        const HPoint z = sample_liouville(gamma2_reducer(), rng).point();
        EXPECT_LE(quotient_dist(z, kCenter, gamma2_translates()), dist(z, kCenter));
    }
}

TEST(QuotientDist, MatchesBruteForceOverBallEight)
{
    const auto images = oracle_images(8.0, true, kCenter);
    Rng rng(27);
    double worst = 0;
    for (int k = 0; k < 10000; ++k) {
        QuotientState q = sample_liouville(gamma2_reducer(), rng);
        q = step(q, 1.0, gamma2_reducer());
        const double got = quotient_dist(q, kCenter, gamma2_translates());
        worst = std::max(worst, std::fabs(got - oracle_quotient_dist(q.point(), images)));
    }
    EXPECT_LT(worst, 1e-9);
}

TEST(QuotientDist, MissingOrMismatchedTranslatesIsDependencyError)
{
    EXPECT_THROW(quotient_dist(kCenter, kCenter, TranslateSet{}), DependencyError);
    EXPECT_THROW(quotient_dist(kCenter, HPoint{0, 3}, gamma2_translates()), DependencyError);
}

TEST(Injectivity, OrbifoldPointOfPsl2z)
{
    const auto inj = injectivity_radius({0, 1}, GroupKind::PSL2Z);
    EXPECT_TRUE(inj.orbifold);
    EXPECT_EQ(inj.value, 0.0);
}

TEST(Injectivity, Gamma2AtTwoI)
{
    double best = INFINITY;
    for (const HPoint& w : oracle_images(4.0, true, kCenter)) {
        const double d = oracle::dist(kCenter, w);
        if (d > 1e-12)
            best = std::min(best, d);
    }
    const auto inj = injectivity_radius(kCenter, GroupKind::Gamma2);
    EXPECT_FALSE(inj.orbifold);
    EXPECT_NEAR(inj.min_displacement, best, 1e-12);
    EXPECT_NEAR(inj.value, 0.5 * best, 1e-12);
    EXPECT_NEAR(inj.value, 0.5 * std::acosh(1.5), 1e-12);
    EXPECT_THROW(injectivity_radius({3, 1}, GroupKind::Gamma2), DomainError);
}

TEST(Injectivity, RadiusRIsCapped)
{
    EXPECT_EQ(radius_R(100, 50), 1.0);
    EXPECT_EQ(radius_R(0.4, 50), 0.1);
    EXPECT_EQ(radius_R(100, 0.3), 0.3);
}

TEST(DirectionTowards, GeodesicHitsTarget)
{
    Rng rng(28);
    for (int k = 0; k < 1000; ++k) {
        const HPoint p{rng.uniform(-2.0, 2.0), std::exp(rng.uniform(-1.0, 1.0))};
        const HPoint q{rng.uniform(-2.0, 2.0), std::exp(rng.uniform(-1.0, 1.0))};
        const double d = dist(p, q);
        if (d < 1e-6)
            continue;
        const HPoint end = basepoint(geodesic_step(frame_from(p, direction_towards(p, q)), d));
        EXPECT_LT(dist(end, q), 1e-8);
    }
}

TEST(DiskSegment, MatchesQuadrature)
{
    for (auto [a, r] : {std::pair{0.48, 0.5}, {0.2, 0.5}, {0.1, 1.0}, {0.7, 2.0}, {0.0, 0.3}}) {
        EXPECT_NEAR(disk_segment_area(a, r), segment_area_quadrature(a, r), 1e-7 * ball_area(r)) << a << " " << r;
    }
    EXPECT_EQ(disk_segment_area(0.5, 0.4), 0.0);
    EXPECT_NEAR(disk_segment_area(0, 1.3), 0.5 * ball_area(1.3), 1e-12);
    EXPECT_THROW(disk_segment_area(-1, 1), DomainError);
}

TEST(QuotientBallMeasure, EmbeddedBallIsAreaFraction)
{
    for (double r : {0.05, 0.2, 0.48})
        EXPECT_NEAR(quotient_ball_measure(kCenter, r, gamma2_translates(), 2 * kPi), ball_area(r) / (2 * kPi), 1e-15);
}

TEST(QuotientBallMeasure, OverlappingBallMatchesMonteCarlo)
{
    const double r = 0.5;  // just above the injectivity radius
    const double mu = quotient_ball_measure(kCenter, r, gamma2_translates(), 2 * kPi);
    EXPECT_LT(mu, ball_area(r) / (2 * kPi));
    Rng rng(29);
    const int m = 200000;
    int hits = 0;
    for (int k = 0; k < m; ++k)
        hits += quotient_dist(sample_liouville(gamma2_reducer(), rng).point(), kCenter, gamma2_translates()) <= r;
    const double se = std::sqrt(mu * (1 - mu) / m);
    EXPECT_NEAR(double(hits) / m, mu, 4 * se);
}

TEST(QuotientBallMeasure, Errors)
{
    EXPECT_THROW(quotient_ball_measure(kCenter, 2.5, gamma2_translates(), 2 * kPi), DomainError);
    EXPECT_THROW(quotient_ball_measure(kCenter, -0.1, gamma2_translates(), 2 * kPi), DomainError);
    EXPECT_THROW(quotient_ball_measure(kCenter, 3.5, gamma2_translates(), 2 * kPi), DomainError);
}

TEST(Sampler, InverseHeightMeanMatchesClosedForm)
{
    // E[1/y] over the modular domain = (3/pi) * int dx / (2 (1 - x^2)) = 3 ln 3 / (2 pi)
    const double want = 3 * std::log(3.0) / (2 * kPi);
    Rng rng(30);
    const int m = 100000;
    CompensatedSum s1, s2;
    for (int k = 0; k < m; ++k) {
        const double v = 1 / sample_psl2z_point(rng).y;
        s1 += v;
        s2 += v * v;
    }
    const double mean = s1.value() / m;
    const double se = std::sqrt((s2.value() / m - mean * mean) / m);
    EXPECT_NEAR(mean, want, 2 * se);
}

TEST(Sampler, HorizontalMarginalIsAreaWeighted)
{
    // area of {|x| < a} in the modular domain is 2 asin(a)
    const double want = 2 * std::asin(0.25) / (kPi / 3);
    Rng rng(31);
    const int m = 100000;
    int inside = 0;
    for (int k = 0; k < m; ++k) {
        const HPoint p = sample_psl2z_point(rng);
        EXPECT_TRUE(in_reduction_region(p, GroupKind::PSL2Z));
        inside += std::fabs(p.x) < 0.25;
    }
    EXPECT_NEAR(double(inside) / m, want, 4 * std::sqrt(want * (1 - want) / m));
}

TEST(Sampler, DirectionUniformChiSquare)
{
    Rng rng(32);
    const int bins = 20, m = 100000;
    std::vector<int> hist(bins, 0);
    for (int k = 0; k < m; ++k) {
        const double th = direction(sample_liouville(gamma2_reducer(), rng).frame);
        ++hist[std::min(bins - 1, static_cast<int>(th / (2 * kPi) * bins))];
    }
    double chi2 = 0;
    const double e = double(m) / bins;
    for (int c : hist)
        chi2 += (c - e) * (c - e) / e;
    EXPECT_LT(chi2, 36.19);  // chi-square(19) at the 0.01 level
}

TEST(Sampler, Gamma2SmallBallMass)
{
    const double r = 0.3;
    const double want = ball_area(r) / (2 * kPi);
    Rng rng(33);
    const int m = 200000;
    int hits = 0;
    for (int k = 0; k < m; ++k) {
        const QuotientState q = sample_liouville(gamma2_reducer(), rng);
        ASSERT_TRUE(in_reduction_region(q.point(), GroupKind::Gamma2));
        hits += dist(q.point(), kCenter) <= r;
    }
    EXPECT_NEAR(double(hits) / m, want, 4 * std::sqrt(want * (1 - want) / m));
}

TEST(Sampler, Deterministic)
{
    Rng a(77), b(77);
    for (int k = 0; k < 100; ++k) {
        const QuotientState x = sample_liouville(gamma2_reducer(), a);
        const QuotientState y = sample_liouville(gamma2_reducer(), b);
        EXPECT_EQ(x.frame.matrix().a, y.frame.matrix().a);
        EXPECT_EQ(x.frame.matrix().b, y.frame.matrix().b);
        EXPECT_EQ(x.frame.matrix().c, y.frame.matrix().c);
        EXPECT_EQ(x.frame.matrix().d, y.frame.matrix().d);
    }
}

TEST(MeasurePreservation, SmallBallAfterFlow)
{
    const double r = 0.3;
    const double want = ball_area(r) / (2 * kPi);
    Rng seeds(34);
    const int m = 4000;
    int hits = 0;
    for (int j = 0; j < m; ++j) {
        Rng rng(seeds.next());
        QuotientState q = sample_liouville(gamma2_reducer(), rng);
        for (int k = 0; k < 30; ++k)
            q = step(q, 1.0, gamma2_reducer());
        hits += quotient_dist(q, kCenter, gamma2_translates()) <= r;
    }
    EXPECT_NEAR(double(hits) / m, want, 4 * std::sqrt(want * (1 - want) / m));
}
