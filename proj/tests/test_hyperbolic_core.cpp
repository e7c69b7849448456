#include <gtest/gtest.h>

#include <cmath>

#include <hypershrink/hyperbolic_core.hpp>
#include <hypershrink/numeric.hpp>

#include "oracles.hpp"

using namespace hypershrink;

namespace {

HPoint random_point(Rng& rng)
{
    return {rng.uniform(-5.0, 5.0), std::exp(rng.uniform(-4.0, 4.0))};
}

Mobius random_isometry(Rng& rng)
{
    // product of a translation, a dilation and a rotation about i
    const double t = rng.uniform(-3.0, 3.0), s = std::exp(rng.uniform(-2.0, 2.0) / 2);
    const double phi = rng.uniform(0.0, kPi);
    const Mat2 tr{1, t, 0, 1}, dil{s, 0, 0, 1 / s}, rot{std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi)};
    return Mobius(tr * dil * rot);
}

} // namespace

TEST(Dist, AlongImaginaryAxis) { EXPECT_NEAR(dist({0, 1}, {0, 2}), std::log(2.0), 1e-15); }

TEST(Dist, IdentityCase)
{
    const HPoint p{0.3, 1.7};
    EXPECT_EQ(dist(p, p), 0.0);
}

TEST(Dist, HorizontalUnitStep) { EXPECT_NEAR(dist({0, 1}, {1, 1}), std::acosh(1.5), 1e-15); }

TEST(Dist, NonFiniteInputIsDomainError)
{
    EXPECT_THROW(dist({NAN, 1}, {0, 1}), DomainError);
    EXPECT_THROW(dist({0, 1}, {0, INFINITY}), DomainError);
    EXPECT_THROW(dist({0, -1}, {0, 1}), DomainError);
    EXPECT_THROW(dist({0, 0}, {0, 1}), DomainError);
}

TEST(Dist, MatchesAcoshFormOracle)
{
    Rng rng(11);
    for (int k = 0; k < 10000; ++k) {
        const HPoint p = random_point(rng), q = random_point(rng);
        const double d = oracle::dist(p, q);
        EXPECT_NEAR(dist(p, q), d, 1e-9 * std::max(1.0, d));
    }
}

TEST(Dist, MetricAxioms)
{
    Rng rng(12);
    for (int k = 0; k < 10000; ++k) {
        const HPoint p = random_point(rng), q = random_point(rng), r = random_point(rng);
        EXPECT_EQ(dist(p, q), dist(q, p));
        EXPECT_LE(dist(p, r), dist(p, q) + dist(q, r) + 1e-9);
        EXPECT_GE(dist(p, q), 0.0);
    }
}

TEST(Apply, IdentityTranslationAndS)
{
    const HPoint p{0.25, 3.5};
    const HPoint q = apply(Mobius(Mat2{1, 0, 0, 1}), p);
    EXPECT_EQ(q.x, p.x);
    EXPECT_EQ(q.y, p.y);
    const HPoint t = apply(Mobius::translation(1), {0, 1});
    EXPECT_DOUBLE_EQ(t.x, 1);
    EXPECT_DOUBLE_EQ(t.y, 1);
    const HPoint s = apply(Mobius(Mat2{0, -1, 1, 0}), {0, 1});
    EXPECT_NEAR(s.x, 0, 1e-16);
    EXPECT_DOUBLE_EQ(s.y, 1);
}

TEST(Apply, MatchesComplexArithmeticOracle)
{
    Rng rng(13);
    for (int k = 0; k < 1000; ++k) {
        const Mobius g = random_isometry(rng);
        const HPoint p = random_point(rng);
        const Mat2& m = g.matrix();
        const HPoint want = oracle::act(m.a, m.b, m.c, m.d, p);
        const HPoint got = apply(g, p);
        EXPECT_NEAR(got.x, want.x, 1e-9 * (1 + std::fabs(want.x)));
        EXPECT_NEAR(got.y, want.y, 1e-9 * want.y);
    }
}

TEST(Apply, IsometryInvariance)
{
    Rng rng(14);
    for (int k = 0; k < 10000; ++k) {
        const Mobius g = random_isometry(rng);
        const HPoint p = random_point(rng), q = random_point(rng);
        const double d = dist(p, q);
        EXPECT_NEAR(dist(apply(g, p), apply(g, q)), d, 1e-9 * std::max(1.0, d));
    }
}

TEST(Mobius, RejectsBadDeterminant)
{
    EXPECT_THROW(Mobius(Mat2{2, 0, 0, 1}), DomainError);
    EXPECT_THROW(Mobius(Mat2{NAN, 0, 0, 1}), DomainError);
    EXPECT_NO_THROW(Mobius(Mat2{1 + 1e-10, 0, 0, 1}));
}

TEST(Frame, FromIPointingUpIsIdentity)
{
    const Mat2 m = frame_from({0, 1}, kPi / 2).matrix();
    EXPECT_NEAR(m.a, 1, 1e-15);
    EXPECT_NEAR(m.b, 0, 1e-15);
    EXPECT_NEAR(m.c, 0, 1e-15);
    EXPECT_NEAR(m.d, 1, 1e-15);
    const HPoint b = basepoint(Frame(Mat2{1, 0, 0, 1}));
    EXPECT_EQ(b.x, 0);
    EXPECT_EQ(b.y, 1);
}

TEST(Frame, RoundTrip)
{
    Rng rng(15);
    double worst = 0;
    for (int k = 0; k < 10000; ++k) {
        const HPoint p = random_point(rng);
        const double theta = rng.uniform(0.0, 2 * kPi);
        const Frame f = frame_from(p, theta);
        const HPoint b = basepoint(f);
        worst = std::max({worst, std::fabs(b.x - p.x), std::fabs(b.y - p.y) / p.y,
                          std::fabs(angle_difference(direction(f), theta))});
    }
    EXPECT_LT(worst, 1e-9);
}

TEST(Frame, RejectsDrift)
{
    EXPECT_THROW(Frame(Mat2{1.001, 0, 0, 1}), DomainError);
    EXPECT_NO_THROW(Frame(Mat2{1, 0, 0, 1 + 1e-10}));
}

TEST(GeodesicStep, VerticalGeodesic)
{
    const Frame id(Mat2{1, 0, 0, 1});
    for (double t : {0.5, 1.0, 3.0, 10.0}) {
        const HPoint p = basepoint(geodesic_step(id, t));
        EXPECT_NEAR(p.x, 0, 1e-12);
        EXPECT_NEAR(p.y, std::exp(t), 1e-12 * std::exp(t));
        EXPECT_NEAR(dist({0, 1}, p), t, 1e-12);
    }
}

TEST(GeodesicStep, ZeroIsIdentity)
{
    const Frame f = frame_from({0.4, 2.0}, 1.0);
    const Mat2 g = geodesic_step(f, 0).matrix();
    EXPECT_EQ(g.a, f.matrix().a);
    EXPECT_EQ(g.b, f.matrix().b);
    EXPECT_EQ(g.c, f.matrix().c);
    EXPECT_EQ(g.d, f.matrix().d);
}

TEST(GeodesicStep, UnitSpeedAndAdditivity)
{
    Rng rng(16);
    for (int k = 0; k < 10000; ++k) {
        const Frame f = frame_from(random_point(rng), rng.uniform(0.0, 2 * kPi));
        const double a = rng.uniform(-5.0, 5.0), b = rng.uniform(-5.0, 5.0);
        EXPECT_NEAR(dist(basepoint(f), basepoint(geodesic_step(f, a))), std::fabs(a), 1e-8);
        const HPoint two = basepoint(geodesic_step(geodesic_step(f, a), b));
        const HPoint one = basepoint(geodesic_step(f, a + b));
        EXPECT_LT(dist(two, one), 1e-8);
    }
}

TEST(GeodesicStep, DirectionIsPreservedAlongGeodesic)
{
    // moving forward from p at angle theta then back lands at p
    const Frame f = frame_from({1.5, 0.7}, 2.2);
    const HPoint back = basepoint(geodesic_step(geodesic_step(f, 4.0), -4.0));
    EXPECT_LT(dist(back, {1.5, 0.7}), 1e-10);
}

TEST(GeodesicStep, CapIsRangeError)
{
    const Frame f(Mat2{1, 0, 0, 1});
    EXPECT_THROW(geodesic_step(f, 101), RangeError);
    EXPECT_THROW(geodesic_step(f, -101), RangeError);
    EXPECT_THROW(geodesic_step(f, NAN), DomainError);
    EXPECT_NO_THROW(geodesic_step(f, 100));
}

TEST(Renormalize, RestoresUnitDeterminant)
{
    const double s = std::sqrt(1 + 1e-7);
    const Frame drifted = Frame::unchecked(Mat2{2 * s, 0.5 * s, 1 * s, 0.75 * s});
    const Frame r = renormalize(drifted);
    EXPECT_NEAR(r.matrix().det(), 1.0, 1e-15);
    const Frame id = renormalize(Frame(Mat2{1, 0, 0, 1}));
    EXPECT_EQ(id.matrix().a, 1);
    EXPECT_EQ(id.matrix().d, 1);
}

TEST(Renormalize, BasepointStable)
{
    Rng rng(17);
    for (int k = 0; k < 10000; ++k) {
        const Frame f = frame_from(random_point(rng), rng.uniform(0.0, 2 * kPi));
        const double s = 1 + rng.uniform(-1e-7, 1e-7);
        const Mat2& m = f.matrix();
        const Frame drifted = Frame::unchecked(Mat2{m.a * s, m.b * s, m.c * s, m.d * s});
        const HPoint p = basepoint(f), q = basepoint(renormalize(drifted));
        EXPECT_LT(std::fabs(p.x - q.x), 1e-12 * (1 + std::fabs(p.x)));
        EXPECT_LT(std::fabs(p.y - q.y), 1e-12 * p.y);
    }
}

TEST(Renormalize, NonPositiveDeterminantIsCorruption)
{
    EXPECT_THROW(renormalize(Frame::unchecked(Mat2{0, 1, 1, 0})), CorruptionError);
    EXPECT_THROW(renormalize(Frame::unchecked(Mat2{0, 0, 0, 0})), CorruptionError);
}

TEST(BallArea, ZeroAndEuclideanLimit)
{
    EXPECT_EQ(ball_area(0), 0.0);
    const double r = 1e-3;
    EXPECT_NEAR(ball_area(r) / (kPi * r * r), 1.0, 1e-5);
    EXPECT_NEAR(ball_area(1.0), 2 * kPi * (std::cosh(1.0) - 1), 1e-14);
    EXPECT_THROW(ball_area(-0.1), DomainError);
}

TEST(BallArea, BelowVolumeBound)
{
    for (double t = 1; t <= 20; t += 0.25)
        EXPECT_LE(ball_area(t), volume_bound(2, t));
}

TEST(BallArea, StrictlyIncreasingAndConvex)
{
    double prev = ball_area(0.01), prev_slope = -1;
    for (double r = 0.02; r < 20; r += 0.01) {
        const double a = ball_area(r);
        EXPECT_GT(a, prev);
        const double slope = a - prev;
        EXPECT_GT(slope, prev_slope);
        prev = a;
        prev_slope = slope;
    }
}

TEST(VolumeBound, Shape)
{
    EXPECT_NEAR(volume_bound(2, 3.0), kPi * std::exp(3.0), 1e-12);
    EXPECT_NEAR(volume_bound(3, 2.0, 2.0), 2.0 * std::exp(4.0), 1e-12);
    EXPECT_THROW(volume_bound(1, 1.0), DomainError);
    EXPECT_THROW(volume_bound(2, -1.0), DomainError);
}

TEST(CompensatedSum, RecoversLostLowBits)
{
    CompensatedSum s;
    s += 1e16;
    for (int k = 0; k < 1000; ++k)
        s += 1.0;
    s += -1e16;
    EXPECT_EQ(s.value(), 1000.0);
}

TEST(Rng, DeterministicAndInRange)
{
    Rng a(99), b(99);
    for (int k = 0; k < 1000; ++k) {
        const double u = a.uniform();
        EXPECT_EQ(u, b.uniform());
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
    Rng c(5);
    for (int k = 0; k < 1000; ++k)
        EXPECT_LT(c.below(6), 6u);
}
