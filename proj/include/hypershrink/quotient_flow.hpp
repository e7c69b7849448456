#pragma once

// Discrete geodesic flow on V = Gamma \ H^2 for Gamma = PSL(2,Z) or Gamma(2).
//
// States carry a frame whose base point sits in the group's reduction region:
//   PSL(2,Z): the classical domain |x| <= 1/2, |z| >= 1.
//   Gamma(2): the Dirichlet domain centered at 2i, which is the ideal
//             quadrilateral |x| <= 1, |z - 1/2| >= 1/2, |z + 1/2| >= 1/2
//             with side pairings [[1,2],[0,1]] and [[1,0],[2,1]].

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "hyperbolic_core.hpp"
#include "modular_lattice.hpp"
#include "numeric.hpp"

namespace hypershrink {

inline constexpr double kDefaultTranslateRadius = 6.0;
inline constexpr std::int64_t kDefaultMaxMoves = 1'000'000;
inline constexpr std::uint32_t kDefaultRenormInterval = 64;
inline constexpr double kRegionSlack = 1e-9;
inline constexpr double kDescentTolerance = 1e-12;

inline HPoint dirichlet_center(GroupKind) noexcept { return {0.0, 2.0}; }

inline bool in_reduction_region(const HPoint& p, GroupKind kind) noexcept
{
    if (kind == GroupKind::PSL2Z)
        return std::fabs(p.x) <= 0.5 + kRegionSlack && std::hypot(p.x, p.y) >= 1.0 - kRegionSlack;
    return std::fabs(p.x) <= 1.0 + kRegionSlack && std::hypot(p.x - 0.5, p.y) >= 0.5 - kRegionSlack &&
           std::hypot(p.x + 0.5, p.y) >= 0.5 - kRegionSlack;
}

// Lattice elements of displacement <= radius with the images g(p0).
class TranslateSet {
public:
    TranslateSet() = default;

    static TranslateSet build(GroupKind kind, const HPoint& p0, double radius = kDefaultTranslateRadius)
    {
        require_valid(p0, "TranslateSet: base point");
        TranslateSet ts;
        ts.kind_ = kind;
        ts.p0_ = p0;
        ts.radius_ = radius;
        ts.elements_ = enumerate_ball(radius, kind, EnumerationOptions{std::max(radius, kDefaultEnumerationCap), 1});
        ts.matrices_.reserve(ts.elements_.size());
        ts.images_.reserve(ts.elements_.size());
        for (const auto& g : ts.elements_) {
            ts.matrices_.push_back(g.to_mat2());
            ts.images_.push_back(act(ts.matrices_.back(), p0));
        }
        return ts;
    }

    [[nodiscard]] bool empty() const noexcept { return elements_.empty(); }
    [[nodiscard]] GroupKind kind() const noexcept { return kind_; }
    [[nodiscard]] const HPoint& base() const noexcept { return p0_; }
    [[nodiscard]] double radius() const noexcept { return radius_; }
    [[nodiscard]] const std::vector<LatticeElement>& elements() const noexcept { return elements_; }
    [[nodiscard]] const std::vector<Mat2>& matrices() const noexcept { return matrices_; }
    [[nodiscard]] const std::vector<HPoint>& images() const noexcept { return images_; }

    // Index of the image nearest to z and the cosh(dist) - 1 to it.
    [[nodiscard]] std::pair<std::size_t, double> nearest(const HPoint& z) const noexcept
    {
        std::size_t best = 0;
        double best_u = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < images_.size(); ++k) {
            const double u = cosh_dist_m1(z, images_[k]);
            if (u < best_u) {
                best_u = u;
                best = k;
            }
        }
        return {best, best_u};
    }

private:
    GroupKind kind_ = GroupKind::Gamma2;
    HPoint p0_{};
    double radius_ = 0;
    std::vector<LatticeElement> elements_;
    std::vector<Mat2> matrices_;
    std::vector<HPoint> images_;
};

struct QuotientState {
    Frame frame;
    GroupKind group = GroupKind::Gamma2;
    std::int64_t word_length = 0;   // reduction moves applied since the start
    std::uint32_t steps_since_renorm = 0;

    [[nodiscard]] HPoint point() const noexcept { return basepoint(frame); }
};

struct ReductionOptions {
    std::int64_t max_moves = kDefaultMaxMoves;
    double det_tolerance = kDefaultDetTolerance;
};

// Integer word applied during one reduction. Tracked only on request; it is
// a test and diagnostics aid and can overflow for very deep starting points.
struct ReductionTrace {
    LatticeElement word = LatticeElement::identity();
    std::int64_t moves = 0;
    std::int64_t verification_moves = 0;
};

// Reduction into the group's fundamental domain. For Gamma(2) the optional
// verification set holds elements of displacement <= radius around the
// Dirichlet center; after generator descent, any of them that still brings
// the point closer to the center is applied and descent resumes.
class Reducer {
public:
    Reducer() = default;
    explicit Reducer(GroupKind kind, double verify_radius = kDefaultTranslateRadius, ReductionOptions opts = {})
        : kind_(kind), opts_(opts)
    {
        if (kind == GroupKind::Gamma2 && verify_radius > 0)
            verify_ = std::make_shared<const TranslateSet>(
                TranslateSet::build(kind, dirichlet_center(kind), verify_radius));
    }

    [[nodiscard]] GroupKind kind() const noexcept { return kind_; }
    [[nodiscard]] const ReductionOptions& options() const noexcept { return opts_; }

    QuotientState reduce(const Frame& f, ReductionTrace* trace = nullptr) const
    {
        const Mat2& m = f.matrix();
        if (!m.finite() || std::fabs(m.det() - 1.0) > opts_.det_tolerance)
            throw DomainError("reduce: invalid frame");
        QuotientState q{f, kind_, 0, 0};
        Mat2 g = m;
        std::int64_t moves = 0;
        if (kind_ == GroupKind::PSL2Z)
            reduce_psl2z(g, moves, trace);
        else
            reduce_gamma2(g, moves, trace);
        q.frame = Frame::unchecked(g);
        q.word_length = moves;
        return q;
    }

private:
    void bump(std::int64_t& moves) const
    {
        if (++moves > opts_.max_moves)
            throw CorruptionError("reduce: move budget exhausted");
    }

    static void record(ReductionTrace* trace, std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d,
                       bool verification = false)
    {
        if (!trace)
            return;
        trace->word = LatticeElement::make(a, b, c, d) * trace->word;
        ++trace->moves;
        if (verification)
            ++trace->verification_moves;
    }

    static void left_mul(Mat2& g, double a, double b, double c, double d) noexcept
    {
        g = Mat2{a, b, c, d} * g;
    }

    void reduce_psl2z(Mat2& g, std::int64_t& moves, ReductionTrace* trace) const
    {
        for (;;) {
            HPoint z = act(g, {0.0, 1.0});
            const double n = std::nearbyint(z.x);
            if (n != 0) {
                left_mul(g, 1, -n, 0, 1);
                record(trace, 1, -static_cast<std::int64_t>(n), 0, 1);
                bump(moves);
                z.x -= n;
            }
            if (z.x * z.x + z.y * z.y < 1.0) {
                left_mul(g, 0, -1, 1, 0);
                record(trace, 0, -1, 1, 0);
                bump(moves);
                continue;
            }
            return;
        }
    }

    void reduce_gamma2(Mat2& g, std::int64_t& moves, ReductionTrace* trace) const
    {
        const HPoint center = dirichlet_center(kind_);
        for (;;) {
            descend_gamma2(g, center, moves, trace);
            if (!verify_)
                return;
            const HPoint z = act(g, {0.0, 1.0});
            // d(gamma z, c) = d(z, gamma^{-1} c); the set is closed under inverses
            const auto [k, u] = verify_->nearest(z);
            const double here = dist_from_cosh_m1(cosh_dist_m1(z, center));
            if (dist_from_cosh_m1(u) >= here - kDescentTolerance)
                return;
            const LatticeElement inv = verify_->elements()[k].inverse();
            left_mul(g, static_cast<double>(inv.a()), static_cast<double>(inv.b()), static_cast<double>(inv.c()),
                     static_cast<double>(inv.d()));
            record(trace, inv.a(), inv.b(), inv.c(), inv.d(), true);
            bump(moves);
        }
    }

    // Greedy descent on d(z, center) over A^{+-1}, B^{+-1} and the parabolic
    // powers A^k, B^k that recentre the point in one move.
    void descend_gamma2(Mat2& g, const HPoint& center, std::int64_t& moves, ReductionTrace* trace) const
    {
        for (;;) {
            const HPoint z = act(g, {0.0, 1.0});
            const double here = dist_from_cosh_m1(cosh_dist_m1(z, center));

            // w = -1/z turns B into w -> w - 2
            const double zz = z.x * z.x + z.y * z.y;
            const double kA = -2.0 * std::nearbyint(0.5 * z.x);
            const double kB = 2.0 * std::nearbyint(-0.5 * z.x / zz);
            struct Move {
                double a, b, c, d;
            };
            const Move cands[] = {{1, kA, 0, 1}, {1, 0, kB, 1}, {1, 2, 0, 1}, {1, -2, 0, 1}, {1, 0, 2, 1}, {1, 0, -2, 1}};
            double best = here - kDescentTolerance;
            const Move* pick = nullptr;
            for (const Move& mv : cands) {
                if (mv.b == 0 && mv.c == 0)
                    continue;
                const double dd = dist_from_cosh_m1(cosh_dist_m1(act(Mat2{mv.a, mv.b, mv.c, mv.d}, z), center));
                if (dd < best) {
                    best = dd;
                    pick = &mv;
                }
            }
            if (!pick)
                return;
            left_mul(g, pick->a, pick->b, pick->c, pick->d);
            record(trace, 1, static_cast<std::int64_t>(pick->b), static_cast<std::int64_t>(pick->c), 1);
            bump(moves);
        }
    }

    GroupKind kind_ = GroupKind::Gamma2;
    ReductionOptions opts_{};
    std::shared_ptr<const TranslateSet> verify_;
};

// One step of the time-h map followed by reduction. Frames are renormalized
// every `renorm_interval` steps.
inline QuotientState step(const QuotientState& q, double h, const Reducer& reducer,
                          std::uint32_t renorm_interval = kDefaultRenormInterval)
{
    if (!(h >= 0) || h > 10.0)
        throw DomainError("step: h must lie in [0, 10]");
    if (h == 0)
        return q;
    Frame f = geodesic_step(q.frame, h);
    std::uint32_t since = q.steps_since_renorm + 1;
    if (renorm_interval > 0 && since >= renorm_interval) {
        f = renormalize(f);
        since = 0;
    }
    QuotientState out = reducer.reduce(f);
    out.word_length += q.word_length;
    out.steps_since_renorm = since;
    return out;
}

inline void require_translates(const TranslateSet& ts, const HPoint& p0)
{
    if (ts.empty())
        throw DependencyError("quotient_dist: translate set unavailable");
    if (!(ts.base() == p0))
        throw DependencyError("quotient_dist: translate set was built for a different base point");
}

// min over g in the translate set of dist(z, g p0). Equals the true quotient
// distance whenever the result is <= radius/2 and z is reduced.
inline double quotient_dist(const HPoint& z, const HPoint& p0, const TranslateSet& ts)
{
    require_translates(ts, p0);
    require_valid(z, "quotient_dist");
    return dist_from_cosh_m1(ts.nearest(z).second);
}

inline double quotient_dist(const QuotientState& q, const HPoint& p0, const TranslateSet& ts)
{
    return quotient_dist(q.point(), p0, ts);
}

// Distance between the projections of two points, over the set's elements.
inline double quotient_dist_between(const HPoint& z, const HPoint& w, const TranslateSet& ts)
{
    if (ts.empty())
        throw DependencyError("quotient_dist_between: translate set unavailable");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& m : ts.matrices())
        best = std::min(best, cosh_dist_m1(z, act(m, w)));
    return dist_from_cosh_m1(best);
}

struct InjectivityRadius {
    double value = 0;
    bool orbifold = false;       // p0 is fixed by a nontrivial element
    double min_displacement = 0; // min over nontrivial g of d(p0, g p0)
};

// Half the minimum displacement of p0 under nontrivial group elements.
inline InjectivityRadius injectivity_radius(const HPoint& p0, GroupKind kind, double cap = kDefaultEnumerationCap)
{
    require_valid(p0, "injectivity_radius");
    if (!in_reduction_region(p0, kind))
        throw DomainError("injectivity_radius: base point outside the reduction region");
    const double offset = 2.0 * dist(HPoint{0, 1}, p0);
    // d(i, g i) <= d(p0, g p0) + 2 d(i, p0), so searching radius offset + L
    // finds every displacement <= L
    for (double reach = 4.0;; reach *= 2) {
        const double radius = std::min(offset + reach, cap);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& g : enumerate_ball(radius, kind, {cap, 1})) {
            if (g.is_identity())
                continue;
            best = std::min(best, dist(p0, act(g.to_mat2(), p0)));
        }
        if (best <= reach || radius >= cap) {
            if (!std::isfinite(best))
                throw DependencyError("injectivity_radius: no nontrivial element within the enumeration cap");
            InjectivityRadius out;
            out.min_displacement = best;
            out.orbifold = best < 1e-12;
            out.value = out.orbifold ? 0.0 : 0.5 * best;
            return out;
        }
    }
}

// min(i_V / 4, 1, h)
inline double radius_R(double injectivity, double h) noexcept
{
    return std::min({injectivity / 4.0, 1.0, h});
}

// Initial direction at p of the geodesic towards q, in [0, 2pi).
inline double direction_towards(const HPoint& p, const HPoint& q)
{
    require_valid(p);
    require_valid(q);
    // move p to i by the affine map, then use the Cayley transform at i
    const double wx = (q.x - p.x) / p.y;
    const double wy = q.y / p.y;
    // zeta = (w - i) / (w + i)
    const double nr = wx, ni = wy - 1.0;
    const double dr = wx, di = wy + 1.0;
    const double zr = nr * dr + ni * di;
    const double zi = ni * dr - nr * di;
    return normalize_angle(std::atan2(zi, zr) + 0.5 * kPi);
}

// Area of the part of a radius-r disk beyond a geodesic at distance a from
// its center (zero when r <= a).
inline double disk_segment_area(double a, double r)
{
    if (!(a >= 0) || !(r >= 0))
        throw DomainError("disk_segment_area: negative arguments");
    if (r <= a)
        return 0.0;
    const double k = std::tanh(a);
    const double theta = std::acos(std::clamp(k / std::tanh(r), -1.0, 1.0));
    const double s = std::sin(theta) / std::sqrt(1.0 - k * k);
    return 2.0 * theta * std::cosh(r) - 2.0 * std::asin(std::clamp(s, -1.0, 1.0));
}

// Liouville (area) measure of the quotient ball B(p0, r) in V, as a
// probability. When r exceeds the injectivity radius the disk laps over
// itself; the laps are the segments beyond the bisectors with nearby
// translates, handled while those segments stay pairwise disjoint.
inline double quotient_ball_measure(const HPoint& p0, double r, const TranslateSet& ts, double covolume)
{
    require_translates(ts, p0);
    if (!(r >= 0))
        throw DomainError("quotient_ball_measure: negative radius");
    if (2.0 * r > ts.radius())
        throw DomainError("quotient_ball_measure: radius too large for the translate set");
    struct Lap {
        double center_angle, half_width;
    };
    std::vector<Lap> laps;
    double area = ball_area(r);
    for (const HPoint& img : ts.images()) {
        const double d = dist(p0, img);
        if (d < 1e-12 || d >= 2.0 * r)
            continue;
        const double a = 0.5 * d;
        area -= disk_segment_area(a, r);
        laps.push_back({direction_towards(p0, img), std::acos(std::tanh(a) / std::tanh(r))});
    }
    for (std::size_t i = 0; i < laps.size(); ++i)
        for (std::size_t j = i + 1; j < laps.size(); ++j)
            if (std::fabs(angle_difference(laps[i].center_angle, laps[j].center_angle)) <
                laps[i].half_width + laps[j].half_width)
                throw DomainError("quotient_ball_measure: self-overlaps of the ball intersect; radius too large");
    return area / covolume;
}

struct SamplerConfig {
    std::uint64_t seed = 0;
    GroupKind group = GroupKind::Gamma2;
};

// PSL(2,Z) cosets of Gamma(2): I, T, S, TS, ST, TST.
inline const std::array<Mat2, 6>& gamma2_coset_representatives() noexcept
{
    static const std::array<Mat2, 6> reps{Mat2{1, 0, 0, 1},  Mat2{1, 1, 0, 1},  Mat2{0, -1, 1, 0},
                                          Mat2{1, -1, 1, 0}, Mat2{0, -1, 1, 1}, Mat2{1, 0, 1, 1}};
    return reps;
}

// Uniform point of the PSL(2,Z) domain for hyperbolic area: x = sin(phi)
// with phi uniform on [-pi/6, pi/6] (the x-marginal is proportional to
// 1/sqrt(1 - x^2)), then y = sqrt(1 - x^2) / (1 - u) from the y^-2 density.
inline HPoint sample_psl2z_point(Rng& rng) noexcept
{
    const double phi = rng.uniform(-kPi / 6.0, kPi / 6.0);
    const double x = std::sin(phi);
    const double y = std::sqrt(1.0 - x * x) / (1.0 - rng.uniform());
    return {x, y};
}

// Liouville-distributed state: area-uniform position, uniform direction.
inline QuotientState sample_liouville(const Reducer& reducer, Rng& rng)
{
    const HPoint p = sample_psl2z_point(rng);
    const double theta = rng.uniform(0.0, 2.0 * kPi);
    Frame f = frame_from(p, theta);
    if (reducer.kind() == GroupKind::PSL2Z)
        return reducer.reduce(f);
    const Mat2& rep = gamma2_coset_representatives()[rng.below(6)];
    const QuotientState q = reducer.reduce(Frame::unchecked(rep * f.matrix()));
    return {q.frame, q.group, 0, 0};
}

} // namespace hypershrink
