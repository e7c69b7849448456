#pragma once

// Geometry of the upper half-plane H^2 with curvature -1.
//
// A unit tangent vector is stored as a matrix g in SL(2,R): its base point
// is g(i) and its direction is the image under dg of the upward vector at i.
// The geodesic flow is then right multiplication by diag(e^{t/2}, e^{-t/2})
// and isometries act by left multiplication, so one representation serves
// geometry, flow and the lattice action.
//
// Everything is double precision. Quotient work stays inside the envelope
// y in [1e-12, 1e12]; outside it det drift and cancellation dominate.

#include <cmath>
#include <iosfwd>
#include <ostream>

#include "errors.hpp"
#include "numeric.hpp"

namespace hypershrink {

inline constexpr double kDefaultDetTolerance = 1e-9;
inline constexpr double kDefaultFlowCap = 100.0;

struct Mat2 {
    double a = 1, b = 0, c = 0, d = 1;

    [[nodiscard]] constexpr double det() const noexcept { return a * d - b * c; }

    friend constexpr Mat2 operator*(const Mat2& l, const Mat2& r) noexcept
    {
        return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d,
                l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
    }
    friend constexpr bool operator==(const Mat2&, const Mat2&) = default;

    [[nodiscard]] bool finite() const noexcept
    {
        return std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d);
    }
    // inverse of a det-1 matrix
    [[nodiscard]] constexpr Mat2 inverse_unimodular() const noexcept { return {d, -b, -c, a}; }
};

inline std::ostream& operator<<(std::ostream& os, const Mat2& m)
{
    return os << "[[" << m.a << ", " << m.b << "], [" << m.c << ", " << m.d << "]]";
}

struct HPoint {
    double x = 0;
    double y = 1;

    [[nodiscard]] bool valid() const noexcept
    {
        return std::isfinite(x) && std::isfinite(y) && y > 0;
    }
    friend constexpr bool operator==(const HPoint&, const HPoint&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const HPoint& p)
{
    return os << "(" << p.x << ", " << p.y << ")";
}

inline void require_valid(const HPoint& p, const char* what = "point")
{
    if (!p.valid())
        throw DomainError(std::string(what) + " is not a finite point of the upper half-plane");
}

// cosh(dist(p, q)) - 1, without validation. Monotone in the distance, so
// nearest-point searches compare this instead of paying for acosh.
inline double cosh_dist_m1(const HPoint& p, const HPoint& q) noexcept
{
    const double dx = p.x - q.x;
    const double dy = p.y - q.y;
    return (dx * dx + dy * dy) / (2.0 * p.y * q.y);
}

// Distance from a cosh_dist_m1 value; asinh form keeps small distances accurate.
inline double dist_from_cosh_m1(double u) noexcept
{
    return 2.0 * std::asinh(std::sqrt(0.5 * u));
}

inline double dist(const HPoint& p, const HPoint& q)
{
    require_valid(p, "dist: first argument");
    require_valid(q, "dist: second argument");
    return dist_from_cosh_m1(cosh_dist_m1(p, q));
}

// Fractional-linear action of a det-1 matrix. No validation; callers on
// hot paths guarantee det = 1 and a valid point.
inline HPoint act(const Mat2& g, const HPoint& p) noexcept
{
    const double re = g.c * p.x + g.d;
    const double im = g.c * p.y;
    const double n = re * re + im * im;
    return {((g.a * p.x + g.b) * re + g.a * g.c * p.y * p.y) / n, p.y / n};
}

// Orientation-preserving isometry of H^2.
class Mobius {
public:
    Mobius() = default;
    explicit Mobius(const Mat2& m, double det_tolerance = kDefaultDetTolerance) : m_(m)
    {
        if (!m.finite() || std::fabs(m.det() - 1.0) > det_tolerance)
            throw DomainError("Mobius: matrix must be finite with det 1");
    }

    static Mobius translation(double t) { return Mobius(Mat2{1, t, 0, 1}); }

    [[nodiscard]] const Mat2& matrix() const noexcept { return m_; }
    [[nodiscard]] Mobius inverse() const noexcept { return unchecked(m_.inverse_unimodular()); }

    friend Mobius operator*(const Mobius& l, const Mobius& r) noexcept
    {
        return unchecked(l.m_ * r.m_);
    }

private:
    static Mobius unchecked(const Mat2& m) noexcept
    {
        Mobius g;
        g.m_ = m;
        return g;
    }
    Mat2 m_{};
};

inline HPoint apply(const Mobius& g, const HPoint& p)
{
    require_valid(p, "apply");
    const HPoint q = act(g.matrix(), p);
    if (!q.valid())
        throw DomainError("apply: image left the upper half-plane");
    return q;
}

// Unit tangent vector on H^2.
class Frame {
public:
    Frame() = default;
    explicit Frame(const Mat2& m, double det_tolerance = kDefaultDetTolerance) : m_(m)
    {
        if (!m.finite())
            throw DomainError("Frame: non-finite entries");
        if (std::fabs(m.det() - 1.0) > det_tolerance)
            throw DomainError("Frame: det differs from 1 beyond tolerance");
    }

    // Skips validation. For internal products of frames that are already valid.
    static Frame unchecked(const Mat2& m) noexcept
    {
        Frame f;
        f.m_ = m;
        return f;
    }

    [[nodiscard]] const Mat2& matrix() const noexcept { return m_; }

    friend bool operator==(const Frame&, const Frame&) = default;

private:
    Mat2 m_{};
};

// Isometry acting on a frame: left multiplication.
inline Frame operator*(const Mobius& g, const Frame& f) noexcept
{
    return Frame::unchecked(g.matrix() * f.matrix());
}

inline HPoint basepoint(const Frame& f) noexcept
{
    return act(f.matrix(), HPoint{0.0, 1.0});
}

inline double normalize_angle(double theta) noexcept
{
    double t = std::fmod(theta, 2 * kPi);
    if (t < 0)
        t += 2 * kPi;
    if (t >= 2 * kPi)
        t = 0;
    return t;
}

// Signed difference a - b reduced to (-pi, pi].
inline double angle_difference(double a, double b) noexcept
{
    double d = std::remainder(a - b, 2 * kPi);
    return d == -kPi ? kPi : d;
}

// Direction in [0, 2pi), measured from the positive real axis.
inline double direction(const Frame& f) noexcept
{
    const Mat2& m = f.matrix();
    return normalize_angle(0.5 * kPi - 2.0 * std::atan2(m.c, m.d));
}

// Frame at p pointing at angle theta. frame_from({0,1}, pi/2) is the identity.
inline Frame frame_from(const HPoint& p, double theta)
{
    require_valid(p, "frame_from");
    if (!std::isfinite(theta))
        throw DomainError("frame_from: non-finite angle");
    const double s = std::sqrt(p.y);
    const double phi = 0.5 * (0.5 * kPi - theta);
    const double cp = std::cos(phi);
    const double sp = std::sin(phi);
    // [[s, x/s], [0, 1/s]] * [[cos, -sin], [sin, cos]]
    return Frame::unchecked(Mat2{s * cp + p.x / s * sp, -s * sp + p.x / s * cp, sp / s, cp / s});
}

inline Mat2 flow_matrix(double t) noexcept
{
    const double e = std::exp(0.5 * t);
    return {e, 0, 0, 1.0 / e};
}

// Time-t geodesic flow.
inline Frame geodesic_step(const Frame& f, double t, double cap = kDefaultFlowCap)
{
    if (!std::isfinite(t))
        throw DomainError("geodesic_step: non-finite time");
    if (std::fabs(t) > cap)
        throw RangeError("geodesic_step: |t| exceeds the configured flow cap");
    const Mat2& m = f.matrix();
    const double e = std::exp(0.5 * t);
    const double ie = 1.0 / e;
    return Frame::unchecked(Mat2{m.a * e, m.b * ie, m.c * e, m.d * ie});
}

// Rescale so det = 1 to machine precision. The Mobius action is invariant
// under scaling, so the base point does not move.
inline Frame renormalize(const Frame& f)
{
    const Mat2& m = f.matrix();
    const double det = m.det();
    if (!(det > 0) || !std::isfinite(det))
        throw CorruptionError("renormalize: frame determinant is not positive");
    const double s = 1.0 / std::sqrt(det);
    return Frame::unchecked(Mat2{m.a * s, m.b * s, m.c * s, m.d * s});
}

// Area of a hyperbolic disk of radius r: 2 pi (cosh r - 1).
inline double ball_area(double r)
{
    if (!(r >= 0) || !std::isfinite(r))
        throw DomainError("ball_area: radius must be finite and non-negative");
    const double s = std::sinh(0.5 * r);
    return 4.0 * kPi * s * s;
}

// c3 e^{(n-1) t}: the growth envelope for ball volumes in H^n.
inline double volume_bound(int n, double t, double c3 = kPi)
{
    if (n < 2)
        throw DomainError("volume_bound: dimension must be at least 2");
    if (!(t >= 0) || !std::isfinite(t))
        throw DomainError("volume_bound: t must be finite and non-negative");
    return c3 * std::exp((n - 1) * t);
}

} // namespace hypershrink
