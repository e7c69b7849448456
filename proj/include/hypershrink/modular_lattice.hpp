#pragma once

// Exact enumeration and counting of PSL(2,Z) and Gamma(2) by displacement of
// the base point i.
//
// For gamma = [[a, b], [c, d]] in SL(2,Z), cosh d(i, gamma i) equals
// (a^2 + b^2 + c^2 + d^2) / 2, so "displacement <= t" is an integer test on
// the norm. All counting goes through that integer norm: max_norm_for(t) is
// the largest norm whose displacement is <= t, which makes every count,
// shell and partition identity exact.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "hyperbolic_core.hpp"
#include "numeric.hpp"

namespace hypershrink {

inline constexpr double kDefaultEnumerationCap = 16.0;

enum class GroupKind { PSL2Z, Gamma2 };

inline std::string_view to_string(GroupKind k) noexcept
{
    return k == GroupKind::PSL2Z ? "psl2z" : "gamma2";
}

inline GroupKind parse_group(std::string_view s)
{
    if (s == "psl2z")
        return GroupKind::PSL2Z;
    if (s == "gamma2")
        return GroupKind::Gamma2;
    throw InputError("unknown group '" + std::string(s) + "' (expected psl2z or gamma2)");
}

// Element of PSL(2,Z), stored with the first nonzero of (a, b, c, d) positive.
class LatticeElement {
public:
    constexpr LatticeElement() = default;

    static LatticeElement make(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d)
    {
        const __int128 det = static_cast<__int128>(a) * d - static_cast<__int128>(b) * c;
        if (det != 1)
            throw DomainError("LatticeElement: determinant must be 1");
        LatticeElement e;
        e.a_ = a;
        e.b_ = b;
        e.c_ = c;
        e.d_ = d;
        e.canonicalize();
        return e;
    }

    static constexpr LatticeElement identity() noexcept { return {}; }

    [[nodiscard]] constexpr std::int64_t a() const noexcept { return a_; }
    [[nodiscard]] constexpr std::int64_t b() const noexcept { return b_; }
    [[nodiscard]] constexpr std::int64_t c() const noexcept { return c_; }
    [[nodiscard]] constexpr std::int64_t d() const noexcept { return d_; }

    [[nodiscard]] bool is_identity() const noexcept { return *this == identity(); }

    // a^2 + b^2 + c^2 + d^2
    [[nodiscard]] std::int64_t norm() const
    {
        const __int128 n = sq(a_) + sq(b_) + sq(c_) + sq(d_);
        if (n > std::numeric_limits<std::int64_t>::max())
            throw RangeError("LatticeElement: norm overflows 64 bits");
        return static_cast<std::int64_t>(n);
    }

    [[nodiscard]] Mat2 to_mat2() const noexcept
    {
        return {static_cast<double>(a_), static_cast<double>(b_), static_cast<double>(c_),
                static_cast<double>(d_)};
    }
    [[nodiscard]] Mobius to_mobius() const { return Mobius(to_mat2()); }

    [[nodiscard]] LatticeElement inverse() const { return make(d_, -b_, -c_, a_); }

    friend LatticeElement operator*(const LatticeElement& l, const LatticeElement& r)
    {
        return make(checked(static_cast<__int128>(l.a_) * r.a_ + static_cast<__int128>(l.b_) * r.c_),
                    checked(static_cast<__int128>(l.a_) * r.b_ + static_cast<__int128>(l.b_) * r.d_),
                    checked(static_cast<__int128>(l.c_) * r.a_ + static_cast<__int128>(l.d_) * r.c_),
                    checked(static_cast<__int128>(l.c_) * r.b_ + static_cast<__int128>(l.d_) * r.d_));
    }

    friend constexpr bool operator==(const LatticeElement&, const LatticeElement&) = default;
    friend constexpr auto operator<=>(const LatticeElement&, const LatticeElement&) = default;

private:
    static constexpr __int128 sq(std::int64_t v) noexcept { return static_cast<__int128>(v) * v; }
    static std::int64_t checked(__int128 v)
    {
        if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
            throw RangeError("LatticeElement: product overflows 64 bits");
        return static_cast<std::int64_t>(v);
    }
    void canonicalize() noexcept
    {
        const std::int64_t lead = a_ != 0 ? a_ : b_ != 0 ? b_ : c_ != 0 ? c_ : d_;
        if (lead < 0) {
            a_ = -a_;
            b_ = -b_;
            c_ = -c_;
            d_ = -d_;
        }
    }

    std::int64_t a_ = 1, b_ = 0, c_ = 0, d_ = 1;
};

inline std::ostream& operator<<(std::ostream& os, const LatticeElement& g)
{
    return os << "[[" << g.a() << ", " << g.b() << "], [" << g.c() << ", " << g.d() << "]]";
}

inline bool satisfies_congruence(GroupKind kind, const LatticeElement& g) noexcept
{
    if (kind == GroupKind::PSL2Z)
        return true;
    // Gamma(2): identity mod 2 (sign is irrelevant mod 2)
    return (g.a() & 1) == 1 && (g.d() & 1) == 1 && (g.b() & 1) == 0 && (g.c() & 1) == 0;
}

struct GroupSpec {
    GroupKind kind = GroupKind::Gamma2;
    std::vector<LatticeElement> generators;

    static GroupSpec psl2z()
    {
        return {GroupKind::PSL2Z, {LatticeElement::make(0, -1, 1, 0), LatticeElement::make(1, 1, 0, 1)}};
    }
    static GroupSpec gamma2()
    {
        return {GroupKind::Gamma2, {LatticeElement::make(1, 2, 0, 1), LatticeElement::make(1, 0, 2, 1)}};
    }
    static GroupSpec of(GroupKind k) { return k == GroupKind::PSL2Z ? psl2z() : gamma2(); }

    void validate() const
    {
        if (generators.empty())
            throw InputError("GroupSpec: empty generator list");
        for (const auto& g : generators)
            if (!satisfies_congruence(kind, g))
                throw InputError("GroupSpec: generator violates the group's congruence condition");
    }

    // Hyperbolic area of the quotient surface.
    [[nodiscard]] double covolume() const noexcept
    {
        return kind == GroupKind::PSL2Z ? kPi / 3.0 : 2.0 * kPi;
    }
};

// Displacement of an element with the given norm: arccosh(norm / 2).
inline double displacement_of_norm(std::int64_t norm) noexcept
{
    return std::acosh(static_cast<double>(norm) * 0.5);
}

inline double displacement(const LatticeElement& g) { return displacement_of_norm(g.norm()); }

// Largest integer norm n with displacement_of_norm(n) <= t. Returns 1 (no
// element qualifies) for t < 0.
inline std::int64_t max_norm_for(double t)
{
    if (std::isnan(t))
        throw DomainError("max_norm_for: NaN threshold");
    if (t < 0)
        return 1;
    // 2 cosh(44) is about 1.3e19, past int64
    if (t > 43.0)
        throw RangeError("max_norm_for: threshold overflows 64-bit norms");
    auto n = static_cast<std::int64_t>(std::floor(2.0 * std::cosh(t)));
    while (displacement_of_norm(n + 1) <= t)
        ++n;
    while (n > 2 && displacement_of_norm(n) > t)
        --n;
    return n;
}

namespace detail {

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) noexcept
{
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

// x, y with u x + v y = gcd(u, v) >= 0
inline std::int64_t ext_gcd(std::int64_t u, std::int64_t v, std::int64_t& x, std::int64_t& y) noexcept
{
    std::int64_t x0 = 1, y0 = 0, x1 = 0, y1 = 1;
    while (v != 0) {
        const std::int64_t q = u / v;
        std::tie(u, v) = std::pair{v, u - q * v};
        std::tie(x0, x1) = std::pair{x1, x0 - q * x1};
        std::tie(y0, y1) = std::pair{y1, y0 - q * y1};
    }
    if (u < 0) {
        u = -u;
        x0 = -x0;
        y0 = -y0;
    }
    x = x0;
    y = y0;
    return u;
}

inline unsigned resolve_threads(unsigned threads) noexcept
{
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    return threads;
}

// Visits every canonical element with bottom row (c, d), c in a stripe, and
// norm <= max_norm. Bottom rows are taken with c > 0, or c = 0 and d = 1,
// which picks exactly one of +-gamma.
template <class Visit>
void visit_bottom_row(std::int64_t c, std::int64_t max_norm, GroupKind kind, Visit&& visit)
{
    const std::int64_t c2 = c * c;
    if (c2 + 1 > max_norm)
        return;
    std::int64_t dmax = static_cast<std::int64_t>(std::sqrt(static_cast<double>(max_norm - c2)));
    while (c2 + (dmax + 1) * (dmax + 1) <= max_norm)
        ++dmax;
    while (dmax > 0 && c2 + dmax * dmax > max_norm)
        --dmax;

    const std::int64_t dlo = c == 0 ? 1 : -dmax;
    const std::int64_t dhi = c == 0 ? 1 : dmax;
    for (std::int64_t d = dlo; d <= dhi; ++d) {
        if (kind == GroupKind::Gamma2 && ((c & 1) != 0 || (d & 1) == 0))
            continue;
        std::int64_t x = 0, y = 0;
        if (ext_gcd(d, c, x, y) != 1)
            continue;
        // a0 d - b0 c = 1
        std::int64_t a0 = x, b0 = -y;
        const std::int64_t s = c2 + d * d;
        // shift (a0, b0) by the integer nearest the vertex of the norm parabola
        const std::int64_t p0 = a0 * c + b0 * d;
        const std::int64_t kc = floor_div(s - 2 * p0, 2 * s);
        a0 += kc * c;
        b0 += kc * d;
        const std::int64_t budget = max_norm - s;
        auto emit = [&](std::int64_t k) {
            const std::int64_t a = a0 + k * c;
            const std::int64_t b = b0 + k * d;
            if (a * a + b * b > budget)
                return false;
            const LatticeElement g = LatticeElement::make(a, b, c, d);
            if (satisfies_congruence(kind, g))
                visit(g);
            return true;
        };
        // the admissible k form an interval around the vertex
        if (!emit(0))
            continue;
        for (std::int64_t k = 1; emit(k); ++k) {
        }
        for (std::int64_t k = -1; emit(k); --k) {
        }
    }
}

} // namespace detail

struct EnumerationOptions {
    double cap = kDefaultEnumerationCap;
    unsigned threads = 1;
};

// Calls visit(worker, element) for every canonical element of the group with
// displacement <= t_max. Work is split over stripes c = worker (mod threads);
// the visited set does not depend on the partition.
template <class Visit>
void for_each_in_ball(double t_max, GroupKind kind, Visit&& visit, EnumerationOptions opts = {})
{
    if (std::isnan(t_max))
        throw DomainError("enumerate_ball: NaN radius");
    if (t_max > opts.cap)
        throw RangeError("enumerate_ball: t_max exceeds the enumeration cap");
    if (t_max < 0)
        return;
    const std::int64_t max_norm = max_norm_for(t_max);
    const auto cmax = static_cast<std::int64_t>(std::sqrt(static_cast<double>(max_norm))) + 1;
    const unsigned threads = detail::resolve_threads(opts.threads);

    auto stripe = [&](unsigned worker) {
        for (std::int64_t c = worker; c <= cmax; c += threads)
            detail::visit_bottom_row(c, max_norm, kind,
                                     [&](const LatticeElement& g) { visit(worker, g); });
    };
    if (threads == 1) {
        stripe(0);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back(stripe, w);
}

// All canonical elements with displacement <= t_max, sorted.
inline std::vector<LatticeElement> enumerate_ball(double t_max, GroupKind kind, EnumerationOptions opts = {})
{
    const unsigned threads = detail::resolve_threads(opts.threads);
    opts.threads = threads;
    std::vector<std::vector<LatticeElement>> parts(threads);
    for_each_in_ball(t_max, kind, [&](unsigned w, const LatticeElement& g) { parts[w].push_back(g); }, opts);
    std::vector<LatticeElement> out;
    for (auto& p : parts)
        out.insert(out.end(), p.begin(), p.end());
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<LatticeElement> enumerate_ball(double t_max, const GroupSpec& group, EnumerationOptions opts = {})
{
    return enumerate_ball(t_max, group.kind, opts);
}

struct CountPoint {
    double t = 0;
    std::int64_t n = 0;
    friend bool operator==(const CountPoint&, const CountPoint&) = default;
};

// Cumulative count N(t) = #{gamma : displacement(gamma) <= t} for t <= t_max,
// stored exactly as a step function over the distinct norms that occur.
class CountCurve {
public:
    struct Step {
        std::int64_t norm = 0;
        std::int64_t cumulative = 0;
        friend bool operator==(const Step&, const Step&) = default;
    };

    CountCurve() = default;
    CountCurve(GroupKind kind, double t_max, std::vector<Step> steps)
        : kind_(kind), t_max_(t_max), steps_(std::move(steps))
    {
        for (std::size_t k = 1; k < steps_.size(); ++k)
            if (steps_[k].norm <= steps_[k - 1].norm || steps_[k].cumulative < steps_[k - 1].cumulative)
                throw InputError("CountCurve: steps must have increasing norms and nondecreasing counts");
    }

    [[nodiscard]] GroupKind kind() const noexcept { return kind_; }
    [[nodiscard]] double t_max() const noexcept { return t_max_; }
    [[nodiscard]] const std::vector<Step>& steps() const noexcept { return steps_; }

    [[nodiscard]] std::int64_t count(double t) const
    {
        if (t > t_max_)
            throw RangeError("CountCurve: t beyond the enumerated range; extend the cache");
        const std::int64_t bound = max_norm_for(t);
        auto it = std::upper_bound(steps_.begin(), steps_.end(), bound,
                                   [](std::int64_t v, const Step& s) { return v < s.norm; });
        return it == steps_.begin() ? 0 : std::prev(it)->cumulative;
    }

    // (t_k, N(t_k)) for t_k = k * spacing <= t_max
    [[nodiscard]] std::vector<CountPoint> grid(double spacing) const
    {
        if (!(spacing > 0))
            throw DomainError("CountCurve::grid: spacing must be positive");
        std::vector<CountPoint> rows;
        for (std::int64_t k = 0;; ++k) {
            const double t = static_cast<double>(k) * spacing;
            if (t > t_max_)
                break;
            rows.push_back({t, count(t)});
        }
        return rows;
    }

    friend bool operator==(const CountCurve&, const CountCurve&) = default;

private:
    GroupKind kind_ = GroupKind::PSL2Z;
    double t_max_ = 0;
    std::vector<Step> steps_;
};

// Enumerates once and tabulates counts by norm. Elements are never stored,
// so this scales to the full cap.
inline CountCurve build_count_curve(double t_max, GroupKind kind, EnumerationOptions opts = {})
{
    if (t_max < 0)
        throw DomainError("build_count_curve: negative range");
    const unsigned threads = detail::resolve_threads(opts.threads);
    opts.threads = threads;
    const std::int64_t max_norm = max_norm_for(t_max);
    std::vector<std::vector<std::uint32_t>> hist(threads, std::vector<std::uint32_t>(max_norm + 1, 0));
    for_each_in_ball(t_max, kind, [&](unsigned w, const LatticeElement& g) { ++hist[w][g.norm()]; }, opts);
    std::vector<CountCurve::Step> steps;
    std::int64_t total = 0;
    for (std::int64_t n = 0; n <= max_norm; ++n) {
        std::int64_t here = 0;
        for (const auto& h : hist)
            here += h[n];
        if (here == 0)
            continue;
        total += here;
        steps.push_back({n, total});
    }
    return CountCurve(kind, t_max, std::move(steps));
}

inline std::int64_t count_in_ball(double t, const CountCurve& cache) { return cache.count(t); }

struct ShellCensus {
    double h = 0;
    std::int64_t i = 0;
    double r = 0;
    std::int64_t count = 0;
    std::optional<std::vector<LatticeElement>> elements;
};

namespace detail {

// Shell edges h*i -+ r, computed as h * (i -+ r/h) so that adjacent shells
// with r = h/2 share a bit-identical edge.
inline std::pair<double, double> shell_edges(double h, std::int64_t i, double r) noexcept
{
    const double w = r / h;
    const double fi = static_cast<double>(i);
    return {h * (fi - w), h * (fi + w)};
}

inline void check_shell_args(double h, std::int64_t i, double r)
{
    if (!(h > 0) || !std::isfinite(h))
        throw DomainError("shell_census: h must be positive");
    if (i < 0)
        throw DomainError("shell_census: shell index must be non-negative");
    if (!(r > 0) || !std::isfinite(r))
        throw DomainError("shell_census: r must be positive");
}

} // namespace detail

// #{gamma : displacement(gamma) in (h i - r, h i + r]}. Partition checks use
// r = h/2, which is why r >= 1 is accepted here when h >= 2.
inline ShellCensus shell_census(double h, std::int64_t i, double r, const CountCurve& curve,
                                bool with_elements = false)
{
    detail::check_shell_args(h, i, r);
    if (r >= 1.0 && r != 0.5 * h)
        throw DomainError("shell_census: r must lie in (0, 1)");
    const auto [lo, hi] = detail::shell_edges(h, i, r);
    ShellCensus s{h, i, r, curve.count(hi) - curve.count(lo), std::nullopt};
    if (with_elements) {
        const std::int64_t lo_norm = max_norm_for(lo);
        std::vector<LatticeElement> els;
        for (const auto& g : enumerate_ball(hi, curve.kind()))
            if (g.norm() > lo_norm)
                els.push_back(g);
        s.elements = std::move(els);
    }
    return s;
}

inline double main_term(double t, double kappa)
{
    if (!(t >= 0))
        throw DomainError("main_term: t must be non-negative");
    return kappa * ball_area(t);
}

struct ErrorExponentFit {
    double kappa = 0;      // plateau of N(t) / ball_area(t)
    double q = 0;          // slope of ln|N - kappa A| against ln A
    double plateau_spread = 0;  // (max - min) / mean of N/A on the plateau window
    std::size_t points_used = 0;
};

namespace detail {

struct LineFit {
    double slope = 0;
    double intercept = 0;
    double rss = 0;
    std::size_t n = 0;
};

inline LineFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys)
{
    LineFit f;
    f.n = xs.size();
    if (f.n < 2)
        return f;
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < f.n; ++k) {
        mx += xs[k];
        my += ys[k];
    }
    mx /= f.n;
    my /= f.n;
    double sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < f.n; ++k) {
        sxx += (xs[k] - mx) * (xs[k] - mx);
        sxy += (xs[k] - mx) * (ys[k] - my);
    }
    f.slope = sxx > 0 ? sxy / sxx : 0;
    f.intercept = my - f.slope * mx;
    for (std::size_t k = 0; k < f.n; ++k) {
        const double e = ys[k] - (f.intercept + f.slope * xs[k]);
        f.rss += e * e;
    }
    return f;
}

} // namespace detail

inline constexpr double kFitGridSpacing = 0.25;

// Fits N(t) ~ kappa * ball_area(t) + O(ball_area(t)^q) on a curve sampled at
// spacing 0.25. kappa is the mean of N/A over the top quartile of the range;
// q is the least-squares slope of ln|N - kappa A| against ln A over the rest
// of the range (the plateau window is excluded so kappa's own error does not
// feed back into the slope). Zero residuals are skipped.
inline ErrorExponentFit fit_error_exponent(const std::vector<CountPoint>& rows)
{
    if (rows.size() < 2)
        throw InputError("fit_error_exponent: need at least two points");
    const double t_lo = rows.front().t;
    const double t_hi = rows.back().t;
    if (t_hi - t_lo < 4.0)
        throw InputError("fit_error_exponent: the curve must span at least 4 units of t");
    const double cut = t_hi - 0.25 * (t_hi - t_lo);

    ErrorExponentFit fit;
    CompensatedSum sum;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    std::size_t m = 0;
    for (const auto& p : rows) {
        if (p.t < cut || p.t <= 0)
            continue;
        const double ratio = static_cast<double>(p.n) / ball_area(p.t);
        sum += ratio;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        ++m;
    }
    if (m == 0)
        throw InputError("fit_error_exponent: empty plateau window");
    fit.kappa = sum.value() / static_cast<double>(m);
    fit.plateau_spread = (hi - lo) / fit.kappa;

    std::vector<double> xs, ys;
    for (const auto& p : rows) {
        if (p.t >= cut || p.t <= 0)
            continue;
        const double area = ball_area(p.t);
        const double resid = std::fabs(static_cast<double>(p.n) - fit.kappa * area);
        if (resid == 0)
            continue;
        xs.push_back(std::log(area));
        ys.push_back(std::log(resid));
    }
    if (xs.size() < 2)
        throw InputError("fit_error_exponent: too few nonzero residuals");
    fit.q = detail::least_squares(xs, ys).slope;
    fit.points_used = xs.size();
    return fit;
}

// Fit over [t_lo, t_hi] of an enumerated curve.
inline ErrorExponentFit fit_error_exponent(const CountCurve& curve, double t_lo, double t_hi)
{
    if (t_hi > curve.t_max())
        throw RangeError("fit_error_exponent: range beyond the curve");
    std::vector<CountPoint> rows;
    for (std::int64_t k = 0;; ++k) {
        const double t = t_lo + static_cast<double>(k) * kFitGridSpacing;
        if (t > t_hi + 1e-12)
            break;
        rows.push_back({t, curve.count(t)});
    }
    return fit_error_exponent(rows);
}

// Exponent c4 of the shell-count regime h i >= -c4 ln r, from a fitted q.
inline double c4_from_q(double q, int n = 2)
{
    if (!(q < 1))
        throw DomainError("c4_from_q: fitted exponent must be below 1");
    return 1.0 / ((1.0 - q) * (n - 1));
}

struct ShellBoundRow {
    std::int64_t i = 0;
    double r = 0;
    std::int64_t count = 0;
    double ratio = 0;      // count / (r e^{h i})
    bool in_regime = false;
    bool flagged = false;
};

struct ShellBoundReport {
    double h = 0;
    double c4 = 0;
    double t0 = 0;
    std::vector<ShellBoundRow> rows;
    double max_ratio = 0;  // over in-regime rows
    double min_ratio = 0;
    [[nodiscard]] double spread() const noexcept { return min_ratio > 0 ? max_ratio / min_ratio : 0; }
    [[nodiscard]] std::size_t flagged_count() const noexcept
    {
        return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(),
                                                      [](const ShellBoundRow& r) { return r.flagged; }));
    }
};

// Ratio table census(h, i, r) / (r e^{h i}) for n = 2. Rows outside the
// regime h i >= max(-c4 ln r, r + t0) are kept but marked, never flagged.
// In-regime rows further than `factor` from the in-regime median are flagged.
inline ShellBoundReport verify_shell_bound(double h, std::int64_t i_lo, std::int64_t i_hi,
                                           const std::vector<double>& r_grid, const CountCurve& curve,
                                           double c4, double t0 = 0.0, double factor = 2.0)
{
    ShellBoundReport rep{h, c4, t0, {}, 0, 0};
    std::vector<double> inside;
    for (std::int64_t i = i_lo; i <= i_hi; ++i) {
        for (double r : r_grid) {
            const ShellCensus s = shell_census(h, i, r, curve);
            ShellBoundRow row;
            row.i = i;
            row.r = r;
            row.count = s.count;
            row.ratio = static_cast<double>(s.count) / (r * std::exp(h * static_cast<double>(i)));
            row.in_regime = h * static_cast<double>(i) >= std::max(-c4 * std::log(r), r + t0);
            if (row.in_regime)
                inside.push_back(row.ratio);
            rep.rows.push_back(row);
        }
    }
    if (inside.empty())
        return rep;
    rep.max_ratio = *std::max_element(inside.begin(), inside.end());
    rep.min_ratio = *std::min_element(inside.begin(), inside.end());
    std::nth_element(inside.begin(), inside.begin() + inside.size() / 2, inside.end());
    const double median = inside[inside.size() / 2];
    for (auto& row : rep.rows)
        if (row.in_regime && (row.ratio > factor * median || row.ratio * factor < median))
            row.flagged = true;
    return rep;
}

// (A(t + eps) - A(t - eps)) / (eps A(t - eps)) with A = ball_area.
inline double well_roundedness_check(double t, double eps)
{
    if (!(eps > 0 && eps < 1))
        throw DomainError("well_roundedness_check: eps must lie in (0, 1)");
    if (!(t > eps) || !std::isfinite(t))
        throw DomainError("well_roundedness_check: t must exceed eps");
    return (ball_area(t + eps) - ball_area(t - eps)) / (eps * ball_area(t - eps));
}

struct WellRoundednessRow {
    double t = 0;
    double ratio = 0;
    bool flagged = false;
};

inline std::vector<WellRoundednessRow> well_roundedness_sweep(double eps, double t_lo, double t_hi,
                                                              double step, double c2 = 10.0)
{
    std::vector<WellRoundednessRow> rows;
    for (std::int64_t k = 0;; ++k) {
        const double t = t_lo + static_cast<double>(k) * step;
        if (t > t_hi + 1e-12)
            break;
        const double v = well_roundedness_check(t, eps);
        rows.push_back({t, v, v > c2});
    }
    return rows;
}

} // namespace hypershrink
