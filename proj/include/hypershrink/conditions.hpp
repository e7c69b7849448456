#pragma once

// Numeric evaluators for the radius-sequence conditions that decide whether
// shrinking-target hits are finite, and the sums on the right-hand side of
// the second-moment bounds.
//
// Asymptotic quantifiers ("<< for large enough s") are operationalized on a
// finite range [s_min, s_max]: a ratio that must stay bounded above holds
// empirically when its max over the last decade [s_max/10, s_max] does not
// exceed its max over the rest of the range; one that must stay bounded
// below holds when its min over the last decade is not below the earlier
// min. Verdicts are evidence, not proofs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "hyperbolic_core.hpp"
#include "numeric.hpp"
#include "radius.hpp"

namespace hypershrink {

enum class Verdict { HoldsEmpirically, FailsEmpirically, Inconclusive };

inline const char* to_string(Verdict v) noexcept
{
    switch (v) {
    case Verdict::HoldsEmpirically:
        return "holds-empirically";
    case Verdict::FailsEmpirically:
        return "fails-empirically";
    default:
        return "inconclusive";
    }
}

struct SRange {
    std::int64_t lo = 1;
    std::int64_t hi = 1000;
};

struct ConditionParams {
    double C1 = 0, C2 = 0, C0 = 0, C3 = 0;
    int n = 2;
    double h = 0, R = 0;
};

struct ConditionReport {
    std::string id;
    Verdict verdict = Verdict::Inconclusive;
    std::vector<std::pair<std::int64_t, double>> witness;  // (s, ratio), log-spaced sample
    double sup_ratio = 0;
    double inf_ratio = 0;
    ConditionParams params;
    std::int64_t excluded = 0;   // indices skipped (r_s >= 1, ln s = 0, ...)
    std::int64_t clamped = 0;    // windows whose lower index was clamped
    std::int64_t threshold = 0;  // lemma check: indices > threshold were tested
    std::int64_t violations = 0;
    std::optional<std::int64_t> first_violation;
    std::string note;
};

// Prefix sums S_t = sum_{u <= t} r_u^exponent for t = 1..T (index t - 1).
// Indices below the cutoff contribute nothing.
inline std::vector<double> partial_sums(const RadiusSequence& seq, double exponent, std::int64_t T)
{
    if (T < 1)
        throw DomainError("partial_sums: T must be at least 1");
    std::vector<double> out(static_cast<std::size_t>(T));
    CompensatedSum s;
    for (std::int64_t t = 1; t <= T; ++t) {
        if (t >= seq.cutoff())
            s += std::pow(seq(t), exponent);
        out[static_cast<std::size_t>(t - 1)] = s.value();
    }
    return out;
}

namespace detail {

inline void check_range(const RadiusSequence& seq, SRange range)
{
    if (range.lo < 1 || range.hi < range.lo)
        throw DomainError("condition check: invalid s range");
    if (range.hi > seq.last_index())
        throw RangeError("condition check: s range beyond the sequence table");
}

// Keeps every point when few, otherwise about 40 per decade plus the ends.
class WitnessSampler {
public:
    explicit WitnessSampler(SRange range) : range_(range) {}
    void offer(std::int64_t s, double ratio, std::vector<std::pair<std::int64_t, double>>& out)
    {
        if (range_.hi - range_.lo <= 2000 || s == range_.lo || s == range_.hi || s >= next_) {
            out.emplace_back(s, ratio);
            next_ = std::max(s + 1, static_cast<std::int64_t>(std::ceil(static_cast<double>(s) * 1.06)));
        }
    }

private:
    SRange range_;
    std::int64_t next_ = 0;
};

enum class Bound { Above, Below };

// Decade-stabilization verdict over (s, ratio) series sorted by s.
inline Verdict stabilization_verdict(const std::vector<std::pair<std::int64_t, double>>& series,
                                     std::int64_t s_hi, Bound bound)
{
    if (series.empty())
        return Verdict::Inconclusive;
    const std::int64_t tail_start = s_hi / 10;
    double early = bound == Bound::Above ? -std::numeric_limits<double>::infinity()
                                         : std::numeric_limits<double>::infinity();
    double tail = early;
    bool have_early = false, have_tail = false;
    for (const auto& [s, v] : series) {
        if (s >= tail_start) {
            tail = bound == Bound::Above ? std::max(tail, v) : std::min(tail, v);
            have_tail = true;
        } else {
            early = bound == Bound::Above ? std::max(early, v) : std::min(early, v);
            have_early = true;
        }
    }
    if (!have_early || !have_tail)
        return Verdict::Inconclusive;
    const double slack = 1e-9 * std::max(std::fabs(early), 1e-300);
    if (bound == Bound::Above)
        return tail <= early + slack ? Verdict::HoldsEmpirically : Verdict::FailsEmpirically;
    return tail >= early - slack ? Verdict::HoldsEmpirically : Verdict::FailsEmpirically;
}

inline void finish(ConditionReport& rep, const std::vector<std::pair<std::int64_t, double>>& series,
                   std::int64_t s_hi, Bound bound)
{
    rep.verdict = stabilization_verdict(series, s_hi, bound);
    if (series.empty()) {
        rep.note = "no admissible indices in range";
        return;
    }
    rep.sup_ratio = -std::numeric_limits<double>::infinity();
    rep.inf_ratio = std::numeric_limits<double>::infinity();
    for (const auto& [s, v] : series) {
        rep.sup_ratio = std::max(rep.sup_ratio, v);
        rep.inf_ratio = std::min(rep.inf_ratio, v);
    }
    if (rep.verdict == Verdict::Inconclusive && rep.note.empty())
        rep.note = "range too short for the last-decade comparison";
}

// Lower window index [s + C1 ln r_s - C2] with [.] = floor, clamped to the
// first defined index.
inline std::int64_t window_start(std::int64_t s, double log_r, double C1, double C2, std::int64_t first,
                                 bool& clamped)
{
    const double x = std::floor(static_cast<double>(s) + C1 * log_r - C2);
    clamped = x < static_cast<double>(first);
    return clamped ? first : static_cast<std::int64_t>(x);
}

// rho(s) = sum_{t=[s + C1 ln r_s - C2]}^{s} r_t^{n-1} / sum_{t<=s} r_t^n for
// s in range; also counts clamped windows.
inline std::vector<std::pair<std::int64_t, double>> window_ratios(const RadiusSequence& seq, double C1, double C2,
                                                                  SRange range, std::int64_t& clamped)
{
    const int n = seq.n();
    const auto pn = partial_sums(seq, n, range.hi);
    const auto pn1 = partial_sums(seq, n - 1, range.hi);
    auto prefix = [](const std::vector<double>& p, std::int64_t t) {
        return t <= 0 ? 0.0 : p[static_cast<std::size_t>(t - 1)];
    };
    std::vector<std::pair<std::int64_t, double>> out;
    clamped = 0;
    const std::int64_t first = seq.cutoff();
    for (std::int64_t s = std::max(range.lo, first); s <= range.hi; ++s) {
        bool c = false;
        const std::int64_t lo = window_start(s, std::log(seq(s)), C1, C2, first, c);
        clamped += c;
        const double denom = prefix(pn, s);
        const double window = lo > s ? 0.0 : prefix(pn1, s) - prefix(pn1, lo - 1);
        out.emplace_back(s, denom > 0 ? window / denom : 0.0);
    }
    return out;
}

inline std::vector<std::pair<std::int64_t, double>> sample_witness(
    const std::vector<std::pair<std::int64_t, double>>& series, SRange range)
{
    std::vector<std::pair<std::int64_t, double>> w;
    WitnessSampler ws(range);
    for (const auto& [s, v] : series)
        ws.offer(s, v, w);
    return w;
}

} // namespace detail

// (-ln r_s / r_s) / s must stay bounded. Indices with r_s >= 1 are excluded.
inline ConditionReport check_condition3(const RadiusSequence& seq, SRange range)
{
    detail::check_range(seq, range);
    ConditionReport rep;
    rep.id = "condition3";
    rep.params.n = seq.n();
    std::vector<std::pair<std::int64_t, double>> series;
    for (std::int64_t s = std::max(range.lo, seq.cutoff()); s <= range.hi; ++s) {
        const double r = seq(s);
        if (!(r < 1) || !(r > 0)) {
            ++rep.excluded;
            continue;
        }
        const double ratio = (-std::log(r) / r) / static_cast<double>(s);
        if (!std::isfinite(ratio)) {
            ++rep.excluded;
            continue;
        }
        series.emplace_back(s, ratio);
    }
    detail::finish(rep, series, range.hi, detail::Bound::Above);
    rep.params.C0 = rep.sup_ratio;
    if (rep.excluded > 0)
        rep.note = std::to_string(rep.excluded) + " indices excluded (r_s >= 1 or r_s = 0)";
    rep.witness = detail::sample_witness(series, range);
    return rep;
}

// mu(B_t) t / ln t must stay bounded below; mu from exact ball areas over the
// quotient covolume. t = 1 is excluded (ln t = 0).
inline ConditionReport check_condition4(const RadiusSequence& seq, double covolume, SRange range)
{
    detail::check_range(seq, range);
    if (seq.n() != 2)
        throw DomainError("check_condition4: ball measures are implemented for n = 2 only");
    ConditionReport rep;
    rep.id = "condition4";
    rep.params.n = seq.n();
    std::vector<std::pair<std::int64_t, double>> series;
    for (std::int64_t s = std::max({range.lo, seq.cutoff(), std::int64_t{2}}); s <= range.hi; ++s) {
        const double mu = ball_area(seq(s)) / covolume;
        series.emplace_back(s, mu * static_cast<double>(s) / std::log(static_cast<double>(s)));
    }
    rep.excluded = range.lo < 2 ? 1 : 0;
    detail::finish(rep, series, range.hi, detail::Bound::Below);
    rep.witness = detail::sample_witness(series, range);
    return rep;
}

// Window sum of r^{n-1} over [s + C1 ln r_s - C2, s] against the prefix sum
// of r^n; must stay bounded.
inline ConditionReport check_condition5(const RadiusSequence& seq, double C1, double C2, SRange range)
{
    detail::check_range(seq, range);
    ConditionReport rep;
    rep.id = "condition5";
    rep.params.C1 = C1;
    rep.params.C2 = C2;
    rep.params.n = seq.n();
    const auto series = detail::window_ratios(seq, C1, C2, range, rep.clamped);
    detail::finish(rep, series, range.hi, detail::Bound::Above);
    if (rep.clamped > 0)
        rep.note = std::to_string(rep.clamped) + " windows clamped to the first index";
    rep.witness = detail::sample_witness(series, range);
    return rep;
}

// Checks the explicit constant of the implication (3) => (5): with
// C0 = sup of the condition-(3) ratio, C3 = 2 C1 C0 + 1 must bound the
// condition-(5) ratio for every s > T = max(s0, s1, s2), where
//   s0: start of the admissible range,
//   s1: -ln r_s >= C2 / C1 for s > s1,
//   s2: r_s < 1 / (4 C1^2 C0^2) for s > s2.
inline ConditionReport lemma41_check(const RadiusSequence& seq, double C1, double C2, SRange range)
{
    if (!(C1 > 0) || !(C2 > 0))
        throw DomainError("lemma41_check: C1 and C2 must be positive");
    ConditionReport rep;
    rep.id = "lemma41";
    rep.params.C1 = C1;
    rep.params.C2 = C2;
    rep.params.n = seq.n();

    const ConditionReport c3 = check_condition3(seq, range);
    if (c3.verdict != Verdict::HoldsEmpirically) {
        rep.verdict = Verdict::Inconclusive;
        rep.note = "precondition rejected: condition (3) is not satisfied on the range";
        rep.witness = c3.witness.empty() ? std::vector<std::pair<std::int64_t, double>>{{range.lo, 0.0}} : c3.witness;
        return rep;
    }
    const double C0 = c3.sup_ratio;
    const double C3 = 2.0 * C1 * C0 + 1.0;
    rep.params.C0 = C0;
    rep.params.C3 = C3;

    std::int64_t s0 = std::max(range.lo, seq.cutoff());
    while (s0 <= range.hi && !(seq(s0) < 1))
        ++s0;
    auto first_index = [&](auto&& pred) -> std::optional<std::int64_t> {
        for (std::int64_t s = std::max(range.lo, seq.cutoff()); s <= range.hi; ++s)
            if (pred(seq(s)))
                return s;
        return std::nullopt;
    };
    const auto f1 = first_index([&](double r) { return -std::log(r) >= C2 / C1; });
    const auto f2 = first_index([&](double r) { return r < 1.0 / (4.0 * C1 * C1 * C0 * C0); });
    if (!f1 || !f2) {
        rep.verdict = Verdict::Inconclusive;
        rep.note = "thresholds s1/s2 lie beyond the tested range";
        rep.witness = {{range.hi, 0.0}};
        return rep;
    }
    rep.threshold = std::max({s0, *f1 - 1, *f2 - 1});
    if (rep.threshold >= range.hi) {
        rep.verdict = Verdict::Inconclusive;
        rep.note = "threshold T reaches the end of the tested range";
        rep.witness = {{range.hi, 0.0}};
        return rep;
    }

    const auto series = detail::window_ratios(seq, C1, C2, {rep.threshold + 1, range.hi}, rep.clamped);
    for (const auto& [s, v] : series) {
        if (v > C3) {
            ++rep.violations;
            if (!rep.first_violation)
                rep.first_violation = s;
        }
    }
    detail::finish(rep, series, range.hi, detail::Bound::Above);
    rep.verdict = rep.violations == 0 ? Verdict::HoldsEmpirically : Verdict::FailsEmpirically;
    rep.note = "C3 = 2 C1 C0 + 1 = " + format_real(C3) + ", T = " + std::to_string(rep.threshold);
    rep.witness = detail::sample_witness(series, {rep.threshold + 1, range.hi});
    return rep;
}

// c_R = (6R + 2) / h
inline double c_R(double R, double h)
{
    if (!(h > 0))
        throw DomainError("c_R: h must be positive");
    return (6.0 * R + 2.0) / h;
}

// V_s = max(-c4 ln r_s / h, (1 + t0) / h) + c_R
inline double v_s(const RadiusSequence& seq, std::int64_t s, double c4, double t0, double h, double R)
{
    return std::max(-c4 * std::log(seq(s)) / h, (1.0 + t0) / h) + c_R(R, h);
}

struct BoundRhs {
    double first_part = 0;   // sum_{t<=T} r_t^n
    double second_part = 0;  // sum_s r_s^n sum_{t=[s + (c4/h) ln r_s - 6R/h - 2]}^{s} r_t^{n-1}
    double third_part = 0;   // sum_s r_s^n sum_{t<=s} r_t^n
    double normalizer = 0;   // (sum_{t<=T} r_t^n)^2
    double c_R = 0;
    std::int64_t clamped = 0;
};

// The three sums bounding the second moment of S_T, without their
// (existential) constants.
inline BoundRhs bound_rhs(const RadiusSequence& seq, int n, double h, double R, double c4, std::int64_t T)
{
    if (!(h > 0) || !(R > 0) || !(c4 > 0) || T < 1 || n < 2)
        throw DomainError("bound_rhs: parameters must be positive");
    const std::int64_t first = seq.cutoff();
    // nonincreasing, so the first radius is the largest
    if (seq(first) > R)
        throw DomainError("bound_rhs: radii must not exceed R");
    const auto pn = partial_sums(seq, n, T);
    const auto pn1 = partial_sums(seq, n - 1, T);
    auto prefix = [](const std::vector<double>& p, std::int64_t t) {
        return t <= 0 ? 0.0 : p[static_cast<std::size_t>(t - 1)];
    };
    BoundRhs out;
    out.c_R = c_R(R, h);
    const double C1 = c4 / h;
    const double C2 = 6.0 * R / h + 2.0;
    CompensatedSum second, third;
    for (std::int64_t s = first; s <= T; ++s) {
        const double r = seq(s);
        const double rn = std::pow(r, n);
        bool c = false;
        const std::int64_t lo = detail::window_start(s, std::log(r), C1, C2, first, c);
        out.clamped += c;
        second += rn * (lo > s ? 0.0 : prefix(pn1, s) - prefix(pn1, lo - 1));
        third += rn * prefix(pn, s);
    }
    out.first_part = prefix(pn, T);
    out.second_part = second.value();
    out.third_part = third.value();
    out.normalizer = out.first_part * out.first_part;
    return out;
}

} // namespace hypershrink
