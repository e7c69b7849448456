#pragma once

// Shrinking-target Monte Carlo on V = Gamma \ H^2.
//
// A trial samples a Liouville-random state, runs the time-h map for T steps
// and records a hit at step t when the quotient distance to p0 is <= r_t.
// S_T is the hit count and I_T = sum_t mu(B_t) its expectation, computed
// exactly from disk areas. Trials are pure functions of (config, index):
// trial j draws from the stream seeded with seed ^ j, so results do not
// depend on thread count or execution order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "hyperbolic_core.hpp"
#include "modular_lattice.hpp"
#include "numeric.hpp"
#include "quotient_flow.hpp"
#include "radius.hpp"

namespace hypershrink {

struct ExperimentConfig {
    GroupKind group = GroupKind::Gamma2;
    HPoint p0{0.0, 2.0};
    double h = 1.0;
    std::int64_t T = 10'000;
    std::int64_t trials = 500;
    std::uint64_t seed = 0;
    RadiusSequence radius{Constant{0.1}};
    std::vector<std::int64_t> checkpoints;  // horizons to report; T is always included
    double translate_radius = kDefaultTranslateRadius;
    unsigned threads = 0;                   // 0: hardware concurrency
};

struct TrialRecord {
    std::int64_t trial = 0;
    std::uint64_t seed = 0;  // stream seed, config seed ^ trial
    std::int64_t T = 0;
    std::vector<std::int64_t> hit_times;
    std::int64_t S_T = 0;
    std::vector<std::int64_t> checkpoint_counts;  // S at each checkpoint horizon
    std::vector<bool> late_hit;                   // a hit in [ceil(Tc/2), Tc]
    [[nodiscard]] std::int64_t first_hit() const noexcept { return hit_times.empty() ? 0 : hit_times.front(); }
    [[nodiscard]] std::int64_t last_hit() const noexcept { return hit_times.empty() ? 0 : hit_times.back(); }
};

struct ReportRow {
    std::int64_t T = 0;
    double I_T = 0;
    double mean_S = 0;
    double mean_ratio = 0;     // mean S_T / I_T
    double second_moment = 0;  // mean (S_T / I_T)^2
    double frac_late_hit = 0;
    double se_mean = 0;        // standard error of mean S_T
    double se_m2 = 0;          // standard error of the second moment
    double se_frac = 0;
};

struct ExperimentReport {
    std::vector<ReportRow> rows;  // one per checkpoint, ascending T
    std::vector<TrialRecord> trials;
    double injectivity = 0;
    double R = 0;
    bool within_R = true;         // every radius <= min(i_V/4, 1, h)
    bool embedded = true;         // every radius <= i_V
    [[nodiscard]] const ReportRow& final_row() const { return rows.back(); }
};

// Read-only data shared by all trials of one configuration.
class ExperimentContext {
public:
    explicit ExperimentContext(const ExperimentConfig& cfg) : cfg_(cfg)
    {
        if (!(cfg.h > 0) || cfg.h > 10)
            throw DomainError("experiment: h must lie in (0, 10]");
        if (cfg.T < 1)
            throw DomainError("experiment: horizon T must be at least 1");
        require_valid(cfg.p0, "experiment: target center");
        if (!in_reduction_region(cfg.p0, cfg.group))
            throw DomainError("experiment: target center must lie in the reduction region");
        if (cfg.T > cfg.radius.last_index())
            throw RangeError("experiment: radius table shorter than the horizon");
        for (std::int64_t c : cfg.checkpoints)
            if (c < 1 || c > cfg.T)
                throw DomainError("experiment: checkpoints must lie in [1, T]");
        checkpoints_ = cfg.checkpoints;
        checkpoints_.push_back(cfg.T);
        std::sort(checkpoints_.begin(), checkpoints_.end());
        checkpoints_.erase(std::unique(checkpoints_.begin(), checkpoints_.end()), checkpoints_.end());

        reducer_ = Reducer(cfg.group);
        translates_ = TranslateSet::build(cfg.group, cfg.p0, cfg.translate_radius);
        by_height_ = translates_.images();
        std::sort(by_height_.begin(), by_height_.end(), [](const HPoint& a, const HPoint& b) { return a.y < b.y; });
        const InjectivityRadius inj = injectivity_radius(cfg.p0, cfg.group);
        injectivity_ = inj.value;
        R_ = radius_R(injectivity_, cfg.h);

        thresholds_.assign(static_cast<std::size_t>(cfg.T + 1), -1.0);
        radii_.assign(static_cast<std::size_t>(cfg.T + 1), 0.0);
        mu_prefix_.assign(static_cast<std::size_t>(cfg.T + 1), 0.0);
        CompensatedSum mu;
        double cached_r = -1, cached_mu = 0;
        for (std::int64_t t = 1; t <= cfg.T; ++t) {
            const auto k = static_cast<std::size_t>(t);
            if (t >= cfg.radius.cutoff()) {
                const double r = cfg.radius(t);
                if (2.0 * r > cfg.translate_radius)
                    throw DomainError("experiment: target radius exceeds half the translate radius");
                radii_[k] = r;
                const double s = std::sinh(0.5 * r);
                thresholds_[k] = r > 0 ? 2.0 * s * s : -1.0;
                if (r != cached_r) {
                    cached_r = r;
                    cached_mu = quotient_ball_measure(cfg.p0, r, translates_, covolume());
                }
                mu += cached_mu;
                within_R_ = within_R_ && r <= R_;
                embedded_ = embedded_ && r <= injectivity_;
                max_radius_ = std::max(max_radius_, r);
            }
            mu_prefix_[k] = mu.value();
        }
    }

    [[nodiscard]] const ExperimentConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] const Reducer& reducer() const noexcept { return reducer_; }
    [[nodiscard]] const TranslateSet& translates() const noexcept { return translates_; }
    [[nodiscard]] const std::vector<std::int64_t>& checkpoints() const noexcept { return checkpoints_; }
    [[nodiscard]] double covolume() const noexcept { return GroupSpec::of(cfg_.group).covolume(); }
    [[nodiscard]] double injectivity() const noexcept { return injectivity_; }
    [[nodiscard]] double R() const noexcept { return R_; }
    [[nodiscard]] bool within_R() const noexcept { return within_R_; }
    [[nodiscard]] bool embedded() const noexcept { return embedded_; }
    [[nodiscard]] double max_radius() const noexcept { return max_radius_; }

    // sum_{t <= T} mu(B_t)
    [[nodiscard]] double expected_hits(std::int64_t T) const { return mu_prefix_.at(static_cast<std::size_t>(T)); }

    // cosh(r_t) - 1, or -1 when there is no target at time t
    [[nodiscard]] double threshold(std::int64_t t) const noexcept { return thresholds_[static_cast<std::size_t>(t)]; }
    [[nodiscard]] double radius_at(std::int64_t t) const noexcept { return radii_[static_cast<std::size_t>(t)]; }

    // Nearest translate within cosh-threshold u, scanning only images whose
    // height is within a factor e^r of z's (d >= |ln(y/y')|).
    [[nodiscard]] bool hits(const HPoint& z, std::int64_t t) const noexcept
    {
        const double u = thresholds_[static_cast<std::size_t>(t)];
        if (u < 0)
            return false;
        const double r = radii_[static_cast<std::size_t>(t)];
        return any_within(z, u, r);
    }

private:
    [[nodiscard]] bool any_within(const HPoint& z, double u, double r) const noexcept
    {
        const double lo = z.y * std::exp(-r) * (1 - 1e-12);
        auto it = std::lower_bound(by_height_.begin(), by_height_.end(), lo,
                                   [](const HPoint& p, double v) { return p.y < v; });
        const double hi = z.y * std::exp(r) * (1 + 1e-12);
        for (; it != by_height_.end() && it->y <= hi; ++it)
            if (cosh_dist_m1(z, *it) <= u)
                return true;
        return false;
    }

    ExperimentConfig cfg_;
    std::vector<std::int64_t> checkpoints_;
    Reducer reducer_;
    TranslateSet translates_;
    double injectivity_ = 0, R_ = 0, max_radius_ = 0;
    bool within_R_ = true, embedded_ = true;
    std::vector<double> thresholds_, radii_, mu_prefix_;
    std::vector<HPoint> by_height_;
};

// sum_{t=1}^{T} mu(B(p0, r_t)) with exact quotient-ball measures.
inline double expected_sum_I(const RadiusSequence& seq, std::int64_t T, GroupKind group, const HPoint& p0,
                             const TranslateSet& ts)
{
    if (T < 1)
        throw DomainError("expected_sum_I: T must be at least 1");
    const double cov = GroupSpec::of(group).covolume();
    CompensatedSum s;
    double cached_r = -1, cached_mu = 0;
    for (std::int64_t t = seq.cutoff(); t <= T; ++t) {
        const double r = seq(t);
        if (r != cached_r) {
            cached_r = r;
            cached_mu = quotient_ball_measure(p0, r, ts, cov);
        }
        s += cached_mu;
    }
    return s.value();
}

inline double expected_sum_I(const RadiusSequence& seq, std::int64_t T, GroupKind group, const HPoint& p0)
{
    return expected_sum_I(seq, T, group, p0, TranslateSet::build(group, p0));
}

inline TrialRecord run_trial(const ExperimentContext& ctx, std::int64_t trial_index)
{
    const ExperimentConfig& cfg = ctx.config();
    TrialRecord rec;
    rec.trial = trial_index;
    rec.seed = cfg.seed ^ static_cast<std::uint64_t>(trial_index);
    rec.T = cfg.T;
    Rng rng(rec.seed);
    QuotientState q = sample_liouville(ctx.reducer(), rng);

    const auto& cps = ctx.checkpoints();
    rec.checkpoint_counts.assign(cps.size(), 0);
    rec.late_hit.assign(cps.size(), false);
    for (std::int64_t t = 1; t <= cfg.T; ++t) {
        q = step(q, cfg.h, ctx.reducer());
        if (ctx.hits(q.point(), t))
            rec.hit_times.push_back(t);
    }
    rec.S_T = static_cast<std::int64_t>(rec.hit_times.size());
    for (std::size_t c = 0; c < cps.size(); ++c) {
        const std::int64_t Tc = cps[c];
        const std::int64_t late_start = (Tc + 1) / 2;
        const auto end = std::upper_bound(rec.hit_times.begin(), rec.hit_times.end(), Tc);
        rec.checkpoint_counts[c] = end - rec.hit_times.begin();
        const auto late = std::lower_bound(rec.hit_times.begin(), end, late_start);
        rec.late_hit[c] = late != end;
    }
    return rec;
}

inline TrialRecord run_trial(const ExperimentConfig& cfg, std::int64_t trial_index)
{
    return run_trial(ExperimentContext(cfg), trial_index);
}

namespace detail {

// Runs fn(j) for j in [0, count) over `threads` workers with a static
// interleaved split. fn writes only to its own slot.
template <class Fn>
void parallel_for(std::int64_t count, unsigned threads, Fn&& fn)
{
    threads = resolve_threads(threads);
    if (threads <= 1 || count <= 1) {
        for (std::int64_t j = 0; j < count; ++j)
            fn(j);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                try {
                    for (std::int64_t j = w; j < count; j += threads)
                        fn(j);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

struct MomentAccumulator {
    CompensatedSum s1, s2;
    std::int64_t n = 0;
    void add(double x)
    {
        s1 += x;
        s2 += x * x;
        ++n;
    }
    [[nodiscard]] double mean() const { return s1.value() / static_cast<double>(n); }
    // standard error of the mean from the unbiased sample variance
    [[nodiscard]] double se() const
    {
        if (n < 2)
            return 0;
        const double m = mean();
        const double var = std::max(0.0, (s2.value() - static_cast<double>(n) * m * m) / static_cast<double>(n - 1));
        return std::sqrt(var / static_cast<double>(n));
    }
};

} // namespace detail

inline ExperimentReport run_experiment(const ExperimentContext& ctx)
{
    const ExperimentConfig& cfg = ctx.config();
    if (cfg.trials < 2)
        throw DomainError("run_experiment: need at least two trials");
    ExperimentReport rep;
    rep.trials.resize(static_cast<std::size_t>(cfg.trials));
    detail::parallel_for(cfg.trials, cfg.threads,
                         [&](std::int64_t j) { rep.trials[static_cast<std::size_t>(j)] = run_trial(ctx, j); });
    rep.injectivity = ctx.injectivity();
    rep.R = ctx.R();
    rep.within_R = ctx.within_R();
    rep.embedded = ctx.embedded();

    const auto& cps = ctx.checkpoints();
    for (std::size_t c = 0; c < cps.size(); ++c) {
        ReportRow row;
        row.T = cps[c];
        row.I_T = ctx.expected_hits(row.T);
        detail::MomentAccumulator s, ratio2, late;
        CompensatedSum ratio;
        for (const auto& tr : rep.trials) {
            const auto S = static_cast<double>(tr.checkpoint_counts[c]);
            s.add(S);
            const double x = row.I_T > 0 ? S / row.I_T : 0.0;
            ratio += x;
            ratio2.add(x * x);
            late.add(tr.late_hit[c] ? 1.0 : 0.0);
        }
        row.mean_S = s.mean();
        row.se_mean = s.se();
        row.mean_ratio = ratio.value() / static_cast<double>(cfg.trials);
        row.second_moment = ratio2.mean();
        row.se_m2 = ratio2.se();
        row.frac_late_hit = late.mean();
        row.se_frac = late.se();
        rep.rows.push_back(row);
    }
    return rep;
}

inline ExperimentReport run_experiment(const ExperimentConfig& cfg)
{
    return run_experiment(ExperimentContext(cfg));
}

struct MassReport {
    double fraction = 0;  // samples in the test ball after k steps
    double expected = 0;  // quotient-ball measure
    double se = 0;        // binomial standard error at the expected mass
    std::int64_t samples = 0;
    [[nodiscard]] double z_score() const noexcept { return se > 0 ? (fraction - expected) / se : 0.0; }
};

// Evolves `samples` Liouville states by k steps of the time-h map and
// measures the mass of B(center, r). Sample j uses the stream seed ^ j.
inline MassReport mass_after_flow(GroupKind group, const HPoint& center, double r, double h, std::int64_t k,
                                  std::int64_t samples, std::uint64_t seed, unsigned threads = 0)
{
    if (samples < 1 || k < 0)
        throw DomainError("mass_after_flow: need samples >= 1 and k >= 0");
    const Reducer reducer(group);
    const TranslateSet ts = TranslateSet::build(group, center);
    MassReport rep;
    rep.samples = samples;
    rep.expected = quotient_ball_measure(center, r, ts, GroupSpec::of(group).covolume());
    std::vector<char> inside(static_cast<std::size_t>(samples), 0);
    detail::parallel_for(samples, threads, [&](std::int64_t j) {
        Rng rng(seed ^ static_cast<std::uint64_t>(j));
        QuotientState q = sample_liouville(reducer, rng);
        for (std::int64_t s = 0; s < k; ++s)
            q = step(q, h, reducer);
        inside[static_cast<std::size_t>(j)] = quotient_dist(q, center, ts) <= r;
    });
    const auto hits = std::count(inside.begin(), inside.end(), 1);
    rep.fraction = static_cast<double>(hits) / static_cast<double>(samples);
    rep.se = std::sqrt(rep.expected * (1 - rep.expected) / static_cast<double>(samples));
    return rep;
}

struct TwoBallReport {
    double d = 0, r1 = 0, r2 = 0, h = 0;
    bool gate = false;  // dist(d, hZ) <= 2 max(r1, r2)
    double estimate = 0;
    double se = 0;
    double bound_ratio = 0;  // estimate / (r1 r2 e^{-d} min(r1, r2))
    std::int64_t hits = 0;
    std::int64_t samples = 0;
};

inline constexpr std::int64_t kTwoBallChunk = 1 << 14;

// Liouville measure of frames over B(o1, r1) whose h-step orbit (both time
// directions, |k| <= d/h + 2) visits B(o2, r2). Monte Carlo in H^2.
inline TwoBallReport two_ball_experiment(const HPoint& o1, double r1, const HPoint& o2, double r2, double h,
                                         std::int64_t samples, std::uint64_t seed, unsigned threads = 0)
{
    require_valid(o1, "two_ball: o1");
    require_valid(o2, "two_ball: o2");
    if (!(r1 > 0 && r1 < 1) || !(r2 > 0 && r2 < 1))
        throw DomainError("two_ball: radii must lie in (0, 1)");
    const double d = dist(o1, o2);
    if (!(d > 2))
        throw DomainError("two_ball: centers must be more than 2 apart");
    if (!(h > 2 * std::min(r1, r2)))
        throw DomainError("two_ball: need h > 2 min(r1, r2)");
    if (samples < 1)
        throw DomainError("two_ball: need at least one sample");

    TwoBallReport rep;
    rep.d = d;
    rep.r1 = r1;
    rep.r2 = r2;
    rep.h = h;
    rep.samples = samples;
    const double off = std::fabs(d - h * std::nearbyint(d / h));
    rep.gate = off <= 2 * std::max(r1, r2);

    const auto kmax = static_cast<std::int64_t>(std::floor(d / h + 2));
    const double u2 = 2.0 * std::sinh(0.5 * r2) * std::sinh(0.5 * r2);
    const double cr1 = std::cosh(r1) - 1.0;
    const std::int64_t chunks = (samples + kTwoBallChunk - 1) / kTwoBallChunk;
    std::vector<std::int64_t> chunk_hits(static_cast<std::size_t>(chunks), 0);
    detail::parallel_for(chunks, threads, [&](std::int64_t c) {
        Rng rng(mix64(seed) ^ static_cast<std::uint64_t>(c));
        const std::int64_t begin = c * kTwoBallChunk;
        const std::int64_t end = std::min(samples, begin + kTwoBallChunk);
        std::int64_t hits = 0;
        for (std::int64_t j = begin; j < end; ++j) {
            // area-uniform point of B(o1, r1) in geodesic polar coordinates
            const double rho = std::acosh(1.0 + rng.uniform() * cr1);
            const double psi = rng.uniform(0.0, 2.0 * kPi);
            const HPoint p = basepoint(geodesic_step(frame_from(o1, psi), rho));
            const Mat2 m = frame_from(p, rng.uniform(0.0, 2.0 * kPi)).matrix();
            for (std::int64_t k = -kmax; k <= kmax; ++k) {
                const double e = std::exp(0.5 * h * static_cast<double>(k));
                const HPoint z = act(Mat2{m.a * e, m.b / e, m.c * e, m.d / e}, {0.0, 1.0});
                if (cosh_dist_m1(z, o2) <= u2) {
                    ++hits;
                    break;
                }
            }
        }
        chunk_hits[static_cast<std::size_t>(c)] = hits;
    });
    for (std::int64_t hcount : chunk_hits)
        rep.hits += hcount;
    const double p = static_cast<double>(rep.hits) / static_cast<double>(samples);
    const double mass = 2.0 * kPi * ball_area(r1);
    rep.estimate = p * mass;
    rep.se = std::sqrt(std::max(p * (1 - p), 0.0) / static_cast<double>(samples)) * mass;
    rep.bound_ratio = rep.estimate / (r1 * r2 * std::exp(-d) * std::min(r1, r2));
    return rep;
}

} // namespace hypershrink
