#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>

namespace hypershrink {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Neumaier compensated summation. Sums over the same sequence in the same
// order are bit-identical, and the error stays at O(ulp) for long series.
class CompensatedSum {
public:
    void add(double x) noexcept
    {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) noexcept
    {
        add(x);
        return *this;
    }
    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) noexcept
{
    CompensatedSum s;
    for (double x : xs)
        s.add(x);
    return s.value();
}

// splitmix64 finalizer, used to decorrelate per-trial seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Small, fast, fully specified generator (xoshiro256**). The standard
// distributions are implementation-defined, so uniforms are derived here
// directly to keep seeded output identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept
    {
        std::uint64_t z = seed;
        for (auto& w : s_) {
            z = mix64(z);
            w = z;
        }
    }

    std::uint64_t next() noexcept
    {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform on [0, 1)
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    std::uint64_t below(std::uint64_t n) noexcept { return next() % n; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept
    {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

// Reals in CSV output: 17 significant digits, round-trippable.
inline std::string format_real(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace hypershrink
