#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "numeric.hpp"

namespace hypershrink {

// r_t = C / t^alpha
struct PowerLaw {
    double C = 1;
    double alpha = 0.5;
};

// r_t = C / (t^{1/n} (ln t)^beta), defined for t >= 2
struct PowerLog {
    double C = 1;
    double beta = 1;
    int n = 2;
};

struct Constant {
    double r = 0;
};

// r_t = values[t - cutoff]
struct Table {
    std::vector<double> values;
};

using RadiusFamily = std::variant<PowerLaw, PowerLog, Constant, Table>;

// Nonincreasing target radii r_t, t >= cutoff, with the dimension exponent n
// used in sums of r_t^n.
class RadiusSequence {
public:
    RadiusSequence() : RadiusSequence(Constant{0.0}) {}
    explicit RadiusSequence(RadiusFamily family, int n = 2, std::int64_t cutoff = 0)
        : family_(std::move(family)), n_(n)
    {
        if (n < 2)
            throw DomainError("RadiusSequence: dimension exponent must be at least 2");
        const std::int64_t min_cut = std::holds_alternative<PowerLog>(family_) ? 2 : 1;
        cutoff_ = cutoff == 0 ? min_cut : cutoff;
        if (cutoff_ < min_cut)
            throw DomainError("RadiusSequence: cutoff below the family's domain");
        validate();
    }

    [[nodiscard]] const RadiusFamily& family() const noexcept { return family_; }
    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] std::int64_t cutoff() const noexcept { return cutoff_; }

    // Last index with a defined value (tables only).
    [[nodiscard]] std::int64_t last_index() const noexcept
    {
        if (const auto* tb = std::get_if<Table>(&family_))
            return cutoff_ + static_cast<std::int64_t>(tb->values.size()) - 1;
        return INT64_MAX;
    }

    [[nodiscard]] double operator()(std::int64_t t) const
    {
        if (t < cutoff_)
            throw DomainError("radius: index below the sequence cutoff");
        const double ft = static_cast<double>(t);
        return std::visit(
            [&](const auto& f) -> double {
                using F = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<F, PowerLaw>)
                    return f.C * std::pow(ft, -f.alpha);
                else if constexpr (std::is_same_v<F, PowerLog>)
                    return f.C / (std::pow(ft, 1.0 / f.n) * std::pow(std::log(ft), f.beta));
                else if constexpr (std::is_same_v<F, Constant>)
                    return f.r;
                else {
                    const auto k = static_cast<std::size_t>(t - cutoff_);
                    if (k >= f.values.size())
                        throw RangeError("radius: index beyond the table");
                    return f.values[k];
                }
            },
            family_);
    }

    // r_t, or 0 below the cutoff (no target at those times).
    [[nodiscard]] double at_or_zero(std::int64_t t) const { return t < cutoff_ ? 0.0 : (*this)(t); }

    [[nodiscard]] std::string describe() const
    {
        return std::visit(
            [&](const auto& f) -> std::string {
                using F = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<F, PowerLaw>)
                    return "powerlaw:" + format_real(f.C) + "," + format_real(f.alpha);
                else if constexpr (std::is_same_v<F, PowerLog>)
                    return "powerlog:" + format_real(f.C) + "," + format_real(f.beta);
                else if constexpr (std::is_same_v<F, Constant>)
                    return "constant:" + format_real(f.r);
                else {
                    std::string s = "table:";
                    for (std::size_t k = 0; k < f.values.size(); ++k)
                        s += (k ? "," : "") + format_real(f.values[k]);
                    return s;
                }
            },
            family_);
    }

private:
    void validate() const
    {
        std::visit(
            [&](const auto& f) {
                using F = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<F, PowerLaw>) {
                    if (!(f.C > 0) || !(f.alpha >= 0))
                        throw DomainError("PowerLaw: need C > 0 and alpha >= 0");
                } else if constexpr (std::is_same_v<F, PowerLog>) {
                    if (!(f.C > 0) || !(f.beta >= 0))
                        throw DomainError("PowerLog: need C > 0 and beta >= 0");
                    if (f.n != n_)
                        throw DomainError("PowerLog: family exponent must match the sequence exponent");
                } else if constexpr (std::is_same_v<F, Constant>) {
                    if (!(f.r >= 0) || !std::isfinite(f.r))
                        throw DomainError("Constant: radius must be finite and non-negative");
                } else {
                    if (f.values.empty())
                        throw DomainError("Table: no values");
                    for (std::size_t k = 0; k < f.values.size(); ++k) {
                        if (!(f.values[k] > 0) || !std::isfinite(f.values[k]))
                            throw DomainError("Table: radii must be positive and finite");
                        if (k > 0 && f.values[k] > f.values[k - 1])
                            throw DomainError("Table: radii must be nonincreasing");
                    }
                }
            },
            family_);
    }

    RadiusFamily family_;
    int n_ = 2;
    std::int64_t cutoff_ = 1;
};

inline double radius(const RadiusSequence& seq, std::int64_t t) { return seq(t); }

namespace detail {

inline std::vector<double> parse_reals(std::string_view s)
{
    std::vector<double> out;
    while (!s.empty()) {
        const auto comma = s.find(',');
        const std::string_view tok = s.substr(0, comma);
        double v = 0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || ptr != tok.data() + tok.size())
            throw InputError("radius spec: cannot parse number '" + std::string(tok) + "'");
        out.push_back(v);
        if (comma == std::string_view::npos)
            break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

} // namespace detail

// Compact family syntax: powerlaw:C,alpha  powerlog:C,beta  constant:r
// table:r1,r2,...
inline RadiusSequence parse_radius(std::string_view spec, int n = 2, std::int64_t cutoff = 0)
{
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos)
        throw InputError("radius spec must look like name:params");
    const std::string_view name = spec.substr(0, colon);
    const auto p = detail::parse_reals(spec.substr(colon + 1));
    auto need = [&](std::size_t k) {
        if (p.size() != k)
            throw InputError("radius spec '" + std::string(name) + "' takes " + std::to_string(k) + " parameters");
    };
    try {
        if (name == "powerlaw") {
            need(2);
            return RadiusSequence(PowerLaw{p[0], p[1]}, n, cutoff);
        }
        if (name == "powerlog") {
            need(2);
            return RadiusSequence(PowerLog{p[0], p[1], n}, n, cutoff);
        }
        if (name == "constant") {
            need(1);
            return RadiusSequence(Constant{p[0]}, n, cutoff);
        }
        if (name == "table")
            return RadiusSequence(Table{p}, n, cutoff);
    } catch (const DomainError& e) {
        throw InputError(e.what());
    }
    throw InputError("unknown radius family '" + std::string(name) + "'");
}

} // namespace hypershrink
