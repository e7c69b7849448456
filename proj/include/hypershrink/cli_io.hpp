#pragma once

// Persistence and export: flat key=value configs, CSV tables, atomic file
// writes, run manifests and the on-disk count cache.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unistd.h>
#include <utility>
#include <vector>

#include <json.hpp>

#include "conditions.hpp"
#include "errors.hpp"
#include "modular_lattice.hpp"
#include "numeric.hpp"
#include "target_experiments.hpp"

namespace hypershrink {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kToolName = "hypershrink";
inline constexpr std::string_view kCacheEnv = "HYPERSHRINK_CACHE_DIR";

#ifndef HYPERSHRINK_VERSION
#define HYPERSHRINK_VERSION "0.0.0"
#endif
inline constexpr std::string_view kToolVersion = HYPERSHRINK_VERSION;

// ---- config -------------------------------------------------------------

using KeyValues = std::vector<std::pair<std::string, std::string>>;

namespace detail {

inline std::string_view trim(std::string_view s)
{
    constexpr std::string_view blank = " \t\r\n";
    while (!s.empty() && blank.find(s.front()) != std::string_view::npos)
        s.remove_prefix(1);
    while (!s.empty() && blank.find(s.back()) != std::string_view::npos)
        s.remove_suffix(1);
    return s;
}

} // namespace detail

// Lines of the form `key = value`; blank lines and `#` comments ignored.
// Surrounding double quotes on values are stripped.
inline KeyValues parse_key_values(std::string_view text)
{
    KeyValues out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = detail::trim(text.substr(0, nl));
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        if (line.empty() || line.front() == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw InputError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string_view key = detail::trim(line.substr(0, eq));
        std::string_view value = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw InputError("config line " + std::to_string(line_no) + ": empty key");
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        out.emplace_back(std::string(key), std::string(value));
    }
    return out;
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline KeyValues load_key_values(const std::filesystem::path& path) { return parse_key_values(read_file(path)); }

inline HPoint parse_point(std::string_view s)
{
    const auto v = detail::parse_reals(s);
    if (v.size() != 2)
        throw InputError("point must be given as x,y");
    const HPoint p{v[0], v[1]};
    if (!p.valid())
        throw InputError("point must have finite x and y > 0");
    return p;
}

inline std::vector<double> parse_real_list(std::string_view s)
{
    if (s.empty())
        return {};
    try {
        return detail::parse_reals(s);
    } catch (const InputError&) {
        throw InputError("cannot parse number list '" + std::string(s) + "'");
    }
}

// ---- files --------------------------------------------------------------

// FNV-1a, used to fingerprint outputs and cache files.
inline std::uint64_t fnv1a(std::string_view data) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Writes to a sibling temporary and renames over the target.
inline void atomic_write(const std::filesystem::path& path, std::string_view content)
{
    namespace fs = std::filesystem;
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw InputError("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw InputError("write failed for '" + path.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw InputError("cannot rename into '" + path.string() + "'");
    }
}

// ---- CSV ----------------------------------------------------------------

class CsvTable {
public:
    explicit CsvTable(std::string header) { text_ = std::move(header) + "\n"; }

    template <class... Cells>
    void row(const Cells&... cells)
    {
        bool first = true;
        ((text_ += (first ? "" : ","), text_ += cell(cells), first = false), ...);
        text_ += "\n";
    }
    void comment(std::string_view line)
    {
        text_ += "# ";
        text_ += line;
        text_ += "\n";
    }
    [[nodiscard]] const std::string& str() const noexcept { return text_; }

private:
    static std::string cell(double v) { return format_real(v); }
    static std::string cell(bool v) { return v ? "1" : "0"; }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    template <class I>
        requires std::is_integral_v<I>
    static std::string cell(I v)
    {
        return std::to_string(v);
    }
    std::string text_;
};

inline std::string count_csv(const std::vector<CountPoint>& rows)
{
    CsvTable t("t,N");
    for (const auto& p : rows)
        t.row(p.t, p.n);
    return t.str();
}

inline std::string shells_csv(const ShellBoundReport& rep)
{
    CsvTable t("h,i,r,count,ratio");
    for (const auto& r : rep.rows)
        t.row(rep.h, r.i, r.r, r.count, r.ratio);
    return t.str();
}

inline std::string trials_csv(const std::vector<TrialRecord>& trials)
{
    CsvTable t("trial,seed,S_T,first_hit,last_hit");
    for (const auto& tr : trials)
        t.row(tr.trial, tr.seed, tr.S_T, tr.first_hit(), tr.last_hit());
    return t.str();
}

inline std::string report_csv(const ExperimentReport& rep)
{
    CsvTable t("T,I_T,mean_S,mean_ratio,second_moment,frac_late_hit,se_mean,se_m2");
    for (const auto& r : rep.rows)
        t.row(r.T, r.I_T, r.mean_S, r.mean_ratio, r.second_moment, r.frac_late_hit, r.se_mean, r.se_m2);
    return t.str();
}

inline std::string twoball_csv(const std::vector<TwoBallReport>& rows)
{
    CsvTable t("d,r1,r2,h,gate,estimate,se,bound_ratio");
    for (const auto& r : rows)
        t.row(r.d, r.r1, r.r2, r.h, r.gate, r.estimate, r.se, r.bound_ratio);
    return t.str();
}

inline std::string condition_summary(const ConditionReport& rep)
{
    std::string s = "id=" + rep.id + " verdict=" + to_string(rep.verdict) + " sup=" + format_real(rep.sup_ratio) +
                    " inf=" + format_real(rep.inf_ratio) + " C1=" + format_real(rep.params.C1) +
                    " C2=" + format_real(rep.params.C2) + " C0=" + format_real(rep.params.C0) +
                    " n=" + std::to_string(rep.params.n) + " excluded=" + std::to_string(rep.excluded) +
                    " clamped=" + std::to_string(rep.clamped);
    if (rep.id == "lemma41")
        s += " C3=" + format_real(rep.params.C3) + " T=" + std::to_string(rep.threshold) +
             " violations=" + std::to_string(rep.violations) +
             " first_violation=" + (rep.first_violation ? std::to_string(*rep.first_violation) : "none");
    return s;
}

inline std::string conditions_csv(const ConditionReport& rep)
{
    CsvTable t("s,ratio");
    for (const auto& [s, v] : rep.witness)
        t.row(s, v);
    t.comment(condition_summary(rep));
    return t.str();
}

// ---- manifest -----------------------------------------------------------

struct OutputRecord {
    std::string path;
    std::string fnv1a;
};

struct RunManifest {
    std::string tool{kToolName};
    std::string version{kToolVersion};
    int schema_version = kSchemaVersion;
    std::string command;
    std::vector<std::string> args;  // resolved arguments, replayable
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::optional<std::uint64_t> seed;
    double wall_clock_seconds = 0;
    std::vector<std::string> cache_ids;
    std::vector<OutputRecord> outputs;

    [[nodiscard]] nlohmann::ordered_json to_json() const
    {
        nlohmann::ordered_json j;
        j["tool"] = tool;
        j["version"] = version;
        j["schema_version"] = schema_version;
        j["command"] = command;
        j["args"] = args;
        j["config"] = config;
        j["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json(nullptr);
        j["wall_clock_seconds"] = wall_clock_seconds;
        j["cache_ids"] = cache_ids;
        auto outs = nlohmann::ordered_json::array();
        for (const auto& o : outputs)
            outs.push_back({{"path", o.path}, {"fnv1a", o.fnv1a}});
        j["outputs"] = outs;
        return j;
    }

    static RunManifest from_json(const nlohmann::json& j)
    {
        try {
            RunManifest m;
            m.tool = j.at("tool").get<std::string>();
            m.version = j.at("version").get<std::string>();
            m.schema_version = j.at("schema_version").get<int>();
            m.command = j.at("command").get<std::string>();
            m.args = j.at("args").get<std::vector<std::string>>();
            m.config = j.at("config");
            if (!j.at("seed").is_null())
                m.seed = j.at("seed").get<std::uint64_t>();
            m.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
            m.cache_ids = j.at("cache_ids").get<std::vector<std::string>>();
            for (const auto& o : j.at("outputs"))
                m.outputs.push_back({o.at("path").get<std::string>(), o.at("fnv1a").get<std::string>()});
            return m;
        } catch (const nlohmann::json::exception& e) {
            throw InputError(std::string("malformed manifest: ") + e.what());
        }
    }
};

inline std::filesystem::path manifest_path_for(const std::filesystem::path& output)
{
    std::filesystem::path p = output;
    p += ".manifest.json";
    return p;
}

inline RunManifest load_manifest(const std::filesystem::path& path)
{
    const std::string text = read_file(path);
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw InputError("manifest '" + path.string() + "' is not valid JSON");
    RunManifest m = RunManifest::from_json(j);
    if (m.tool != kToolName)
        throw InputError("manifest was not written by " + std::string(kToolName));
    if (m.schema_version != kSchemaVersion)
        throw InputError("manifest schema version " + std::to_string(m.schema_version) + " is not supported");
    return m;
}

// ---- count cache --------------------------------------------------------

inline constexpr std::string_view kCacheMagic = "hypershrink-count-cache";
inline constexpr int kCacheVersion = 1;

inline std::string cache_id(GroupKind kind, double t_max)
{
    return "count-" + std::string(to_string(kind)) + "-" + format_real(t_max);
}

inline std::string serialize_curve(const CountCurve& c)
{
    std::string body = std::string(kCacheMagic) + " " + std::to_string(kCacheVersion) + "\n";
    body += "group " + std::string(to_string(c.kind())) + "\n";
    body += "tmax " + format_real(c.t_max()) + "\n";
    body += "steps " + std::to_string(c.steps().size()) + "\n";
    for (const auto& s : c.steps())
        body += std::to_string(s.norm) + " " + std::to_string(s.cumulative) + "\n";
    return body + "checksum " + hex64(fnv1a(body)) + "\n";
}

inline CountCurve deserialize_curve(std::string_view text)
{
    const auto tail = text.rfind("checksum ");
    if (tail == std::string_view::npos)
        throw CorruptionError("count cache: missing checksum");
    const std::string_view body = text.substr(0, tail);
    const std::string expected(detail::trim(text.substr(tail + 9)));
    if (expected != hex64(fnv1a(body)))
        throw CorruptionError("count cache: checksum mismatch");
    std::istringstream in{std::string(body)};
    std::string magic, key, group;
    int version = 0;
    double t_max = 0;
    std::size_t n = 0;
    if (!(in >> magic >> version) || magic != kCacheMagic)
        throw CorruptionError("count cache: bad header");
    if (version != kCacheVersion)
        throw CorruptionError("count cache: unsupported version " + std::to_string(version));
    if (!(in >> key >> group) || key != "group")
        throw CorruptionError("count cache: missing group");
    if (!(in >> key >> t_max) || key != "tmax")
        throw CorruptionError("count cache: missing tmax");
    if (!(in >> key >> n) || key != "steps")
        throw CorruptionError("count cache: missing step count");
    std::vector<CountCurve::Step> steps(n);
    for (auto& s : steps)
        if (!(in >> s.norm >> s.cumulative))
            throw CorruptionError("count cache: truncated step table");
    try {
        return CountCurve(parse_group(group), t_max, std::move(steps));
    } catch (const InputError& e) {
        throw CorruptionError(std::string("count cache: ") + e.what());
    }
}

// The same curve cut down to a smaller range; steps beyond it are dropped.
inline CountCurve restrict_curve(const CountCurve& c, double t_max)
{
    if (t_max > c.t_max())
        throw RangeError("restrict_curve: cannot extend a curve");
    const std::int64_t bound = max_norm_for(t_max);
    std::vector<CountCurve::Step> steps;
    for (const auto& s : c.steps())
        if (s.norm <= bound)
            steps.push_back(s);
    return CountCurve(c.kind(), t_max, std::move(steps));
}

inline std::optional<std::filesystem::path> cache_dir_from_env()
{
    const char* v = std::getenv(std::string(kCacheEnv).c_str());
    if (v == nullptr || *v == '\0')
        return std::nullopt;
    return std::filesystem::path(v);
}

struct CachedCurve {
    CountCurve curve;
    std::string id;     // identifier of the cache entry used or written
    bool hit = false;
    bool rebuilt_corrupt = false;
};

// Loads the smallest cached curve covering t_max, or enumerates and stores
// one. Corrupt entries are replaced. Without a cache directory the curve is
// always built.
inline CachedCurve load_or_build_curve(const std::optional<std::filesystem::path>& dir, GroupKind kind,
                                       double t_max, unsigned threads)
{
    namespace fs = std::filesystem;
    CachedCurve out;
    if (dir && fs::is_directory(*dir)) {
        std::optional<std::pair<double, fs::path>> best;
        const std::string prefix = "count-" + std::string(to_string(kind)) + "-";
        for (const auto& entry : fs::directory_iterator(*dir)) {
            const std::string name = entry.path().filename().string();
            if (name.rfind(prefix, 0) != 0 || entry.path().extension() != ".cache")
                continue;
            const std::string num = name.substr(prefix.size(), name.size() - prefix.size() - 6);
            char* end = nullptr;
            const double tm = std::strtod(num.c_str(), &end);
            if (end == num.c_str() || *end != '\0' || tm < t_max)
                continue;
            if (!best || tm < best->first)
                best = {tm, entry.path()};
        }
        if (best) {
            try {
                const CountCurve c = deserialize_curve(read_file(best->second));
                if (c.kind() != kind)
                    throw CorruptionError("count cache: group mismatch");
                out.curve = restrict_curve(c, t_max);
                out.id = cache_id(kind, c.t_max());
                out.hit = true;
                return out;
            } catch (const CorruptionError&) {
                out.rebuilt_corrupt = true;
            }
        }
    }
    out.curve = build_count_curve(t_max, kind, {kDefaultEnumerationCap, threads});
    out.id = cache_id(kind, t_max);
    if (dir) {
        fs::create_directories(*dir);
        atomic_write(*dir / (out.id + ".cache"), serialize_curve(out.curve));
    }
    return out;
}

// ---- timing -------------------------------------------------------------

class Stopwatch {
public:
    [[nodiscard]] double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

} // namespace hypershrink
