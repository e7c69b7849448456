#pragma once

// Command-line driver. run_cli is callable in-process; the tool's main only
// forwards argv.
//
// Exit codes: 0 success, 2 usage or validation error, 3 self-test or replay
// gate failure, 1 anything else.

#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli_io.hpp"
#include "conditions.hpp"
#include "hyperbolic_core.hpp"
#include "modular_lattice.hpp"
#include "quotient_flow.hpp"
#include "radius.hpp"
#include "target_experiments.hpp"

namespace hypershrink {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitGate = 3;

namespace cli_detail {

namespace fs = std::filesystem;

struct Emission {
    std::string tag;  // empty for the primary output
    std::string content;
};

struct Outcome {
    int code = kExitOk;
    std::vector<Emission> emissions;
    std::vector<std::string> cache_ids;
    std::optional<std::uint64_t> seed;
};

// out.csv with tag "trials" -> out_trials.csv
inline fs::path tagged_path(const fs::path& out, const std::string& tag)
{
    if (tag.empty())
        return out;
    return out.parent_path() / (out.stem().string() + "_" + tag + out.extension().string());
}

struct Globals {
    unsigned threads = 0;
    std::string config;
    std::string out;
};

inline std::vector<std::string> resolved_args(const CLI::App& sub)
{
    std::vector<std::string> args;
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string name = opt->get_single_name();
        if (name.empty() || name == "help" || name == "config" || name == "out" || name == "threads")
            continue;
        if (opt->get_lnames().empty())
            continue;
        std::string value;
        if (opt->count() > 0)
            value = opt->as<std::string>();
        else
            value = opt->get_default_str();
        // an empty value would swallow the next flag on replay
        if (value.empty() && opt->get_type_size() != 0)
            continue;
        if (opt->get_type_size() == 0) {
            if (opt->count() > 0)
                args.push_back("--" + name);
            continue;
        }
        args.push_back("--" + name + "=" + value);
    }
    return args;
}

inline nlohmann::ordered_json config_json(const std::vector<std::string>& args)
{
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& a : args) {
        const auto eq = a.find('=');
        if (eq == std::string::npos)
            j[a.substr(2)] = true;
        else
            j[a.substr(2, eq - 2)] = a.substr(eq + 1);
    }
    return j;
}

// ---- subcommands --------------------------------------------------------

struct CountArgs {
    std::string group = "psl2z";
    double tmax = 12;
    double spacing = 0.05;
};

inline Outcome run_count(const CountArgs& a, const Globals& g, std::ostream& err)
{
    const GroupKind kind = parse_group(a.group);
    if (!(a.tmax >= 0) || a.tmax > kDefaultEnumerationCap)
        throw InputError("--tmax must lie in [0, " + format_real(kDefaultEnumerationCap) + "]");
    const CachedCurve c = load_or_build_curve(cache_dir_from_env(), kind, a.tmax, g.threads);
    if (c.rebuilt_corrupt)
        err << "warning: corrupt count cache replaced\n";
    Outcome o;
    o.emissions.push_back({"", count_csv(c.curve.grid(a.spacing))});
    o.cache_ids.push_back(c.id);
    return o;
}

struct FitArgs {
    std::string group = "psl2z";
    double t_lo = 4;
    double t_hi = 12;
};

inline Outcome run_fit(const FitArgs& a, const Globals& g, std::ostream&)
{
    const GroupKind kind = parse_group(a.group);
    const CachedCurve c = load_or_build_curve(cache_dir_from_env(), kind, a.t_hi, g.threads);
    const ErrorExponentFit f = fit_error_exponent(c.curve, a.t_lo, a.t_hi);
    CsvTable t("group,t_lo,t_hi,kappa,q,c4,plateau_spread,points");
    t.row(std::string(to_string(kind)), a.t_lo, a.t_hi, f.kappa, f.q, c4_from_q(f.q), f.plateau_spread,
          f.points_used);
    Outcome o;
    o.emissions.push_back({"", t.str()});
    o.cache_ids.push_back(c.id);
    return o;
}

// c4 from the error-exponent fit on [4, 12].
inline double default_c4(GroupKind kind, unsigned threads, std::vector<std::string>& cache_ids)
{
    const CachedCurve c = load_or_build_curve(cache_dir_from_env(), kind, 12.0, threads);
    cache_ids.push_back(c.id);
    return c4_from_q(fit_error_exponent(c.curve, 4.0, 12.0).q);
}

struct ShellArgs {
    std::string group = "psl2z";
    double h = 1;
    std::int64_t i_lo = 6;
    std::int64_t i_hi = 12;
    std::string r = "0.01,0.05,0.1,0.5";
    double c4 = 0;
    double t0 = 0;
    double factor = 2;
};

inline Outcome run_shells(const ShellArgs& a, const Globals& g, std::ostream& err)
{
    const GroupKind kind = parse_group(a.group);
    const auto radii = parse_real_list(a.r);
    if (radii.empty())
        throw InputError("--r needs at least one radius");
    if (a.i_lo < 1 || a.i_hi < a.i_lo)
        throw InputError("need 1 <= --i-lo <= --i-hi");
    Outcome o;
    const double c4 = a.c4 > 0 ? a.c4 : default_c4(kind, g.threads, o.cache_ids);
    const double reach = a.h * static_cast<double>(a.i_hi) + *std::max_element(radii.begin(), radii.end());
    if (reach > kDefaultEnumerationCap)
        throw InputError("shell table reaches beyond the enumeration cap");
    const CachedCurve c = load_or_build_curve(cache_dir_from_env(), kind, reach, g.threads);
    o.cache_ids.push_back(c.id);
    const ShellBoundReport rep = verify_shell_bound(a.h, a.i_lo, a.i_hi, radii, c.curve, c4, a.t0, a.factor);
    o.emissions.push_back({"", shells_csv(rep)});
    err << "c4=" << format_real(c4) << " in-regime spread=" << format_real(rep.spread())
        << " flagged=" << rep.flagged_count() << "\n";
    return o;
}

struct TargetArgs {
    std::string group = "gamma2";
    std::string p0 = "0,2";
    double h = 1;
    std::string radius = "powerlaw:0.5,0.5";
    int n = 2;
    std::int64_t T = 10'000;
    std::int64_t trials = 500;
    std::uint64_t seed = 0;
    std::string checkpoints;
    double translate_radius = kDefaultTranslateRadius;
};

inline Outcome run_target(const TargetArgs& a, const Globals& g, std::ostream& err)
{
    ExperimentConfig cfg;
    cfg.group = parse_group(a.group);
    cfg.p0 = parse_point(a.p0);
    cfg.h = a.h;
    cfg.radius = parse_radius(a.radius, a.n);
    cfg.T = a.T;
    cfg.trials = a.trials;
    cfg.seed = a.seed;
    for (double c : parse_real_list(a.checkpoints)) {
        if (c != std::floor(c))
            throw InputError("--checkpoints must be integers");
        cfg.checkpoints.push_back(static_cast<std::int64_t>(c));
    }
    cfg.translate_radius = a.translate_radius;
    cfg.threads = g.threads;
    const ExperimentReport rep = run_experiment(cfg);
    Outcome o;
    o.seed = a.seed;
    o.emissions.push_back({"report", report_csv(rep)});
    o.emissions.push_back({"trials", trials_csv(rep.trials)});
    err << "injectivity=" << format_real(rep.injectivity) << " R=" << format_real(rep.R)
        << " within_R=" << rep.within_R << " embedded=" << rep.embedded << "\n";
    return o;
}

struct TwoBallArgs {
    std::string o1 = "0,1";
    double r1 = 0.4;
    double r2 = 0.4;
    double h = 1;
    std::string d = "4,6,8";
    std::int64_t samples = 1'000'000;
    std::uint64_t seed = 0;
};

inline Outcome run_twoball(const TwoBallArgs& a, const Globals& g, std::ostream&)
{
    const HPoint o1 = parse_point(a.o1);
    std::vector<TwoBallReport> rows;
    for (double d : parse_real_list(a.d)) {
        // second center straight up the vertical geodesic through o1
        const HPoint o2{o1.x, o1.y * std::exp(d)};
        rows.push_back(two_ball_experiment(o1, a.r1, o2, a.r2, a.h, a.samples, a.seed, g.threads));
    }
    Outcome o;
    o.seed = a.seed;
    o.emissions.push_back({"", twoball_csv(rows)});
    return o;
}

struct ConditionsArgs {
    std::string radius;
    int n = 2;
    std::int64_t cutoff = 0;
    std::string group = "gamma2";
    double C1 = 1;
    double C2 = 2;
    std::int64_t s_min = 1;
    std::int64_t s_max = 1'000'000;
    std::string which = "3,4,5,lemma41";
    double h = 1;
    double R = 0;
    double c4 = 0;
    std::int64_t bound_T = 0;
};

inline Outcome run_conditions(const ConditionsArgs& a, const Globals& g, std::ostream& err)
{
    const RadiusSequence seq = parse_radius(a.radius, a.n, a.cutoff);
    const GroupKind kind = parse_group(a.group);
    const SRange range{a.s_min, a.s_max};
    Outcome o;
    std::set<std::string> which;
    for (std::string_view rest = a.which; !rest.empty();) {
        const auto comma = rest.find(',');
        which.insert(std::string(detail::trim(rest.substr(0, comma))));
        rest.remove_prefix(comma == std::string_view::npos ? rest.size() : comma + 1);
    }
    for (const auto& w : which)
        if (w != "3" && w != "4" && w != "5" && w != "lemma41")
            throw InputError("--which accepts 3, 4, 5 and lemma41");
    auto emit = [&](const ConditionReport& rep) {
        o.emissions.push_back({rep.id, conditions_csv(rep)});
        err << condition_summary(rep) << "\n";
    };
    if (which.count("3"))
        emit(check_condition3(seq, range));
    if (which.count("4"))
        emit(check_condition4(seq, GroupSpec::of(kind).covolume(), range));
    if (which.count("5"))
        emit(check_condition5(seq, a.C1, a.C2, range));
    if (which.count("lemma41"))
        emit(lemma41_check(seq, a.C1, a.C2, range));
    if (a.bound_T > 0) {
        const double R = a.R > 0 ? a.R : radius_R(injectivity_radius(dirichlet_center(kind), kind).value, a.h);
        const double c4 = a.c4 > 0 ? a.c4 : default_c4(kind, g.threads, o.cache_ids);
        const BoundRhs b = bound_rhs(seq, a.n, a.h, R, c4, a.bound_T);
        CsvTable t("T,first_part,second_part,third_part,normalizer,c_R");
        t.row(a.bound_T, b.first_part, b.second_part, b.third_part, b.normalizer, b.c_R);
        o.emissions.push_back({"bound", t.str()});
    }
    return o;
}

struct SelftestArgs {
    std::int64_t samples = 2000;
    std::uint64_t seed = 1;
    double t_enum = 3;
};

// Oracle checks that need no reference data: enumeration against a
// quadruple loop, reduction against brute-force translate search, and
// determinant drift along long orbits.
inline Outcome run_selftest(const SelftestArgs& a, const Globals& g, std::ostream& out)
{
    if (a.samples < 1 || !(a.t_enum >= 0) || a.t_enum > 5)
        throw InputError("need --samples >= 1 and --t-enum in [0, 5]");
    bool all = true;
    auto report = [&](const std::string& name, bool ok, const std::string& detail) {
        out << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
        all = all && ok;
    };
    for (GroupKind kind : {GroupKind::PSL2Z, GroupKind::Gamma2}) {
        const auto listed = enumerate_ball(a.t_enum, kind, {kDefaultEnumerationCap, g.threads});
        std::set<std::array<std::int64_t, 4>> got, want;
        for (const auto& e : listed)
            got.insert({e.a(), e.b(), e.c(), e.d()});
        const auto m = static_cast<std::int64_t>(std::ceil(std::sqrt(2.0 * std::cosh(a.t_enum))));
        for (std::int64_t p = -m; p <= m; ++p)
            for (std::int64_t q = -m; q <= m; ++q)
                for (std::int64_t r = -m; r <= m; ++r)
                    for (std::int64_t s = -m; s <= m; ++s) {
                        if (p * s - q * r != 1 || std::acosh(0.5 * double(p * p + q * q + r * r + s * s)) > a.t_enum)
                            continue;
                        const auto el = LatticeElement::make(p, q, r, s);
                        if (satisfies_congruence(kind, el))
                            want.insert({el.a(), el.b(), el.c(), el.d()});
                    }
        report("enumeration-" + std::string(to_string(kind)), got == want && got.size() == listed.size(),
               std::to_string(got.size()) + " elements vs " + std::to_string(want.size()));
    }
    for (GroupKind kind : {GroupKind::PSL2Z, GroupKind::Gamma2}) {
        const Reducer reducer(kind);
        const HPoint p0 = dirichlet_center(kind);
        const TranslateSet ts = TranslateSet::build(kind, p0);
        std::vector<HPoint> images;
        for (const auto& e : enumerate_ball(8.0, kind, {kDefaultEnumerationCap, g.threads}))
            images.push_back(act(e.to_mat2(), p0));
        double worst = 0, drift = 0;
        std::int64_t outside = 0;
        for (std::int64_t j = 0; j < a.samples; ++j) {
            Rng rng(a.seed ^ static_cast<std::uint64_t>(j));
            QuotientState q = sample_liouville(reducer, rng);
            for (int k = 0; k < 20; ++k)
                q = step(q, 1.0, reducer);
            const HPoint z = q.point();
            outside += !in_reduction_region(z, kind);
            double best = std::numeric_limits<double>::infinity();
            for (const HPoint& w : images)
                best = std::min(best, cosh_dist_m1(z, w));
            worst = std::max(worst, std::fabs(dist_from_cosh_m1(best) - quotient_dist(z, p0, ts)));
            drift = std::max(drift, std::fabs(q.frame.matrix().det() - 1.0));
        }
        const std::string tag = std::string(to_string(kind));
        report("reduction-region-" + tag, outside == 0, std::to_string(outside) + " states outside");
        report("quotient-distance-" + tag, worst <= 1e-9, "max deviation " + format_real(worst));
        report("determinant-drift-" + tag, drift <= 1e-9, "max |det - 1| " + format_real(drift));
    }
    Outcome o;
    o.seed = a.seed;
    o.code = all ? kExitOk : kExitGate;
    return o;
}

// ---- app wiring ---------------------------------------------------------

inline const std::set<std::string>& subcommand_names()
{
    static const std::set<std::string> names{"count",      "shells",          "fit",    "target", "twoball",
                                             "conditions", "reduce-selftest", "replay"};
    return names;
}

// Moves config-file entries in as flags right after the subcommand token, so
// anything given on the command line (later) wins.
inline std::vector<std::string> expand_config(std::vector<std::string> args)
{
    std::optional<std::string> path;
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (args[k] == "--config" && k + 1 < args.size())
            path = args[k + 1];
        else if (args[k].rfind("--config=", 0) == 0)
            path = args[k].substr(9);
    }
    if (!path)
        return args;
    auto sub = std::find_if(args.begin(), args.end(), [](const std::string& s) { return subcommand_names().count(s); });
    if (sub == args.end())
        throw InputError("--config needs a subcommand");
    std::vector<std::string> injected;
    for (const auto& [k, v] : load_key_values(*path))
        injected.push_back("--" + k + "=" + v);
    args.insert(std::next(sub), injected.begin(), injected.end());
    return args;
}

} // namespace cli_detail

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

namespace cli_detail {

inline int replay(const std::string& manifest_path, const std::string& work_dir, std::ostream& out,
                  std::ostream& err)
{
    const RunManifest m = load_manifest(manifest_path);
    if (m.outputs.empty())
        throw InputError("manifest lists no outputs");
    const fs::path dir = work_dir.empty() ? fs::temp_directory_path() / ("hypershrink-replay-" + std::to_string(::getpid()))
                                          : fs::path(work_dir);
    fs::create_directories(dir);
    const fs::path primary = fs::path(m.config.value("out", std::string("out.csv"))).filename();
    std::vector<std::string> args{m.command};
    args.insert(args.end(), m.args.begin(), m.args.end());
    args.push_back("--out=" + (dir / primary).string());
    std::ostringstream sink;
    const int code = run_cli(args, sink, err);
    if (code != kExitOk && m.command != "reduce-selftest")
        return code;
    bool same = true;
    for (const auto& rec : m.outputs) {
        const fs::path produced = dir / fs::path(rec.path).filename();
        const std::string got = fs::exists(produced) ? hex64(fnv1a(read_file(produced))) : "missing";
        const bool ok = got == rec.fnv1a;
        out << (ok ? "identical " : "differs ") << fs::path(rec.path).filename().string() << "\n";
        same = same && ok;
    }
    return same ? kExitOk : kExitGate;
}

} // namespace cli_detail

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err)
{
    using namespace cli_detail;
    CLI::App app{"Shrinking targets for discrete geodesic flows on modular surfaces", std::string(kToolName)};
    app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--threads", g.threads, "worker threads (0: all cores); never changes results");
    app.add_option("--config", g.config, "key=value file; command-line flags take precedence");
    app.add_option("--out", g.out, "output CSV path; a manifest is written next to it");
    app.set_version_flag("--version", std::string(kToolVersion));

    CountArgs count_a;
    auto* count = app.add_subcommand("count", "lattice point counts N(t) on a grid");
    count->add_option("--group", count_a.group)->check(CLI::IsMember({"psl2z", "gamma2"}));
    count->add_option("--tmax", count_a.tmax);
    count->add_option("--spacing", count_a.spacing);

    ShellArgs shells_a;
    auto* shells = app.add_subcommand("shells", "shell census table against r e^{h i}");
    shells->add_option("--group", shells_a.group)->check(CLI::IsMember({"psl2z", "gamma2"}));
    shells->add_option("--h", shells_a.h);
    shells->add_option("--i-lo", shells_a.i_lo);
    shells->add_option("--i-hi", shells_a.i_hi);
    shells->add_option("--r", shells_a.r, "comma-separated radii");
    shells->add_option("--c4", shells_a.c4, "regime constant; 0 fits it from the counts");
    shells->add_option("--t0", shells_a.t0);
    shells->add_option("--factor", shells_a.factor);

    FitArgs fit_a;
    auto* fit = app.add_subcommand("fit", "fit the count plateau and error exponent");
    fit->add_option("--group", fit_a.group)->check(CLI::IsMember({"psl2z", "gamma2"}));
    fit->add_option("--t-lo", fit_a.t_lo);
    fit->add_option("--t-hi", fit_a.t_hi);

    TargetArgs target_a;
    auto* target = app.add_subcommand("target", "shrinking-target Monte Carlo");
    target->add_option("--group", target_a.group)->check(CLI::IsMember({"psl2z", "gamma2"}));
    target->add_option("--p0", target_a.p0, "target center x,y");
    target->add_option("--h", target_a.h);
    target->add_option("--radius", target_a.radius, "powerlaw:C,a | powerlog:C,b | constant:r | table:...");
    target->add_option("--n", target_a.n);
    target->add_option("--T", target_a.T);
    target->add_option("--trials", target_a.trials);
    target->add_option("--seed", target_a.seed);
    target->add_option("--checkpoints", target_a.checkpoints, "extra report horizons, comma-separated");
    target->add_option("--translate-radius", target_a.translate_radius);

    TwoBallArgs twoball_a;
    auto* twoball = app.add_subcommand("twoball", "two-ball trajectory measure in H^2");
    twoball->add_option("--o1", twoball_a.o1);
    twoball->add_option("--r1", twoball_a.r1);
    twoball->add_option("--r2", twoball_a.r2);
    twoball->add_option("--h", twoball_a.h);
    twoball->add_option("--d", twoball_a.d, "center distances, comma-separated");
    twoball->add_option("--samples", twoball_a.samples);
    twoball->add_option("--seed", twoball_a.seed);

    ConditionsArgs cond_a;
    auto* cond = app.add_subcommand("conditions", "radius-sequence conditions and bound sums");
    cond->add_option("--radius", cond_a.radius)->required();
    cond->add_option("--n", cond_a.n);
    cond->add_option("--cutoff", cond_a.cutoff);
    cond->add_option("--group", cond_a.group)->check(CLI::IsMember({"psl2z", "gamma2"}));
    cond->add_option("--C1", cond_a.C1);
    cond->add_option("--C2", cond_a.C2);
    cond->add_option("--smin", cond_a.s_min);
    cond->add_option("--smax", cond_a.s_max);
    cond->add_option("--which", cond_a.which);
    cond->add_option("--h", cond_a.h);
    cond->add_option("--R", cond_a.R, "0 uses min(i_V/4, 1, h) at the domain center");
    cond->add_option("--c4", cond_a.c4, "0 fits it from the counts");
    cond->add_option("--bound-T", cond_a.bound_T, "also evaluate the bound sums up to T");

    SelftestArgs self_a;
    auto* self = app.add_subcommand("reduce-selftest", "oracle checks for enumeration and reduction");
    self->add_option("--samples", self_a.samples);
    self->add_option("--seed", self_a.seed);
    self->add_option("--t-enum", self_a.t_enum);

    std::string manifest_path, work_dir;
    auto* rep = app.add_subcommand("replay", "re-run a manifest and compare outputs");
    rep->add_option("--manifest", manifest_path)->required();
    rep->add_option("--work-dir", work_dir);

    try {
        args = expand_config(std::move(args));
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (rep->parsed())
            return replay(manifest_path, work_dir, out, err);

        CLI::App* sub = app.get_subcommands().front();
        const Stopwatch clock;
        Outcome o;
        if (sub == count)
            o = run_count(count_a, g, err);
        else if (sub == shells)
            o = run_shells(shells_a, g, err);
        else if (sub == fit)
            o = run_fit(fit_a, g, err);
        else if (sub == target)
            o = run_target(target_a, g, err);
        else if (sub == twoball)
            o = run_twoball(twoball_a, g, err);
        else if (sub == cond)
            o = run_conditions(cond_a, g, err);
        else
            o = run_selftest(self_a, g, out);

        if (g.out.empty()) {
            for (const auto& e : o.emissions) {
                if (o.emissions.size() > 1)
                    out << "# " << (e.tag.empty() ? "output" : e.tag) << "\n";
                out << e.content;
            }
            return o.code;
        }
        RunManifest m;
        m.command = sub->get_name();
        m.args = resolved_args(*sub);
        m.config = config_json(m.args);
        m.config["out"] = g.out;
        m.seed = o.seed;
        m.cache_ids = o.cache_ids;
        for (const auto& e : o.emissions) {
            const fs::path p = tagged_path(g.out, e.tag);
            atomic_write(p, e.content);
            m.outputs.push_back({p.string(), hex64(fnv1a(e.content))});
        }
        if (o.emissions.empty()) {
            // self-test: record the verdict as the output
            const std::string verdict = o.code == kExitOk ? "pass\n" : "fail\n";
            atomic_write(g.out, verdict);
            m.outputs.push_back({g.out, hex64(fnv1a(verdict))});
        }
        m.wall_clock_seconds = clock.seconds();
        atomic_write(manifest_path_for(g.out), m.to_json().dump(2) + "\n");
        return o.code;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const RangeError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

} // namespace hypershrink
