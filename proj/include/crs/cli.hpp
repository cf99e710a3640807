#pragma once

// Command-line surface: argument parsing into a RunConfig, a pure
// execute(config) -> JSON report core, and rendering in json/csv/plain
// formats. Every report embeds its config echo, and executing a config
// rebuilt from that echo reproduces the report (all computations are
// deterministic for a fixed thread-count-independent reduction).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "crs/arith.hpp"
#include "crs/cohen_sum.hpp"
#include "crs/correlation.hpp"
#include "crs/expansion.hpp"
#include "crs/verify.hpp"

namespace crs::cli {

struct RunConfig {
    std::string command;
    std::map<std::string, std::string> params;
    std::string output_format = "json";  // json | csv | plain
    std::optional<std::string> output_path;
    unsigned thread_count = 0;  // 0: resolve from CRS_THREADS / hardware
    bool exact = false;
};

namespace detail {

inline const std::string& need(const RunConfig& cfg, const std::string& key) {
    auto it = cfg.params.find(key);
    if (it == cfg.params.end())
        throw DomainError(cfg.command + ": missing parameter '" + key + "'");
    return it->second;
}

inline std::string get_str(const RunConfig& cfg, const std::string& key,
                           const std::string& fallback) {
    auto it = cfg.params.find(key);
    return it == cfg.params.end() ? fallback : it->second;
}

inline std::uint64_t parse_u64(const std::string& v, const std::string& what) {
    try {
        std::size_t used = 0;
        std::uint64_t x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing junk");
        return x;
    } catch (const std::exception&) {
        throw DomainError("parameter '" + what + "': bad integer '" + v + "'");
    }
}

inline double parse_dbl(const std::string& v, const std::string& what) {
    try {
        std::size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing junk");
        return x;
    } catch (const std::exception&) {
        throw DomainError("parameter '" + what + "': bad number '" + v + "'");
    }
}

inline std::uint64_t get_u64(const RunConfig& cfg, const std::string& key) {
    return parse_u64(need(cfg, key), key);
}

inline std::uint64_t get_u64(const RunConfig& cfg, const std::string& key,
                             std::uint64_t fallback) {
    auto it = cfg.params.find(key);
    return it == cfg.params.end() ? fallback : parse_u64(it->second, key);
}

inline unsigned get_s(const RunConfig& cfg) {
    std::uint64_t s = get_u64(cfg, "s", 1);
    if (s == 0 || s > 16) throw DomainError("parameter 's': must lie in [1, 16]");
    return unsigned(s);
}

inline int get_int(const RunConfig& cfg, const std::string& key, int fallback) {
    auto it = cfg.params.find(key);
    if (it == cfg.params.end()) return fallback;
    try {
        std::size_t used = 0;
        int x = std::stoi(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("trailing junk");
        return x;
    } catch (const std::exception&) {
        throw DomainError("parameter '" + key + "': bad integer '" + it->second + "'");
    }
}

inline void check_allowed(const RunConfig& cfg, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : cfg.params)
        if (!allowed.count(key))
            throw DomainError(cfg.command + ": unknown parameter '" + key + "'");
}

inline nlohmann::json json_int(i128 v) {
    const i128 safe = i128(1) << 53;
    if (v < safe && v > -safe) return std::int64_t(v);
    return to_string_i128(v);
}

inline nlohmann::json approx_json(const RealApprox& a) {
    return {{"value", a.value}, {"abs_error_bound", a.abs_error_bound}};
}

inline std::vector<std::uint64_t> parse_checkpoints(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto comma = text.find(',', pos);
        std::string tok = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (!tok.empty()) out.push_back(parse_u64(tok, "checkpoints"));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

}  // namespace detail

inline nlohmann::json config_echo(const RunConfig& cfg) {
    nlohmann::json j;
    j["command"] = cfg.command;
    j["params"] = cfg.params;
    j["output_format"] = cfg.output_format;
    j["thread_count"] = resolve_threads(cfg.thread_count);
    j["exact"] = cfg.exact;
    if (cfg.output_path) j["output_path"] = *cfg.output_path;
    return j;
}

inline RunConfig config_from_echo(const nlohmann::json& report) {
    if (!report.contains("config")) throw ParseError("report has no config echo");
    const nlohmann::json& c = report.at("config");
    RunConfig cfg;
    cfg.command = c.at("command").get<std::string>();
    for (const auto& [key, value] : c.at("params").items())
        cfg.params[key] = value.get<std::string>();
    cfg.output_format = c.value("output_format", std::string("json"));
    cfg.thread_count = c.value("thread_count", 0u);
    cfg.exact = c.value("exact", false);
    if (c.contains("output_path")) cfg.output_path = c.at("output_path").get<std::string>();
    return cfg;
}

namespace detail {

inline nlohmann::json exec_crs_eval(const RunConfig& cfg) {
    check_allowed(cfg, {"r", "s", "n"});
    std::uint64_t r = get_u64(cfg, "r");
    unsigned s = get_s(cfg);
    std::uint64_t n = get_u64(cfg, "n");
    nlohmann::json j;
    j["value"] = json_int(crs_exact(r, s, n));
    return j;
}

inline nlohmann::json exec_crs_table(const RunConfig& cfg) {
    check_allowed(cfg, {"r-max", "s", "n-max"});
    std::uint64_t r_max = get_u64(cfg, "r-max");
    unsigned s = get_s(cfg);
    std::uint64_t n_max = get_u64(cfg, "n-max");
    if (r_max == 0) throw DomainError("parameter 'r-max': must be >= 1");
    if (r_max * (n_max + 1) > 2000000)
        throw DomainError("crs.table: table larger than 2e6 cells");
    nlohmann::json rows = nlohmann::json::array();
    for (std::uint64_t r = 1; r <= r_max; ++r) {
        CrsPeriod period(r, s);
        for (std::uint64_t n = 0; n <= n_max; ++n)
            rows.push_back({{"r", r}, {"n", n}, {"value", period.at(n)}});
    }
    nlohmann::json j;
    j["rows"] = std::move(rows);
    return j;
}

inline nlohmann::json exec_totient(const RunConfig& cfg) {
    check_allowed(cfg, {"kind", "s", "n", "t"});
    const std::string& kind = need(cfg, "kind");
    unsigned s = get_s(cfg);
    std::uint64_t n = get_u64(cfg, "n");
    if (kind != "sigma" && cfg.params.count("t"))
        throw DomainError("parameter 't' only applies to --kind sigma");
    nlohmann::json j;
    if (kind == "jordan") {
        j["value"] = json_int(jordan_totient(s, n));
    } else if (kind == "klee") {
        j["value"] = json_int(i128(klee_phi(s, n)));
    } else if (kind == "tau-s") {
        j["value"] = json_int(i128(tau_s(s, n)));
    } else if (kind == "sigma") {
        Rational v = sigma(get_int(cfg, "t", 1), n);
        j["value"] = v.to_double();
        if (cfg.exact) j["rational"] = v.str();
    } else {
        throw DomainError("parameter 'kind': unknown kind '" + kind + "'");
    }
    return j;
}

inline CoefficientFamily family_from(const RunConfig& cfg) {
    const std::string& family = need(cfg, "family");
    int k = get_int(cfg, "k", 1);
    unsigned s = get_s(cfg);
    if (family == "sigma") return CoefficientFamily::sigma_family(k, s);
    if (family == "jordan") return CoefficientFamily::jordan_family(k, s);
    throw DomainError("parameter 'family': expected sigma or jordan, got '" + family + "'");
}

inline nlohmann::json exec_expand_eval(const RunConfig& cfg) {
    check_allowed(cfg, {"family", "k", "s", "n", "rank"});
    CoefficientFamily fam = family_from(cfg);
    std::uint64_t n = get_u64(cfg, "n");
    std::uint64_t rank = get_u64(cfg, "rank");
    TruncatedEvaluation ev = eval_truncated(fam, n, rank);
    nlohmann::json j;
    j["n"] = ev.n;
    j["rank"] = ev.rank;
    j["partial_sum"] = ev.partial_sum;
    j["tail_bound"] = ev.tail_bound ? nlohmann::json(*ev.tail_bound) : nlohmann::json();
    return j;
}

inline nlohmann::json exec_expand_coeffs(const RunConfig& cfg) {
    check_allowed(cfg, {"family", "k", "s", "r-max"});
    CoefficientFamily fam = family_from(cfg);
    std::uint64_t r_max = get_u64(cfg, "r-max");
    if (r_max == 0 || r_max > 100000)
        throw DomainError("parameter 'r-max': must lie in [1, 1e5]");
    nlohmann::json coeffs = nlohmann::json::array();
    for (std::uint64_t r = 1; r <= r_max; ++r) {
        nlohmann::json row;
        row["r"] = r;
        row["value"] = fam.coeff(r).value;
        if (cfg.exact) row["rational"] = fam.coeff_rational(r).str();
        coeffs.push_back(std::move(row));
    }
    nlohmann::json j;
    j["prefactor"] = approx_json(fam.prefactor());
    j["coefficients"] = std::move(coeffs);
    return j;
}

inline nlohmann::json exec_expand_extract(const RunConfig& cfg) {
    check_allowed(cfg, {"input", "s", "r", "x"});
    const std::string& input = need(cfg, "input");
    unsigned s = get_s(cfg);
    std::uint64_t r = get_u64(cfg, "r");
    std::vector<double> values = read_series_csv(input);
    std::uint64_t x = get_u64(cfg, "x", values.size() - 1);
    double coeff = extract_coeff(values, r, s, x, cfg.thread_count);
    nlohmann::json j;
    j["r"] = r;
    j["s"] = s;
    j["x"] = x;
    j["coefficient"] = coeff;
    return j;
}

// The predicted constant is computable when both sides are the built-in
// closures with integer exponents (the families the asymptotic theorems
// cover); anything else correlates against predicted = 1.
inline std::optional<CoefficientFamily> theorem_family(const FunctionDescriptor& d,
                                                       unsigned s) {
    if (d.kind != FunctionDescriptor::Kind::sigma &&
        d.kind != FunctionDescriptor::Kind::jordan)
        return std::nullopt;
    if (d.a < 1.0 || d.a > 60.0 || d.a != std::floor(d.a)) return std::nullopt;
    int k = int(d.a);
    return d.kind == FunctionDescriptor::Kind::sigma
               ? CoefficientFamily::sigma_family(k, s)
               : CoefficientFamily::jordan_family(k, s);
}

inline nlohmann::json exec_correlate(const RunConfig& cfg) {
    check_allowed(cfg, {"f", "g", "h", "N", "s", "checkpoints", "rank"});
    FunctionDescriptor df = FunctionDescriptor::parse(need(cfg, "f"));
    FunctionDescriptor dg = FunctionDescriptor::parse(need(cfg, "g"));
    std::uint64_t h = get_u64(cfg, "h", 0);
    std::uint64_t N = get_u64(cfg, "N");
    unsigned s = get_s(cfg);
    std::uint64_t rank = get_u64(cfg, "rank", 2000);
    auto checkpoints = parse_checkpoints(get_str(cfg, "checkpoints", ""));

    std::optional<RealApprox> predicted;
    auto ff = theorem_family(df, s);
    auto fg = theorem_family(dg, s);
    if (ff && fg) predicted = predicted_shifted(*ff, *fg, h, rank);

    auto fv = tabulate(df, s, N);
    auto gv = tabulate(dg, s, N + h);
    CorrelationReport rep = correlate(fv, gv, h, N, checkpoints,
                                      predicted.value_or(RealApprox::exact(1.0)),
                                      cfg.thread_count);
    nlohmann::json j;
    j["theorem"] = h == 0 ? "diagonal-correlation" : "shifted-correlation";
    j["N"] = rep.N;
    j["h"] = rep.h;
    j["empirical"] = rep.empirical;
    j["predicted"] = predicted ? approx_json(*predicted) : nlohmann::json();
    j["ratio"] = rep.ratio;
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& p : rep.trace) trace.push_back({{"N", p.n}, {"ratio", p.ratio}});
    j["trace"] = std::move(trace);
    return j;
}

inline nlohmann::json exec_constants(const RunConfig& cfg) {
    check_allowed(cfg, {"which", "s", "a", "b", "m", "P"});
    const std::string& which = need(cfg, "which");
    unsigned s = get_s(cfg);
    double a = parse_dbl(need(cfg, "a"), "a");
    double b = parse_dbl(need(cfg, "b"), "b");
    std::uint64_t m = get_u64(cfg, "m", 1);
    nlohmann::json j;
    j["which"] = which;
    if (which == "cor1") {
        if (cfg.params.count("P")) throw DomainError("parameter 'P' only applies to cor2");
        j.update(approx_json(sigma_correlation_constant(s, a, b, m)));
    } else if (which == "cor2") {
        if (a != std::floor(a) || b != std::floor(b))
            throw DomainError("cor2 requires integer exponents a and b");
        std::uint64_t P = get_u64(cfg, "P", 100000);
        j.update(approx_json(jordan_correlation_constant(s, int(a), int(b), m, P)));
    } else {
        throw DomainError("parameter 'which': expected cor1 or cor2, got '" + which + "'");
    }
    return j;
}

inline std::vector<std::string> resolve_suite(const std::string& suite) {
    static const std::map<std::string, std::vector<std::string>> aliases = {
        {"oracle", {"oracle-equivalence"}},
        {"identities", {"exact-identities"}},
        {"lemmas", {"lemma-grids"}},
        {"theorem1", {"diagonal-correlation"}},
        {"theorem2", {"shifted-correlation"}},
        {"cor1", {"shifted-correlation"}},
        {"cor2", {"jordan-correlation"}},
        {"theorem3", {"shifted-extraction"}},
        {"sigma-expansion", {"sigma-expansion"}},
        {"jordan-expansion", {"jordan-expansion"}},
        {"extraction", {"coefficient-extraction"}},
    };
    if (suite == "all") {
        std::vector<std::string> names;
        for (const NamedCheck& check : acceptance_checks()) names.push_back(check.name);
        return names;
    }
    auto it = aliases.find(suite);
    if (it != aliases.end()) return it->second;
    for (const NamedCheck& check : acceptance_checks())
        if (suite == check.name) return {suite};
    throw DomainError("parameter 'suite': unknown suite '" + suite + "'");
}

inline void write_default_grid_records(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot open '" + path + "' for writing");
    std::vector<BoundCheckRecord> all;
    auto append = [&](const char* lemma, const LemmaGrid& grid) {
        auto recs = verify_lemma_bounds(lemma, grid);
        all.insert(all.end(), recs.begin(), recs.end());
    };
    LemmaGrid g1;
    g1.N_values = {100, 1000, 10000};
    append("lem1", g1);
    LemmaGrid g2;
    g2.h_values = {0, 1, 5};
    g2.N_values = {100, 1000, 10000};
    append("lem2", g2);
    LemmaGrid g3;
    g3.h_values = {1, 2, 5};
    g3.N_values = {100, 1000};
    append("lem3", g3);
    LemmaGrid g4;
    g4.N_values = {100, 1000};
    append("lem4", g4);
    write_bound_records_csv(out, all);
}

inline nlohmann::json exec_verify(const RunConfig& cfg) {
    check_allowed(cfg, {"suite", "records"});
    const std::string& suite = need(cfg, "suite");
    std::vector<std::string> names = resolve_suite(suite);
    if (cfg.params.count("records")) {
        bool has_lemmas = false;
        for (const auto& name : names) has_lemmas = has_lemmas || name == "lemma-grids";
        if (!has_lemmas)
            throw DomainError("--records requires a suite that runs the lemma grids");
        write_default_grid_records(cfg.params.at("records"));
    }
    nlohmann::json results = nlohmann::json::array();
    bool all_passed = true;
    for (const auto& name : names) {
        CheckResult r = run_check(name);
        all_passed = all_passed && r.passed;
        results.push_back({{"name", r.name},
                           {"passed", r.passed},
                           {"seconds", r.seconds},
                           {"detail", r.detail}});
    }
    nlohmann::json j;
    j["suite"] = suite;
    j["results"] = std::move(results);
    j["passed"] = all_passed;
    return j;
}

}  // namespace detail

// Pure command core: no process concerns, throws crs errors on bad input.
inline nlohmann::json execute(const RunConfig& cfg) {
    nlohmann::json report;
    if (cfg.command == "crs.eval") {
        report = detail::exec_crs_eval(cfg);
    } else if (cfg.command == "crs.table") {
        report = detail::exec_crs_table(cfg);
    } else if (cfg.command == "totient") {
        report = detail::exec_totient(cfg);
    } else if (cfg.command == "expand.eval") {
        report = detail::exec_expand_eval(cfg);
    } else if (cfg.command == "expand.coeffs") {
        report = detail::exec_expand_coeffs(cfg);
    } else if (cfg.command == "expand.extract") {
        report = detail::exec_expand_extract(cfg);
    } else if (cfg.command == "correlate") {
        report = detail::exec_correlate(cfg);
    } else if (cfg.command == "constants") {
        report = detail::exec_constants(cfg);
    } else if (cfg.command == "verify") {
        report = detail::exec_verify(cfg);
    } else {
        throw DomainError("unknown command '" + cfg.command + "'");
    }
    report["config"] = config_echo(cfg);
    return report;
}

namespace detail {

inline std::string render_csv(const RunConfig& cfg, const nlohmann::json& report) {
    std::ostringstream out;
    out << std::setprecision(17);
    if (cfg.command == "crs.table") {
        out << "r,n,value\n";
        for (const auto& row : report.at("rows"))
            out << row.at("r").get<std::uint64_t>() << ',' << row.at("n").get<std::uint64_t>()
                << ',' << row.at("value").get<std::int64_t>() << "\n";
        return out.str();
    }
    if (cfg.command == "expand.coeffs") {
        out << (cfg.exact ? "r,value,rational\n" : "r,value\n");
        for (const auto& row : report.at("coefficients")) {
            out << row.at("r").get<std::uint64_t>() << ',' << row.at("value").get<double>();
            if (cfg.exact) out << ',' << row.at("rational").get<std::string>();
            out << "\n";
        }
        return out.str();
    }
    if (cfg.command == "correlate") {
        out << "N,ratio\n";
        for (const auto& p : report.at("trace"))
            out << p.at("N").get<std::uint64_t>() << ',' << p.at("ratio").get<double>()
                << "\n";
        return out.str();
    }
    throw DomainError("csv output is not available for " + cfg.command);
}

inline std::string render_plain(const RunConfig& cfg, const nlohmann::json& report) {
    std::ostringstream out;
    out << std::setprecision(17);
    if (report.contains("value")) {
        const auto& v = report.at("value");
        if (v.is_string())
            out << v.get<std::string>() << "\n";
        else if (v.is_number_integer())
            out << v.get<std::int64_t>() << "\n";
        else
            out << v.get<double>() << "\n";
        return out.str();
    }
    if (cfg.command == "expand.eval") {
        out << report.at("partial_sum").get<double>();
        if (!report.at("tail_bound").is_null())
            out << " (tail bound " << report.at("tail_bound").get<double>() << ")";
        out << "\n";
        return out.str();
    }
    if (cfg.command == "expand.extract") {
        out << report.at("coefficient").get<double>() << "\n";
        return out.str();
    }
    if (cfg.command == "correlate") {
        out << "empirical " << report.at("empirical").get<double>() << ", ratio "
            << report.at("ratio").get<double>() << "\n";
        for (const auto& p : report.at("trace"))
            out << "  N=" << p.at("N").get<std::uint64_t>() << " ratio "
                << p.at("ratio").get<double>() << "\n";
        return out.str();
    }
    if (cfg.command == "verify") {
        for (const auto& r : report.at("results"))
            out << (r.at("passed").get<bool>() ? "[PASS] " : "[FAIL] ")
                << r.at("name").get<std::string>() << "  " << r.at("detail").get<std::string>()
                << "\n";
        return out.str();
    }
    return report.dump(2) + "\n";
}

inline void emit_error(const std::string& type, const std::string& message) {
    nlohmann::json err;
    err["error"] = {{"type", type}, {"message", message}};
    std::cerr << err.dump() << "\n";
}

}  // namespace detail

// Parses argv into a RunConfig without executing anything. Throws
// CLI::ParseError derivatives for usage problems; help requests set
// help_requested and leave the config incomplete.
inline RunConfig parse_args(const std::vector<std::string>& args, bool& help_requested) {
    RunConfig cfg;
    help_requested = false;

    CLI::App app{"Cohen-Ramanujan sums, expansions, and shifted-correlation toolkit"};
    app.name("crstool");
    app.require_subcommand(1);

    std::string format = "json", output, records;
    unsigned threads = 0;
    bool exact = false;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--format", format, "Output format: json, csv, or plain")
            ->check(CLI::IsMember({"json", "csv", "plain"}));
        cmd->add_option("--output", output, "Also write the rendered report to this file");
        cmd->add_option("--threads", threads,
                        "Worker threads (0: CRS_THREADS env or hardware)");
        cmd->add_flag("--exact", exact, "Include exact rationals as p/q strings");
    };
    auto set = [&cfg](const std::string& command,
                      std::vector<std::pair<std::string, std::string>> params) {
        cfg.command = command;
        cfg.params.clear();
        for (auto& [key, value] : params) cfg.params.emplace(key, value);
    };

    std::uint64_t r = 1, n = 0, r_max = 10, n_max = 20, h = 0, N = 1000, x = 0, m = 1;
    std::uint64_t rank = 100, P = 100000;
    unsigned s = 1;
    int k = 1, t = 1;
    double a = 2.0, b = 2.0;
    std::string kind, family, input, f_desc, g_desc, checkpoints, which, suite;

    CLI::App* crs_cmd = app.add_subcommand("crs", "Evaluate Cohen-Ramanujan sums");
    crs_cmd->require_subcommand(1);
    CLI::App* crs_eval = crs_cmd->add_subcommand("eval", "One value c_r^s(n)");
    crs_eval->add_option("--r", r, "Rank r")->required();
    crs_eval->add_option("--s", s, "Power s (default 1)");
    crs_eval->add_option("--n", n, "Argument n")->required();
    add_common(crs_eval);
    crs_eval->callback([&] {
        set("crs.eval",
            {{"r", std::to_string(r)}, {"s", std::to_string(s)}, {"n", std::to_string(n)}});
    });
    CLI::App* crs_table = crs_cmd->add_subcommand("table", "Values for r <= r-max, n <= n-max");
    crs_table->add_option("--r-max", r_max, "Largest rank")->required();
    crs_table->add_option("--s", s, "Power s (default 1)");
    crs_table->add_option("--n-max", n_max, "Largest argument")->required();
    add_common(crs_table);
    crs_table->callback([&] {
        set("crs.table", {{"r-max", std::to_string(r_max)},
                          {"s", std::to_string(s)},
                          {"n-max", std::to_string(n_max)}});
    });

    CLI::App* totient = app.add_subcommand("totient", "Arithmetic functions");
    totient->add_option("--kind", kind, "jordan, klee, tau-s, or sigma")
        ->required()
        ->check(CLI::IsMember({"jordan", "klee", "tau-s", "sigma"}));
    totient->add_option("--s", s, "Power s (default 1)");
    totient->add_option("--n", n, "Argument n")->required();
    totient->add_option("--t", t, "Divisor-power exponent (sigma only)");
    add_common(totient);
    totient->callback([&] {
        set("totient", {{"kind", kind}, {"s", std::to_string(s)}, {"n", std::to_string(n)}});
        if (totient->count("--t")) cfg.params["t"] = std::to_string(t);
    });

    CLI::App* expand = app.add_subcommand("expand", "Coefficient expansions");
    expand->require_subcommand(1);
    CLI::App* ex_eval = expand->add_subcommand("eval", "Truncated series value");
    ex_eval->add_option("--family", family, "sigma or jordan")->required();
    ex_eval->add_option("--k", k, "Family exponent k (default 1)");
    ex_eval->add_option("--s", s, "Power s (default 1)");
    ex_eval->add_option("--n", n, "Argument n")->required();
    ex_eval->add_option("--rank", rank, "Truncation rank")->required();
    add_common(ex_eval);
    ex_eval->callback([&] {
        set("expand.eval", {{"family", family},
                            {"k", std::to_string(k)},
                            {"s", std::to_string(s)},
                            {"n", std::to_string(n)},
                            {"rank", std::to_string(rank)}});
    });
    CLI::App* ex_coeffs = expand->add_subcommand("coeffs", "Coefficient table");
    ex_coeffs->add_option("--family", family, "sigma or jordan")->required();
    ex_coeffs->add_option("--k", k, "Family exponent k (default 1)");
    ex_coeffs->add_option("--s", s, "Power s (default 1)");
    ex_coeffs->add_option("--r-max", r_max, "Largest rank")->required();
    add_common(ex_coeffs);
    ex_coeffs->callback([&] {
        set("expand.coeffs", {{"family", family},
                              {"k", std::to_string(k)},
                              {"s", std::to_string(s)},
                              {"r-max", std::to_string(r_max)}});
    });
    CLI::App* ex_extract = expand->add_subcommand("extract", "Coefficient from a CSV series");
    ex_extract->add_option("--input", input, "CSV series file (n,value)")->required();
    ex_extract->add_option("--s", s, "Power s (default 1)");
    ex_extract->add_option("--r", r, "Rank to extract")->required();
    ex_extract->add_option("--x", x, "Sample cutoff (default: series length)");
    add_common(ex_extract);
    ex_extract->callback([&] {
        set("expand.extract",
            {{"input", input}, {"s", std::to_string(s)}, {"r", std::to_string(r)}});
        if (ex_extract->count("--x")) cfg.params["x"] = std::to_string(x);
    });

    CLI::App* correlate = app.add_subcommand("correlate", "Shifted convolution sums");
    // --h is the shift, so help stays reachable through --help alone here.
    correlate->set_help_flag("--help", "Print this help message and exit");
    correlate->add_option("--f", f_desc, "Left function descriptor")->required();
    correlate->add_option("--g", g_desc, "Right function descriptor")->required();
    correlate->add_option("--h", h, "Shift (default 0)");
    correlate->add_option("--N", N, "Sample count")->required();
    correlate->add_option("--s", s, "Power s (default 1)");
    correlate->add_option("--checkpoints", checkpoints, "Comma-separated trace points");
    correlate->add_option("--rank", rank, "Rank for the predicted constant (default 2000)");
    add_common(correlate);
    correlate->callback([&] {
        set("correlate", {{"f", f_desc},
                          {"g", g_desc},
                          {"h", std::to_string(h)},
                          {"N", std::to_string(N)},
                          {"s", std::to_string(s)},
                          {"rank", std::to_string(correlate->count("--rank") ? rank : 2000)}});
        if (!checkpoints.empty()) cfg.params["checkpoints"] = checkpoints;
    });

    CLI::App* constants = app.add_subcommand("constants", "Closed-form correlation constants");
    constants->add_option("--which", which, "cor1 or cor2")
        ->required()
        ->check(CLI::IsMember({"cor1", "cor2"}));
    constants->add_option("--s", s, "Power s (default 1)");
    constants->add_option("--a", a, "Left exponent")->required();
    constants->add_option("--b", b, "Right exponent")->required();
    constants->add_option("--m", m, "Shift root m (default 1)");
    constants->add_option("--P", P, "Euler-product prime cutoff (cor2, default 1e5)");
    add_common(constants);
    constants->callback([&] {
        std::ostringstream va, vb;
        va << a;
        vb << b;
        set("constants", {{"which", which},
                          {"s", std::to_string(s)},
                          {"a", va.str()},
                          {"b", vb.str()},
                          {"m", std::to_string(m)}});
        if (constants->count("--P")) cfg.params["P"] = std::to_string(P);
    });

    CLI::App* verify = app.add_subcommand("verify", "Acceptance checks");
    verify->add_option("--suite", suite,
                       "oracle, identities, lemmas, theorem1, theorem2, cor1, cor2, "
                       "theorem3, sigma-expansion, jordan-expansion, extraction, all, "
                       "or a check name")
        ->required();
    verify->add_option("--records", records,
                       "Write the lemma-grid records CSV to this file (lemma suites only)");
    add_common(verify);
    verify->callback([&] {
        set("verify", {{"suite", suite}});
        if (!records.empty()) cfg.params["records"] = records;
    });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        help_requested = true;
        return cfg;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e);
        help_requested = true;
        return cfg;
    }

    cfg.output_format = format;
    if (!output.empty()) cfg.output_path = output;
    cfg.thread_count = threads;
    cfg.exact = exact;
    return cfg;
}

inline int run(const std::vector<std::string>& args) {
    RunConfig cfg;
    try {
        bool help_requested = false;
        cfg = parse_args(args, help_requested);
        if (help_requested) return 0;
    } catch (const CLI::ParseError& e) {
        detail::emit_error("UsageError", e.what());
        return 2;
    }

    try {
        nlohmann::json report = execute(cfg);
        std::string payload;
        if (cfg.output_format == "json")
            payload = report.dump(2) + "\n";
        else if (cfg.output_format == "csv")
            payload = detail::render_csv(cfg, report);
        else
            payload = detail::render_plain(cfg, report);
        std::cout << payload;
        if (cfg.output_path) {
            std::ofstream out(*cfg.output_path);
            if (!out) throw DomainError("cannot open '" + *cfg.output_path + "' for writing");
            out << payload;
        }
        if (cfg.command == "verify" && !report.at("passed").get<bool>()) return 1;
        return 0;
    } catch (const OverflowError& e) {
        detail::emit_error("OverflowError", e.what());
    } catch (const ToleranceError& e) {
        detail::emit_error("ToleranceError", e.what());
    } catch (const ParseError& e) {
        detail::emit_error("ParseError", e.what());
    } catch (const DomainError& e) {
        detail::emit_error("DomainError", e.what());
    } catch (const Error& e) {
        detail::emit_error("Error", e.what());
    } catch (const std::exception& e) {
        detail::emit_error("InternalError", e.what());
    }
    return 1;
}

inline int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace crs::cli
