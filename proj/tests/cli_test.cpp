#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "crs/cli.hpp"
#include "crs/io.hpp"
#include "crs/zeta.hpp"

namespace {

using crs::cli::RunConfig;
using nlohmann::json;

RunConfig make_config(std::string command,
                      std::vector<std::pair<std::string, std::string>> params) {
    RunConfig cfg;
    cfg.command = std::move(command);
    for (auto& [key, value] : params) cfg.params.emplace(key, value);
    return cfg;
}

// Captures one std stream for the duration of a run() call.
class StreamCapture {
  public:
    explicit StreamCapture(std::ostream& stream) : stream_(stream), old_(stream.rdbuf()) {
        stream_.rdbuf(buffer_.rdbuf());
    }
    ~StreamCapture() { stream_.rdbuf(old_); }
    std::string text() const { return buffer_.str(); }

  private:
    std::ostream& stream_;
    std::streambuf* old_;
    std::ostringstream buffer_;
};

TEST(CliParse, ArgumentsMapToCanonicalConfigs) {
    bool help = false;
    RunConfig cfg =
        crs::cli::parse_args({"crs", "eval", "--r", "3", "--s", "2", "--n", "0"}, help);
    EXPECT_FALSE(help);
    EXPECT_EQ(cfg.command, "crs.eval");
    EXPECT_EQ(cfg.params.at("r"), "3");
    EXPECT_EQ(cfg.params.at("s"), "2");
    EXPECT_EQ(cfg.params.at("n"), "0");
    EXPECT_EQ(cfg.output_format, "json");
    EXPECT_FALSE(cfg.output_path.has_value());
    EXPECT_FALSE(cfg.exact);

    // Defaults are canonicalized into the params map.
    cfg = crs::cli::parse_args({"crs", "eval", "--r", "3", "--n", "0"}, help);
    EXPECT_EQ(cfg.params.at("s"), "1");

    cfg = crs::cli::parse_args(
        {"totient", "--kind", "sigma", "--t", "-2", "--n", "12", "--exact"}, help);
    EXPECT_EQ(cfg.command, "totient");
    EXPECT_EQ(cfg.params.at("t"), "-2");
    EXPECT_TRUE(cfg.exact);

    // --t is only echoed when given, so a jordan run has no stray key.
    cfg = crs::cli::parse_args({"totient", "--kind", "jordan", "--n", "6"}, help);
    EXPECT_EQ(cfg.params.count("t"), 0u);

    cfg = crs::cli::parse_args({"correlate", "--f", "sigma:a=2", "--g", "one", "--N", "100"},
                               help);
    EXPECT_EQ(cfg.command, "correlate");
    EXPECT_EQ(cfg.params.at("h"), "0");
    EXPECT_EQ(cfg.params.at("rank"), "2000");
    EXPECT_EQ(cfg.params.count("checkpoints"), 0u);

    cfg = crs::cli::parse_args({"expand", "extract", "--input", "/x.csv", "--r", "2"}, help);
    EXPECT_EQ(cfg.command, "expand.extract");
    EXPECT_EQ(cfg.params.count("x"), 0u);

    cfg = crs::cli::parse_args({"verify", "--suite", "lemmas", "--records", "/tmp/r.csv",
                                "--format", "csv", "--threads", "3", "--output", "/tmp/o"},
                               help);
    EXPECT_EQ(cfg.params.at("records"), "/tmp/r.csv");
    EXPECT_EQ(cfg.output_format, "csv");
    EXPECT_EQ(cfg.thread_count, 3u);
    ASSERT_TRUE(cfg.output_path.has_value());
    EXPECT_EQ(*cfg.output_path, "/tmp/o");

    EXPECT_THROW(crs::cli::parse_args({"bogus"}, help), CLI::ParseError);
    EXPECT_THROW(crs::cli::parse_args({"crs", "eval", "--r", "3"}, help), CLI::ParseError);
    EXPECT_THROW(crs::cli::parse_args({"crs", "eval", "--r", "3", "--n", "0", "--wat"}, help),
                 CLI::ParseError);
    EXPECT_THROW(
        crs::cli::parse_args({"totient", "--kind", "primes", "--n", "1"}, help),
        CLI::ParseError);

    StreamCapture out(std::cout);
    RunConfig ignored = crs::cli::parse_args({"--help"}, help);
    EXPECT_TRUE(help);
    EXPECT_NE(out.text().find("crstool"), std::string::npos);
}

TEST(CliExecute, CommandsProduceDocumentedValues) {
    json rep = crs::cli::execute(make_config("crs.eval", {{"r", "3"}, {"s", "2"}, {"n", "0"}}));
    EXPECT_EQ(rep.at("value").get<std::int64_t>(), 8);
    EXPECT_EQ(rep.at("config").at("command").get<std::string>(), "crs.eval");

    rep = crs::cli::execute(make_config("crs.eval", {{"r", "6"}, {"s", "1"}, {"n", "3"}}));
    EXPECT_EQ(rep.at("value").get<std::int64_t>(), -2);

    rep = crs::cli::execute(
        make_config("crs.table", {{"r-max", "2"}, {"s", "1"}, {"n-max", "2"}}));
    ASSERT_EQ(rep.at("rows").size(), 6u);
    EXPECT_EQ(rep.at("rows")[0].at("value").get<std::int64_t>(), 1);   // c_1(0)
    EXPECT_EQ(rep.at("rows")[4].at("value").get<std::int64_t>(), -1);  // c_2(1)

    rep = crs::cli::execute(
        make_config("totient", {{"kind", "jordan"}, {"s", "1"}, {"n", "6"}}));
    EXPECT_EQ(rep.at("value").get<std::int64_t>(), 2);

    // J_4(100000) needs more than 53 bits, so it arrives as a string.
    rep = crs::cli::execute(
        make_config("totient", {{"kind", "jordan"}, {"s", "4"}, {"n", "100000"}}));
    EXPECT_EQ(rep.at("value").get<std::string>(), "93600000000000000000");

    rep = crs::cli::execute(make_config("totient", {{"kind", "klee"}, {"s", "2"}, {"n", "4"}}));
    EXPECT_EQ(rep.at("value").get<std::int64_t>(), 3);

    rep = crs::cli::execute(
        make_config("totient", {{"kind", "tau-s"}, {"s", "2"}, {"n", "16"}}));
    EXPECT_EQ(rep.at("value").get<std::int64_t>(), 3);

    RunConfig cfg = make_config("totient", {{"kind", "sigma"}, {"t", "-2"}, {"n", "12"}});
    cfg.exact = true;
    rep = crs::cli::execute(cfg);
    EXPECT_EQ(rep.at("rational").get<std::string>(), "35/24");
    EXPECT_NEAR(rep.at("value").get<double>(), 35.0 / 24.0, 1e-15);

    rep = crs::cli::execute(make_config(
        "constants", {{"which", "cor1"}, {"s", "1"}, {"a", "2"}, {"b", "2"}, {"m", "1"}}));
    double base = rep.at("value").get<double>();
    EXPECT_NEAR(base, 1.4203083034891932, 1e-12);
    rep = crs::cli::execute(make_config(
        "constants", {{"which", "cor1"}, {"s", "1"}, {"a", "2"}, {"b", "2"}, {"m", "2"}}));
    EXPECT_NEAR(rep.at("value").get<double>() / base, 33.0 / 32.0, 1e-12);

    rep = crs::cli::execute(make_config(
        "constants", {{"which", "cor2"}, {"s", "2"}, {"a", "3"}, {"b", "3"}, {"m", "2"}}));
    double shifted = rep.at("value").get<double>();
    rep = crs::cli::execute(make_config(
        "constants", {{"which", "cor2"}, {"s", "2"}, {"a", "3"}, {"b", "3"}, {"m", "1"}}));
    EXPECT_NEAR(shifted / rep.at("value").get<double>(), 241.0 / 240.0, 1e-9);
}

TEST(CliExecute, ExpansionCommandsMatchLibraryResults) {
    json rep = crs::cli::execute(make_config(
        "expand.eval",
        {{"family", "sigma"}, {"k", "2"}, {"s", "1"}, {"n", "10"}, {"rank", "500"}}));
    ASSERT_FALSE(rep.at("tail_bound").is_null());
    EXPECT_NEAR(rep.at("partial_sum").get<double>(), 1.3, rep.at("tail_bound").get<double>());

    RunConfig cfg = make_config(
        "expand.coeffs", {{"family", "jordan"}, {"k", "1"}, {"s", "2"}, {"r-max", "4"}});
    cfg.exact = true;
    rep = crs::cli::execute(cfg);
    EXPECT_NEAR(rep.at("prefactor").at("value").get<double>(), 1.0 / crs::zeta(3.0).value,
                1e-12);
    const json& coeffs = rep.at("coefficients");
    ASSERT_EQ(coeffs.size(), 4u);
    EXPECT_EQ(coeffs[0].at("rational").get<std::string>(), "1");
    EXPECT_EQ(coeffs[1].at("rational").get<std::string>(), "-1/7");
    EXPECT_EQ(coeffs[2].at("rational").get<std::string>(), "-1/26");
    EXPECT_EQ(coeffs[3].at("rational").get<std::string>(), "0");

    // A series that is exactly c_4(n) extracts coefficient 1 at rank 4.
    std::string path = ::testing::TempDir() + "cli_extract.csv";
    crs::CrsPeriod period(4, 1);
    std::vector<double> vals{0.0};
    for (std::uint64_t n = 1; n <= 500; ++n) vals.push_back(double(period.at(n)));
    crs::write_series_csv(path, vals);
    rep = crs::cli::execute(
        make_config("expand.extract", {{"input", path}, {"s", "1"}, {"r", "4"}}));
    EXPECT_EQ(rep.at("x").get<std::uint64_t>(), 500u);
    EXPECT_NEAR(rep.at("coefficient").get<double>(), 1.0, 1e-12);
}

TEST(CliExecute, CorrelateReportsPredictionOnlyForTheoremFamilies) {
    json rep = crs::cli::execute(make_config("correlate", {{"f", "sigma:a=2"},
                                                          {"g", "sigma:a=2"},
                                                          {"h", "1"},
                                                          {"N", "20000"},
                                                          {"s", "1"},
                                                          {"rank", "2000"},
                                                          {"checkpoints", "5000,10000"}}));
    EXPECT_EQ(rep.at("theorem").get<std::string>(), "shifted-correlation");
    EXPECT_NEAR(rep.at("predicted").at("value").get<double>(), 1.4203083034891932, 1e-12);
    EXPECT_NEAR(rep.at("ratio").get<double>(), 1.0, 1e-3);
    ASSERT_EQ(rep.at("trace").size(), 3u);
    EXPECT_EQ(rep.at("trace")[2].at("N").get<std::uint64_t>(), 20000u);

    // Descriptors outside the theorem families report no prediction and
    // normalize the ratio by N alone.
    rep = crs::cli::execute(make_config(
        "correlate", {{"f", "one"}, {"g", "one"}, {"h", "5"}, {"N", "50"}, {"s", "1"}}));
    EXPECT_EQ(rep.at("theorem").get<std::string>(), "shifted-correlation");
    EXPECT_TRUE(rep.at("predicted").is_null());
    EXPECT_DOUBLE_EQ(rep.at("empirical").get<double>(), 50.0);
    EXPECT_DOUBLE_EQ(rep.at("ratio").get<double>(), 1.0);

    rep = crs::cli::execute(make_config(
        "correlate", {{"f", "crs:r=2"}, {"g", "crs:r=2"}, {"h", "0"}, {"N", "40"}}));
    EXPECT_EQ(rep.at("theorem").get<std::string>(), "diagonal-correlation");
    EXPECT_TRUE(rep.at("predicted").is_null());
    EXPECT_DOUBLE_EQ(rep.at("empirical").get<double>(), 40.0);
}

TEST(CliExecute, VerifySuitesResolveAliasesAndReportHonestFailures) {
    EXPECT_EQ(crs::cli::detail::resolve_suite("all").size(), 10u);
    EXPECT_EQ(crs::cli::detail::resolve_suite("oracle"),
              std::vector<std::string>{"oracle-equivalence"});
    EXPECT_EQ(crs::cli::detail::resolve_suite("cor1"),
              std::vector<std::string>{"shifted-correlation"});
    EXPECT_EQ(crs::cli::detail::resolve_suite("theorem2"),
              std::vector<std::string>{"shifted-correlation"});
    EXPECT_EQ(crs::cli::detail::resolve_suite("extraction"),
              std::vector<std::string>{"coefficient-extraction"});
    EXPECT_EQ(crs::cli::detail::resolve_suite("lemma-grids"),
              std::vector<std::string>{"lemma-grids"});
    EXPECT_THROW(crs::cli::detail::resolve_suite("nope"), crs::DomainError);

    // cor2's empirical clause fails by design; the report says so and keeps
    // the measured numbers in the detail string.
    json rep = crs::cli::execute(make_config("verify", {{"suite", "cor2"}}));
    EXPECT_FALSE(rep.at("passed").get<bool>());
    ASSERT_EQ(rep.at("results").size(), 1u);
    EXPECT_EQ(rep.at("results")[0].at("name").get<std::string>(), "jordan-correlation");
    EXPECT_FALSE(rep.at("results")[0].at("passed").get<bool>());
    EXPECT_NE(rep.at("results")[0].at("detail").get<std::string>().find("ratio"),
              std::string::npos);
}

TEST(CliExecute, RejectsUnknownAndMalformedParameters) {
    EXPECT_THROW(crs::cli::execute(make_config("warp", {})), crs::DomainError);
    EXPECT_THROW(crs::cli::execute(make_config(
                     "crs.eval", {{"r", "3"}, {"n", "0"}, {"z", "1"}})),
                 crs::DomainError);
    EXPECT_THROW(crs::cli::execute(make_config("crs.eval", {{"n", "0"}})), crs::DomainError);
    EXPECT_THROW(crs::cli::execute(make_config("crs.eval", {{"r", "abc"}, {"n", "0"}})),
                 crs::DomainError);
    EXPECT_THROW(
        crs::cli::execute(make_config("crs.eval", {{"r", "3"}, {"s", "0"}, {"n", "0"}})),
        crs::DomainError);
    EXPECT_THROW(
        crs::cli::execute(make_config("crs.eval", {{"r", "3"}, {"s", "17"}, {"n", "0"}})),
        crs::DomainError);
    EXPECT_THROW(crs::cli::execute(make_config(
                     "crs.table", {{"r-max", "10000"}, {"n-max", "10000"}})),
                 crs::DomainError);
    EXPECT_THROW(crs::cli::execute(make_config(
                     "totient", {{"kind", "jordan"}, {"n", "6"}, {"t", "2"}})),
                 crs::DomainError);
    EXPECT_THROW(crs::cli::execute(make_config(
                     "expand.eval",
                     {{"family", "primes"}, {"n", "1"}, {"rank", "10"}})),
                 crs::DomainError);
    EXPECT_THROW(crs::cli::execute(make_config("correlate", {{"f", "one"},
                                                             {"g", "one"},
                                                             {"N", "10"},
                                                             {"checkpoints", "3,abc"}})),
                 crs::DomainError);
    EXPECT_THROW(crs::cli::execute(make_config("constants", {{"which", "cor3"},
                                                             {"a", "2"},
                                                             {"b", "2"}})),
                 crs::DomainError);
    EXPECT_THROW(crs::cli::execute(make_config("constants", {{"which", "cor2"},
                                                             {"s", "2"},
                                                             {"a", "2.5"},
                                                             {"b", "3"}})),
                 crs::DomainError);
    EXPECT_THROW(crs::cli::execute(make_config("constants", {{"which", "cor1"},
                                                             {"a", "2"},
                                                             {"b", "2"},
                                                             {"P", "100"}})),
                 crs::DomainError);
    EXPECT_THROW(crs::cli::execute(make_config("verify", {{"suite", "nope"}})),
                 crs::DomainError);
    EXPECT_THROW(crs::cli::execute(make_config(
                     "verify", {{"suite", "theorem1"}, {"records", "/tmp/r.csv"}})),
                 crs::DomainError);
}

TEST(CliReplay, ConfigEchoRebuildsIdenticalReports) {
    std::vector<RunConfig> configs;
    configs.push_back(make_config("crs.eval", {{"r", "12"}, {"s", "2"}, {"n", "8"}}));
    configs.push_back(make_config(
        "constants", {{"which", "cor1"}, {"s", "1"}, {"a", "2"}, {"b", "2"}, {"m", "4"}}));
    configs.push_back(make_config("correlate", {{"f", "sigma:a=2"},
                                                {"g", "jordan:a=2"},
                                                {"h", "2"},
                                                {"N", "5000"},
                                                {"s", "1"},
                                                {"rank", "500"},
                                                {"checkpoints", "1000"}}));
    RunConfig coeffs = make_config(
        "expand.coeffs", {{"family", "sigma"}, {"k", "2"}, {"s", "1"}, {"r-max", "10"}});
    coeffs.exact = true;
    configs.push_back(coeffs);

    for (const RunConfig& cfg : configs) {
        json first = crs::cli::execute(cfg);
        RunConfig replay = crs::cli::config_from_echo(first);
        EXPECT_EQ(replay.command, cfg.command);
        json second = crs::cli::execute(replay);
        EXPECT_EQ(first, second) << cfg.command;
    }

    EXPECT_THROW(crs::cli::config_from_echo(json::object()), crs::ParseError);
}

TEST(CliRender, FormatsCoverTheDocumentedReports) {
    RunConfig cfg = make_config("crs.table", {{"r-max", "2"}, {"s", "1"}, {"n-max", "1"}});
    json rep = crs::cli::execute(cfg);
    EXPECT_EQ(crs::cli::detail::render_csv(cfg, rep), "r,n,value\n1,0,1\n1,1,1\n2,0,1\n2,1,-1\n");

    cfg = make_config("totient", {{"kind", "jordan"}, {"s", "1"}, {"n", "6"}});
    rep = crs::cli::execute(cfg);
    EXPECT_EQ(crs::cli::detail::render_plain(cfg, rep), "2\n");
    EXPECT_THROW(crs::cli::detail::render_csv(cfg, rep), crs::DomainError);

    cfg = make_config("correlate",
                      {{"f", "one"}, {"g", "one"}, {"h", "0"}, {"N", "10"}, {"s", "1"}});
    rep = crs::cli::execute(cfg);
    EXPECT_EQ(crs::cli::detail::render_csv(cfg, rep), "N,ratio\n10,1\n");
}

TEST(CliRun, ExitCodesFollowTheContract) {
    StreamCapture err(std::cerr);
    {
        StreamCapture out(std::cout);
        EXPECT_EQ(crs::cli::run({"crs", "eval", "--r", "3", "--s", "2", "--n", "0"}), 0);
        EXPECT_NE(out.text().find("\"value\": 8"), std::string::npos);
    }
    {
        StreamCapture out(std::cout);
        EXPECT_EQ(crs::cli::run({"crs", "eval", "--r", "0", "--n", "1"}), 1);
    }
    {
        StreamCapture out(std::cout);
        EXPECT_EQ(crs::cli::run({"totient", "--kind", "jordan", "--s", "16", "--n",
                                 "1000000"}),
                  1);
        EXPECT_NE(err.text().find("OverflowError"), std::string::npos);
    }
    {
        StreamCapture out(std::cout);
        EXPECT_EQ(crs::cli::run({"nonsense"}), 2);
    }

    // --output writes the same payload that went to stdout.
    std::string path = ::testing::TempDir() + "cli_run_out.txt";
    {
        StreamCapture out(std::cout);
        EXPECT_EQ(crs::cli::run({"totient", "--kind", "jordan", "--n", "6", "--format",
                                 "plain", "--output", path}),
                  0);
        std::ifstream in(path);
        std::stringstream copied;
        copied << in.rdbuf();
        EXPECT_EQ(copied.str(), out.text());
        EXPECT_EQ(copied.str(), "2\n");
    }
}

}  // namespace
