#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "echo_rmt/cli.hpp"

using namespace echo_rmt;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "echo_rmt_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

int run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    return cli::run_cli(args, out, err);
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

nlohmann::json sidecar(const fs::path& csv)
{
    std::ifstream in(metadata_path(csv.string()));
    return nlohmann::json::parse(in);
}

} // namespace

TEST_CASE("fidelity-theory writes t,value")
{
    const auto out = scratch("theory.csv");
    REQUIRE(run({"fidelity-theory", "--kind", "susy-gue", "--eps2", "1", "--points", "11", "--out", out.string()}) == 0);
    const auto t = read_csv(out.string());
    CHECK(t.header == std::vector<std::string>{"t", "value"});
    REQUIRE(t.rows() == 11);
    CHECK(t.column("value")[0] == 1.0);
    CHECK(t.column("value")[5] == Catch::Approx(susy_fidelity_gue(1.0, t.column("t")[5])).epsilon(1e-12));
    const auto meta = sidecar(out);
    CHECK(meta.at("subcommand") == "fidelity-theory");
    CHECK(meta.at("version") == cli::kVersion);
    CHECK(meta.contains("config"));
}

TEST_CASE("Monte Carlo subcommands are reproducible")
{
    const auto a = scratch("mc_a.csv");
    const auto b = scratch("mc_b.csv");
    const std::vector<std::string> common{"fidelity-mc", "--n", "64", "--eps2-heis", "1", "--points", "5",
                                          "--realizations", "3", "--states", "2", "--seed", "9"};
    auto with_out = [&](const fs::path& p, const std::string& workers) {
        auto args = common;
        args.insert(args.end(), {"--workers", workers, "--out", p.string()});
        return args;
    };
    REQUIRE(run(with_out(a, "1")) == 0);
    REQUIRE(run(with_out(b, "2")) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(sidecar(a).at("master_seed") == 9);
    CHECK(read_csv(a.string()).header.front() == "t_over_tauh");

    const auto p1 = scratch("pur_1.csv");
    const auto p2 = scratch("pur_2.csv");
    const std::vector<std::string> pur{"purity-mc", "--ne", "16", "--lambda", "0.1", "--points", "4",
                                       "--realizations", "3", "--states", "2", "--seed", "4"};
    auto pargs = pur;
    pargs.insert(pargs.end(), {"--workers", "1", "--out", p1.string()});
    REQUIRE(run(pargs) == 0);
    pargs = pur;
    pargs.insert(pargs.end(), {"--workers", "3", "--out", p2.string()});
    REQUIRE(run(pargs) == 0);
    CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("config files fill in options the command line leaves out")
{
    const auto cfg = scratch("run.cfg");
    std::ofstream(cfg) << "# theory curve\nkind = elr\neps2 = 0.5\npoints = 7\n";
    const auto out = scratch("cfg.csv");
    REQUIRE(run({"fidelity-theory", "--config", cfg.string(), "--points", "9", "--out", out.string()}) == 0);
    const auto t = read_csv(out.string());
    CHECK(t.rows() == 9);
    const auto meta = sidecar(out);
    CHECK(meta.at("config").at("kind") == "elr");
    CHECK(meta.at("config").at("eps2") == 0.5);

    CHECK(run({"fidelity-theory", "--config", scratch("missing.cfg").string(), "--out", out.string()}) == 2);
}

TEST_CASE("exit codes")
{
    const auto out = scratch("codes.csv").string();
    CHECK(run({"no-such-command"}) == 2);
    CHECK(run({"fidelity-theory", "--bogus", "1", "--out", out}) == 2);
    CHECK(run({"fidelity-theory", "--eps2", "abc", "--out", out}) == 2);
    CHECK(run({"fidelity-theory", "--kind", "gse", "--out", out}) == 2);
    CHECK(run({"fidelity-mc", "--n", "1", "--eps", "0.1", "--out", out}) == 2);
    CHECK(run({"fidelity-mc", "--n", "32", "--out", out}) == 2);
    CHECK(run({"fidelity-theory", "--out", "/nonexistent-dir/x.csv"}) == 3);
    CHECK(run({"--help"}) == 0);
    CHECK(run({"--version"}) == 0);
}
