#include "cli.hpp"
#include "flatgp/report.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace flatgp;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "flatgp");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    return { code, out.str(), err.str() };
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

// Drops buffers_peak and wall_ms, the two scheduling dependent columns.
std::string reproducible_columns(const std::string& csv)
{
    std::string out;
    for (auto row : parse_csv(csv)) {
        REQUIRE(row.size() == 10);
        row.resize(8);
        for (const auto& f : row) {
            out += f + ",";
        }
        out += "\n";
    }
    return out;
}

struct TempDir {
    std::filesystem::path path;
    TempDir()
        : path(std::filesystem::temp_directory_path() / "flatgp_cli_test")
    {
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

} // namespace

TEST_CASE("mux6 run writes one row per generation")
{
    const auto r = invoke({ "--problem", "mux6", "--pop", "500", "--gens", "20", "--seed", "1", "--threads", "4" });
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 22);
    CHECK(rows[0] == std::vector<std::string> { "gen", "best_fitness", "mean_fitness", "mean_size", "equivalent_ops",
                         "executed_ops", "skip_fraction", "children_skipped", "buffers_peak", "wall_ms" });
    CHECK(rows[1][0] == "0");
    CHECK(rows[21][0] == "20");

    const auto again = invoke({ "--problem", "mux6", "--pop", "500", "--gens", "20", "--seed", "1", "--threads", "4" });
    CHECK(reproducible_columns(again.out) == reproducible_columns(r.out));
}

TEST_CASE("output files")
{
    TempDir dir;
    const auto stats = (dir.path / "stats.csv").string();
    const auto plan = (dir.path / "plan.csv").string();
    const auto trace = (dir.path / "trace.csv").string();
    const auto pop = (dir.path / "pop.txt").string();
    const auto r = invoke({ "--problem", "sextic", "--cases", "48", "--pop", "40", "--gens", "3", "--stats-out", stats,
        "--plan-dump", plan, "--trace-out", trace, "--population-out", pop });
    REQUIRE(r.code == 0);
    CHECK(r.out.find("total equivalent_ops=") != std::string::npos);
    CHECK(parse_csv(slurp(stats)).size() == 5);
    const auto plan_rows = parse_csv(slurp(plan));
    CHECK(plan_rows.size() == 1 + 3 * 40);
    CHECK(plan_rows[0].size() == 11);
    const auto trace_rows = parse_csv(slurp(trace));
    CHECK(trace_rows.size() > 1);
    CHECK(trace_rows[0] == std::vector<std::string> { "gen", "child", "levels_climbed", "terminated_at", "levels" });
    std::istringstream genomes(slurp(pop));
    std::string line;
    int lines = 0;
    while (std::getline(genomes, line)) {
        ++lines;
    }
    CHECK(lines == 40);
}

TEST_CASE("config files round trip")
{
    TempDir dir;
    const auto first = (dir.path / "a.ini").string();
    const auto second = (dir.path / "b.ini").string();
    REQUIRE(invoke({ "--problem", "mux6", "--pop", "77", "--tournament", "3", "--xo-rate", "0.6", "--in-place", "off",
                "--seed", "9", "--save-config", first, "--dry-run" })
                .code
        == 0);
    REQUIRE(invoke({ "--config", first, "--save-config", second, "--dry-run" }).code == 0);
    const auto a = slurp(first);
    CHECK(a == slurp(second));
    CHECK(a.find("77") != std::string::npos);
    CHECK(a.find("off") != std::string::npos);
}

TEST_CASE("usage errors exit nonzero with a message")
{
    auto r = invoke({ "--no-such-flag" });
    CHECK(r.code != 0);
    CHECK_FALSE(r.err.empty());
    r = invoke({ "--problem", "/nonexistent/suite.csv", "--gens", "1" });
    CHECK(r.code != 0);
    CHECK(r.err.find("cannot read") != std::string::npos);
    r = invoke({ "--incremental", "maybe" });
    CHECK(r.code != 0);
    r = invoke({ "--problem", "mux6", "--cases", "48" });
    CHECK(r.code != 0);
    r = invoke({ "--pop", "3", "--tournament", "7" });
    CHECK(r.code != 0);
    r = invoke({ "--xo-rate", "0.5", "--mutation-rate", "0.2" });
    CHECK(r.code != 0);
}

TEST_CASE("splice benchmark table")
{
    const auto r = invoke({ "splice-bench", "--sizes", "33,257,1025", "--splices", "200" });
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == std::vector<std::string> { "size", "copy_ns", "inplace_ns", "ratio", "equal" });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i][4] == "yes");
        const auto& ratio = rows[i][3];
        REQUIRE(ratio.find('.') != std::string::npos);
        CHECK(ratio.size() - ratio.find('.') == 3);
        const double expect = std::stod(rows[i][1]) / std::stod(rows[i][2]);
        CHECK(std::stod(ratio) == doctest::Approx(expect).epsilon(0.02));
    }
}
