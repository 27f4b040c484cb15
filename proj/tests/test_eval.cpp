#include "flatgp/errors.hpp"
#include "flatgp/eval.hpp"
#include "flatgp/tree.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace flatgp;

namespace {

Problem small_regression(std::size_t n, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<std::string> names { "X", "Y" };
    std::vector<std::vector<double>> cols(2, std::vector<double>(n));
    std::vector<double> targets(n);
    for (std::size_t c = 0; c < n; ++c) {
        cols[0][c] = rng.uniform(-2, 2);
        cols[1][c] = c % 7 == 0 ? 0.0 : rng.uniform(-2, 2); // exercise protected division
        targets[c] = rng.uniform(-1, 1);
    }
    return { "xy", regression_table(names, constant_palette(seed)),
        TestSuite::numeric(names, std::move(cols), std::move(targets)) };
}

} // namespace

TEST_CASE("a lone variable returns its column")
{
    const auto p = make_sextic(48, 3);
    const auto r = eval_full<double>(p.table, parse_tree(p.table, "X"), p.suite);
    const auto col = p.suite.column<double>(0);
    CHECK(std::equal(r.root.begin(), r.root.end(), col.begin()));
}

TEST_CASE("ADD X X doubles the input")
{
    const std::vector<std::string> names { "X" };
    const auto table = regression_table(names, constant_palette(1));
    const auto suite = TestSuite::numeric(names, { { 0.5, -1.25 } }, { 0.0, 0.0 });
    const auto r = eval_full<double>(table, parse_tree(table, "ADD X X"), suite);
    CHECK(r.root[0] == 1.0);
    CHECK(r.root[1] == -2.5);
}

TEST_CASE("packed multiplexer columns follow the case numbering")
{
    const auto p = make_mux6();
    const auto r = eval_full<std::uint64_t>(p.table, parse_tree(p.table, "A0"), p.suite);
    CHECK(r.root[0] == 0xAAAAAAAAAAAAAAAAULL);
    const auto a1 = eval_full<std::uint64_t>(p.table, parse_tree(p.table, "A1"), p.suite);
    CHECK(a1.root[0] == 0xCCCCCCCCCCCCCCCCULL);
    const auto d3 = eval_full<std::uint64_t>(p.table, parse_tree(p.table, "D3"), p.suite);
    CHECK(d3.root[0] == 0xFFFFFFFF00000000ULL);
}

TEST_CASE("operator semantics")
{
    const std::vector<double> one { 1.0, 6.0, 2.0 };
    const std::vector<double> den { 0.0, 3.0, 1e-10 };
    std::vector<double> out(3);
    apply_op(Fn::pdiv, one, den, out);
    CHECK(out[0] == 1.0);
    CHECK(out[1] == 2.0);
    CHECK(out[2] == 1.0);
    apply_op(Fn::sub, one, den, out);
    CHECK(out[1] == 3.0);

    Rng rng(2);
    for (int i = 0; i < 100; ++i) {
        const std::vector<std::uint64_t> w { rng() };
        std::vector<std::uint64_t> r(1);
        apply_op(Fn::nand, w, w, r);
        REQUIRE(r[0] == ~w[0]);
        apply_op(Fn::nor, w, w, r);
        REQUIRE(r[0] == ~w[0]);
    }

    std::vector<std::uint64_t> words(3);
    CHECK_THROWS_AS(apply_op(Fn::add, words, words, words), MalformedGenome);
    CHECK_THROWS_AS(apply_op(Fn::and_, one, one, out), MalformedGenome);
}

TEST_CASE("fitness measures")
{
    const auto p = make_mux6();
    const std::vector<std::uint64_t> target { mux6_target_word() };
    const std::vector<std::uint64_t> inverse { ~mux6_target_word() };
    CHECK(fitness_of(std::span<const std::uint64_t>(target), p.suite) == 64.0);
    CHECK(fitness_of(std::span<const std::uint64_t>(inverse), p.suite) == 0.0);

    const auto s = make_sextic(48, 1);
    const auto t = s.suite.targets<double>();
    const std::vector<double> exact(t.begin(), t.end());
    CHECK(fitness_of(std::span<const double>(exact), s.suite) == 0.0);
    std::vector<double> nan(exact);
    nan[3] = std::nan("");
    CHECK(std::isinf(fitness_of(std::span<const double>(nan), s.suite)));
}

TEST_CASE("multiplexer target is the brute force truth table")
{
    const auto word = mux6_target_word();
    for (unsigned c = 0; c < 64; ++c) {
        REQUIRE(((word >> c) & 1u) == (oracle::mux6(c) ? 1u : 0u));
    }
}

TEST_CASE("batch evaluation equals a scalar interpreter")
{
    SUBCASE("numeric, bit for bit")
    {
        for (std::uint64_t seed = 1; seed <= 500; ++seed) {
            const auto p = small_regression(1 + seed % 40, seed);
            Rng rng(seed);
            const auto tree = random_tree(rng, p.table, StructureParams {}, seed % 2 ? InitMethod::grow : InitMethod::full,
                1 + static_cast<int>(seed % 8));
            const auto fast = eval_full<double>(p.table, tree, p.suite);
            const auto slow = oracle::scalar_outputs(p.table, tree, p.suite);
            for (std::size_t c = 0; c < slow.size(); ++c) {
                REQUIRE(oracle::same_bits(fast.root[c], slow[c]));
            }
            REQUIRE(oracle::same_bits(fast.fitness, oracle::scalar_error(p.table, tree, p.suite)));
        }
    }
    SUBCASE("packed multiplexer")
    {
        const auto p = make_mux6();
        Rng rng(4);
        for (int n = 0; n < 500; ++n) {
            const auto tree = random_tree(rng, p.table, StructureParams {}, InitMethod::grow, 1 + n % 9);
            const auto fast = eval_full<std::uint64_t>(p.table, tree, p.suite);
            REQUIRE(fast.fitness == oracle::scalar_hits(p.table, tree));
        }
    }
}

TEST_CASE("partial packed words only count valid cases")
{
    const std::size_t n = 100;
    Rng rng(6);
    std::vector<std::vector<std::uint64_t>> cols(1, std::vector<std::uint64_t>(2));
    cols[0] = { rng(), rng() };
    const auto suite = TestSuite::packed({ "B" }, n, cols, { cols[0][0], cols[0][1] });
    OpcodeTable table;
    table.add({ "AND", 2, OpKind::function, Fn::and_ });
    table.add({ "B", 0, OpKind::variable, Fn::none, 0 });
    const auto r = eval_full<std::uint64_t>(table, parse_tree(table, "AND B B"), suite);
    CHECK(r.fitness == 100.0);
    CHECK(suite.tail_mask() == (std::uint64_t { 1 } << 36) - 1);
}

TEST_CASE("stack depth equals tree height")
{
    const auto p = small_regression(10, 3);
    BatchEvaluator<double> eval(p.table, p.suite, 5000);
    Rng rng(1);
    for (int n = 0; n < 300; ++n) {
        const auto tree = random_tree(rng, p.table, StructureParams {}, InitMethod::grow, 1 + n % 10);
        std::size_t extent = 0;
        eval.eval(tree, &extent);
        REQUIRE(extent == tree.size());
        REQUIRE(eval.stack_high_water() == tree_depth(p.table, tree));
    }
    BatchEvaluator<double> shallow(p.table, p.suite, 2);
    CHECK_THROWS_AS(shallow.eval(parse_tree(p.table, "ADD X MUL Y X")), ConfigError);
}

TEST_CASE("full evaluation counts len x cases")
{
    const auto p = small_regression(48, 9);
    EvalCounters counters;
    Rng rng(5);
    std::uint64_t total = 0;
    for (int i = 0; i < 10; ++i) {
        const auto tree = random_tree(rng, p.table, StructureParams {}, InitMethod::full, 1 + i % 6);
        eval_full<double>(p.table, tree, p.suite, &counters);
        total += tree.size() * 48;
    }
    CHECK(counters.equivalent_ops == total);
    CHECK(counters.executed_ops == total);
    CHECK_THROWS_AS(eval_full<double>(p.table, parse_tree(p.table, "X Y"), p.suite), MalformedGenome);
}

TEST_CASE("sextic benchmark")
{
    const auto a = make_sextic(48, 7);
    const auto b = make_sextic(48, 7);
    REQUIRE(a.suite.n_cases() == 48);
    const auto x = a.suite.column<double>(0);
    const auto y = a.suite.targets<double>();
    for (std::size_t c = 0; c < 48; ++c) {
        CHECK(x[c] >= -1.0);
        CHECK(x[c] <= 1.0);
        const double expected = std::pow(x[c], 6) - 2 * std::pow(x[c], 4) + std::pow(x[c], 2);
        CHECK(y[c] == doctest::Approx(expected).epsilon(1e-12));
        CHECK(x[c] == b.suite.column<double>(0)[c]);
    }
    CHECK(make_sextic(48, 8).suite.column<double>(0)[0] != x[0]);
    CHECK(a.table.find("C3").has_value());
}

TEST_CASE("suite files")
{
    const auto dir = std::filesystem::temp_directory_path() / "flatgp_suite_test";
    std::filesystem::create_directories(dir);
    const auto good = dir / "good.csv";
    std::ofstream(good) << "a,target,b\n1,2,3\n4.5,-1,0\n\n";
    const auto p = load_suite_csv(good, 1);
    CHECK(p.suite.n_cases() == 2);
    CHECK(p.suite.variable_names() == std::vector<std::string> { "a", "b" });
    CHECK(p.suite.column<double>(1)[0] == 3.0);
    CHECK(p.suite.targets<double>()[1] == -1.0);
    CHECK(p.table.find("b").has_value());

    const auto no_target = dir / "no_target.csv";
    std::ofstream(no_target) << "a,b\n1,2\n";
    CHECK_THROWS_AS(load_suite_csv(no_target, 1), ConfigError);
    const auto bad = dir / "bad.csv";
    std::ofstream(bad) << "a,target\n1,zz\n";
    CHECK_THROWS_AS(load_suite_csv(bad, 1), ConfigError);
    CHECK_THROWS_AS(load_suite_csv(dir / "missing.csv", 1), ConfigError);
    std::filesystem::remove_all(dir);
}
