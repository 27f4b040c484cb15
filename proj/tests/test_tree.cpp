#include "flatgp/errors.hpp"
#include "flatgp/tree.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace flatgp;

namespace {

const std::vector<std::string> xyz { "X", "Y", "Z" };
const std::vector<double> palette { 0.25, -0.5, 0.75, 1.0 };

OpcodeTable xyz_table() { return regression_table(xyz, palette); }

} // namespace

TEST_CASE("arity comes from the opcode table")
{
    const auto t = xyz_table();
    CHECK(arity(t, *t.find("ADD")) == 2);
    CHECK(arity(t, *t.find("X")) == 0);
    CHECK(arity(t, *t.find("C3")) == 0);
    const auto m = mux6_table();
    CHECK(arity(m, *m.find("NAND")) == 2);
    CHECK(arity(m, *m.find("D3")) == 0);
    CHECK_THROWS_AS(arity(t, 200), MalformedGenome);
    CHECK_THROWS_AS(arity(t, static_cast<Code>(t.size())), MalformedGenome);
}

TEST_CASE("opcode tables list every code once")
{
    const auto t = xyz_table();
    CHECK(t.size() == 4 + 3 + palette.size());
    CHECK(t.functions().size() == 4);
    CHECK(t.terminals().size() == 3 + palette.size());
    CHECK(t.info(*t.find("C1")).value == -0.5);
    const auto m = mux6_table();
    CHECK(m.size() == 10);
    for (int v = 0; v < 6; ++v) {
        const char* names[] = { "A0", "A1", "D0", "D1", "D2", "D3" };
        CHECK(m.info(*m.find(names[v])).column == static_cast<std::uint32_t>(v));
    }
}

TEST_CASE("genome dump format round trips")
{
    const auto t = xyz_table();
    const auto tree = parse_tree(t, "ADD X MUL Y Z");
    CHECK(tree.size() == 5);
    CHECK(format_tree(t, tree) == "ADD X MUL Y Z");
    CHECK_THROWS_AS(parse_tree(t, "ADD X FOO"), MalformedGenome);
}

TEST_CASE("subtree extent")
{
    const auto t = xyz_table();
    const auto tree = parse_tree(t, "ADD X MUL Y Z");
    CHECK(subtree_extent(t, tree, 0) == 5);
    CHECK(subtree_extent(t, tree, 2) == 3);
    CHECK(subtree_extent(t, tree, 1) == 1);
    CHECK_THROWS_AS(subtree_extent(t, tree, 5), BoundsError);

    SUBCASE("matches a recursive parser on random trees")
    {
        Rng rng(11);
        StructureParams params;
        for (int n = 0; n < 300; ++n) {
            const auto r = random_tree(rng, t, params, n % 2 ? InitMethod::grow : InitMethod::full, 1 + n % 7);
            for (std::size_t i = 0; i < r.size(); ++i) {
                REQUIRE(subtree_extent(t, r, i) == oracle::parse_size(t, r, i));
            }
        }
    }
}

TEST_CASE("tree depth")
{
    const auto t = xyz_table();
    CHECK(tree_depth(t, parse_tree(t, "X")) == 1);
    CHECK(tree_depth(t, parse_tree(t, "ADD X Y")) == 2);
    CHECK(tree_depth(t, parse_tree(t, "ADD X MUL Y Z")) == 3);
    Rng rng(3);
    for (int n = 0; n < 200; ++n) {
        const auto r = random_tree(rng, t, StructureParams {}, InitMethod::grow, 8);
        REQUIRE(tree_depth(t, r) == oracle::parse_depth(t, r, 0));
    }
}

TEST_CASE("arity-consistency scan")
{
    const auto t = xyz_table();
    CHECK(is_valid_tree(t, parse_tree(t, "ADD X MUL Y Z")));
    CHECK_FALSE(is_valid_tree(t, parse_tree(t, "ADD X MUL Y")));
    CHECK_FALSE(is_valid_tree(t, parse_tree(t, "ADD X Y Z")));
    CHECK_FALSE(is_valid_tree(t, {}));
    const std::vector<Code> junk { 0, 4, 250 };
    CHECK_FALSE(is_valid_tree(t, junk));
    CHECK_THROWS_AS(check_tree(t, junk), MalformedGenome);
}

TEST_CASE("random tree construction")
{
    const auto t = xyz_table();
    Rng rng(5);
    StructureParams params;

    const auto leaf = random_tree(rng, t, params, InitMethod::full, 1);
    CHECK(leaf.size() == 1);
    CHECK(t.arity(leaf[0]) == 0);

    for (int n = 0; n < 50; ++n) {
        const auto full = random_tree(rng, t, params, InitMethod::full, 3);
        CHECK(full.size() == 7);
        CHECK(tree_depth(t, full) == 3);
    }

    for (int n = 0; n < 1000; ++n) {
        const auto grown = random_tree(rng, t, params, InitMethod::grow, 6);
        REQUIRE(is_valid_tree(t, grown));
        REQUIRE(tree_depth(t, grown) <= 6);
        REQUIRE(tree_depth(t, grown) <= params.max_depth_estimate());
    }

    StructureParams tiny;
    tiny.max_tree_size = 5;
    CHECK_THROWS_AS(random_tree(rng, t, tiny, InitMethod::full, 4), InitFailure);
}

TEST_CASE("ramped half-and-half alternates methods over the depth range")
{
    const auto t = xyz_table();
    Rng rng(8);
    StructureParams params;
    const auto pop = ramped_half_and_half(rng, t, params, 100);
    REQUIRE(pop.size() == 100);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        const int depth = params.init_depth_min + static_cast<int>((i / 2) % 5);
        REQUIRE(is_valid_tree(t, pop[i]));
        if (i % 2 == 0) {
            CHECK(tree_depth(t, pop[i]) == static_cast<std::size_t>(depth));
            CHECK(pop[i].size() == (std::size_t { 1 } << depth) - 1);
        } else {
            CHECK(tree_depth(t, pop[i]) <= static_cast<std::size_t>(depth));
        }
    }
}

TEST_CASE("trees of an exact size")
{
    const auto t = xyz_table();
    Rng rng(2);
    for (std::size_t size : { 1u, 3u, 5u, 101u, 4097u }) {
        const auto tree = random_tree_of_size(rng, t, size);
        CHECK(tree.size() == size);
        CHECK(is_valid_tree(t, tree));
    }
    CHECK_THROWS_AS(random_tree_of_size(rng, t, 4), InitFailure);
}

TEST_CASE("crossover site choice")
{
    const auto t = xyz_table();
    Rng rng(17);
    CHECK(pick_site(rng, t, parse_tree(t, "X")) == 0);
    CHECK_THROWS_AS(pick_site(rng, t, {}), BoundsError);

    SUBCASE("function nodes 90% of the time")
    {
        const auto tree = parse_tree(t, "ADD MUL X Y SUB Z PDIV X C0");
        std::size_t functions = 0;
        const int picks = 100000;
        for (int i = 0; i < picks; ++i) {
            functions += t.arity(tree[pick_site(rng, t, tree)]) > 0 ? 1 : 0;
        }
        const double fraction = static_cast<double>(functions) / picks;
        CHECK(std::abs(fraction - function_site_bias) <= 0.01);
    }

    SUBCASE("always in range")
    {
        for (int n = 0; n < 10000; ++n) {
            const auto tree = random_tree(rng, t, StructureParams {}, InitMethod::grow, 1 + n % 6);
            REQUIRE(pick_site(rng, t, tree) < tree.size());
            const auto leaf = pick_leaf(rng, t, tree);
            REQUIRE(leaf < tree.size());
            REQUIRE(t.arity(tree[leaf]) == 0);
        }
    }
}
