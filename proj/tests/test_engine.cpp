#include "flatgp/engine.hpp"
#include "flatgp/errors.hpp"
#include "flatgp/hash.hpp"
#include "flatgp/selection.hpp"
#include "flatgp/tree.hpp"

#include <doctest.h>

#include <map>

using namespace flatgp;

namespace {

EngineConfig small(std::size_t pop, std::size_t gens)
{
    EngineConfig c;
    c.population = pop;
    c.generations = gens;
    c.max_tree_size = 400;
    c.seed = 5;
    return c;
}

struct Recorder : EngineObserver {
    std::vector<GenerationStats> stats;
    std::map<std::size_t, std::vector<ChildPlan>> plans;
    std::map<std::size_t, std::vector<std::uint8_t>> births;
    std::size_t traces = 0;
    std::size_t trace_violations = 0;

    void on_generation(const GenerationStats& s) override { stats.push_back(s); }
    void on_plan(std::size_t gen, std::span<const ChildPlan> plan) override
    {
        plans[gen].assign(plan.begin(), plan.end());
    }
    void on_births(std::size_t gen, std::span<const std::uint8_t> b) override
    {
        births[gen].assign(b.begin(), b.end());
    }
    void on_trace(std::size_t, std::uint32_t, const DisruptionTrace& t) override
    {
        ++traces;
        for (std::size_t k = 1; k < t.levels.size(); ++k) {
            trace_violations += t.levels[k].disrupted_cases > t.levels[k - 1].disrupted_cases ? 1 : 0;
        }
    }
};

} // namespace

TEST_CASE("configuration errors surface before generation 0")
{
    const auto p = make_sextic(16, 1);
    auto c = small(5, 1);
    c.tournament_size = 7;
    CHECK_THROWS_AS(run(c, p), ConfigError);
    c = small(20, 1);
    c.crossover_rate = 0.5;
    CHECK_THROWS_AS(run(c, p), ConfigError);
    c = small(20, 1);
    c.threads = 0;
    CHECK_THROWS_AS(run(c, p), ConfigError);
    c = small(20, 1);
    c.max_tree_size = 3;
    CHECK_THROWS_AS(run(c, p), InitFailure);
}

TEST_CASE("one stats row per generation")
{
    const auto p = make_mux6();
    auto c = small(60, 7);
    Recorder rec;
    const auto report = run(c, p, &rec);
    REQUIRE(report.generations.size() == 8);
    REQUIRE(rec.stats.size() == 8);
    for (std::size_t g = 0; g < 8; ++g) {
        CHECK(report.generations[g].gen == g);
        CHECK(report.generations[g].children_skipped <= c.population);
        CHECK(report.generations[g].buffers_peak <= c.pool_capacity());
        CHECK(report.generations[g].best_fitness <= 64.0);
    }
    CHECK(report.final_population.size() == 60);
    for (const auto& g : report.final_population) {
        CHECK(is_valid_tree(p.table, g));
        CHECK(g.size() <= c.max_tree_size);
    }
    CHECK(report.generations.back().children_skipped == 0);
}

TEST_CASE("full evaluation executes every opcode")
{
    const auto p = make_sextic(48, 3);
    auto c = small(30, 5);
    c.incremental = false;
    Recorder rec;
    run(c, p, &rec);
    for (const auto& s : rec.stats) {
        CHECK(s.executed_ops == s.equivalent_ops);
        CHECK(s.skip_fraction == 0.0);
    }
}

TEST_CASE("equivalent ops follow the plan")
{
    const auto p = make_sextic(48, 3);
    auto c = small(40, 6);
    Recorder rec;
    run(c, p, &rec);
    for (std::size_t g = 1; g < rec.stats.size(); ++g) {
        std::uint64_t expected = 0;
        for (const auto& child : rec.plans.at(g)) {
            expected += child.child_size() * 48;
        }
        CHECK(rec.stats[g].equivalent_ops == expected);
        const auto& s = rec.stats[g];
        CHECK(s.skip_fraction
            == 1.0 - static_cast<double>(s.executed_ops) / static_cast<double>(s.equivalent_ops));
    }
}

TEST_CASE("skipped children are never selected")
{
    const auto p = make_sextic(48, 3);
    auto c = small(80, 8);
    Recorder rec;
    run(c, p, &rec);
    for (std::size_t g = 1; g < c.generations; ++g) {
        const auto& born = rec.births.at(g);
        std::vector<int> used(c.population, 0);
        for (const auto& child : rec.plans.at(g + 1)) {
            used[child.mother] = 1;
            if (child.father != no_parent) {
                used[child.father] = 1;
            }
        }
        for (std::size_t i = 0; i < c.population; ++i) {
            REQUIRE((born[i] == 0) == (used[i] == 0));
        }
    }
}

TEST_CASE("results do not depend on the worker count")
{
    const auto p = make_sextic(48, 4);
    auto c = small(120, 8);
    std::vector<std::vector<GenerationStats>> runs;
    for (std::size_t t : { 1u, 3u, 8u }) {
        c.threads = t;
        runs.push_back(run(c, p).generations);
    }
    for (std::size_t g = 0; g < runs[0].size(); ++g) {
        for (std::size_t r = 1; r < runs.size(); ++r) {
            REQUIRE(runs[r][g].checksum == runs[0][g].checksum);
            REQUIRE(runs[r][g].best_fitness == runs[0][g].best_fitness);
            REQUIRE(runs[r][g].executed_ops == runs[0][g].executed_ops);
        }
    }
}

TEST_CASE("optimizations do not change genomes")
{
    const auto p = make_mux6();
    auto base = small(40, 6);
    base.threads = 2;
    const auto reference = run(base, p).generations;
    for (int mask = 0; mask < 16; ++mask) {
        auto c = base;
        c.incremental = mask & 1;
        c.fitness_first = mask & 2;
        c.in_place = mask & 4;
        c.fatherless = mask & 8;
        const auto gens = run(c, p).generations;
        for (std::size_t g = 0; g < gens.size(); ++g) {
            REQUIRE(gens[g].checksum == reference[g].checksum);
            REQUIRE(gens[g].best_fitness == reference[g].best_fitness);
        }
    }
}

TEST_CASE("verification mode cross-checks every child")
{
    for (const bool elitism : { false, true }) {
        auto c = small(50, 10);
        c.verify = true;
        c.elitism = elitism;
        c.threads = 4;
        CHECK_NOTHROW(run(c, make_sextic(32, 2)));
        CHECK_NOTHROW(run(c, make_mux6()));
    }
}

TEST_CASE("elitism never loses the best individual")
{
    auto c = small(50, 15);
    c.elitism = true;
    const auto gens = run(c, make_sextic(48, 6)).generations;
    for (std::size_t g = 1; g < gens.size(); ++g) {
        CHECK(gens[g].best_fitness <= gens[g - 1].best_fitness);
    }
}

TEST_CASE("disruption traces decay monotonically")
{
    auto c = small(60, 6);
    c.collect_traces = true;
    Recorder rec;
    run(c, make_sextic(48, 1), &rec);
    CHECK(rec.traces > 0);
    CHECK(rec.trace_violations == 0);
}

TEST_CASE("population checksum is order sensitive")
{
    const std::vector<std::uint64_t> a { 1, 2, 3 };
    const std::vector<std::uint64_t> b { 3, 2, 1 };
    CHECK(population_checksum(a) != population_checksum(b));
    const std::vector<Code> g { 1, 2, 3 };
    CHECK(genome_hash(g) == Fnv1a {}.update(TreeView(g).first(1)).update(TreeView(g).subspan(1)).value());
}
