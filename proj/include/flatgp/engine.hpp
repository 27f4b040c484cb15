#pragma once

#include "flatgp/breeding.hpp"
#include "flatgp/incremental.hpp"
#include "flatgp/suite.hpp"
#include "flatgp/tree.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace flatgp {

struct EngineConfig {
    std::size_t population = 1000;
    std::size_t threads = 1;
    std::size_t max_tree_size = 5000;
    std::size_t generations = 50;
    std::size_t tournament_size = 7;
    double crossover_rate = 0.9;
    double mutation_rate = 0.1;
    bool elitism = false;
    std::uint64_t seed = 1;

    // Pure optimizations: none of these may change any genome.
    bool incremental = true;
    bool fitness_first = true;
    bool in_place = true;
    bool fatherless = true;

    int init_depth_min = 2;
    int init_depth_max = 6;
    int mutation_max_depth = 4;

    // Re-evaluate every child from scratch and check the fast path against it.
    bool verify = false;
    bool collect_traces = false;

    // Throws ConfigError.
    void validate() const;

    std::size_t pool_capacity() const { return population + 2 * threads; }
    StructureParams structure() const;
    BreedingParams breeding() const;
};

struct GenerationStats {
    std::size_t gen = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    double mean_size = 0.0;
    std::uint64_t equivalent_ops = 0;
    std::uint64_t executed_ops = 0;
    double skip_fraction = 0.0;
    std::size_t children_skipped = 0;
    std::size_t buffers_peak = 0;
    double wall_ms = 0.0;

    // Not part of the stats CSV.
    std::uint64_t checksum = 0;
    std::size_t in_place_births = 0;
    std::size_t inherited = 0;
    // Crossover children whose inserted subtree differs in size from the excised one.
    std::size_t crossovers = 0;
    std::size_t resized_crossovers = 0;
};

struct RunReport {
    std::vector<GenerationStats> generations;
    std::uint64_t total_equivalent_ops = 0;
    std::uint64_t total_executed_ops = 0;
    std::uint64_t total_crossovers = 0;
    // crossovers whose fragment and excised subtree differ in length
    std::uint64_t total_resized_crossovers = 0;
    double wall_ms = 0.0;
    std::size_t pool_capacity = 0;
    std::size_t pool_peak = 0;
    // Final generation, fully materialized.
    std::vector<std::vector<Code>> final_population;
    std::vector<double> final_fitness;

    double equivalent_ops_per_second() const
    {
        return wall_ms > 0.0 ? static_cast<double>(total_equivalent_ops) / (wall_ms / 1000.0) : 0.0;
    }
};

// Hooks are called from the master thread only, in a fixed order.
class EngineObserver {
public:
    virtual ~EngineObserver() = default;
    virtual void on_generation(const GenerationStats&) { }
    // Recipes of generation `gen`, complete with sites and fragment lengths.
    virtual void on_plan(std::size_t /*gen*/, std::span<const ChildPlan>) { }
    // Which children of generation `gen` had their genome built.
    virtual void on_births(std::size_t /*gen*/, std::span<const std::uint8_t>) { }
    virtual void on_trace(std::size_t /*gen*/, std::uint32_t /*child*/, const DisruptionTrace&) { }
};

RunReport run(const EngineConfig& config, const Problem& problem, EngineObserver* observer = nullptr);

// Combined hash of a population's genomes in slot order.
std::uint64_t population_checksum(std::span<const std::uint64_t> genome_hashes);

} // namespace flatgp
