#pragma once

#include "flatgp/buffer_pool.hpp"
#include "flatgp/opcodes.hpp"
#include "flatgp/rng.hpp"
#include "flatgp/splice.hpp"
#include "flatgp/suite.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace flatgp {

enum class Operator : std::uint8_t { crossover, mutation, clone };

std::string_view operator_name(Operator op);

inline constexpr std::uint32_t no_parent = std::numeric_limits<std::uint32_t>::max();

// Recipe for one child: the mother's subtree at mother_site (excised nodes)
// is replaced by a fragment. Crossover fragments come from the father at
// father_site, mutation fragments are fresh random trees, clones copy the
// mother unchanged.
struct ChildPlan {
    Operator op = Operator::crossover;
    std::uint32_t mother = 0;
    std::uint32_t father = no_parent;
    std::uint32_t mother_site = 0;
    std::uint32_t excised = 0;
    std::uint32_t father_site = 0;
    std::uint32_t fragment_len = 0;
    std::uint32_t mother_len = 0;

    std::size_t child_size() const { return std::size_t { mother_len } - excised + fragment_len; }
    SpliceSite splice() const { return { mother_site, excised }; }

    friend bool operator==(const ChildPlan&, const ChildPlan&) = default;
};

struct BreedingParams {
    std::size_t tournament_size = 7;
    double crossover_rate = 0.9;
    bool elitism = false;
    std::size_t max_tree_size = 5000;
    int mutation_max_depth = 4;
};

// Oversize splices are re-drawn this many times before falling back to leaves.
inline constexpr int max_site_redraws = 8;

// Selection half of planning: operator, mother and father per child slot.
// Draw order per slot: operator, mother tournament, father tournament.
std::vector<ChildPlan> draw_parents(Rng& rng, std::span<const double> fitnesses, SuiteMode mode,
    const BreedingParams& params);

using GenomeLookup = std::function<TreeView(std::uint32_t)>;

// Site half of planning: crossover and mutation points for every slot in
// order, then random fragments for every mutation slot in order, stored in
// `fragments`. Crossover fragments are not copied here.
void choose_sites(Rng& rng, std::span<ChildPlan> plan, const GenomeLookup& genome, const OpcodeTable& table,
    const BreedingParams& params, FragmentStore& fragments);

// Both halves back to back, all randomness from one master stream.
std::vector<ChildPlan> plan_generation(Rng& rng, std::span<const double> fitnesses, SuiteMode mode,
    const GenomeLookup& genome, const OpcodeTable& table, const BreedingParams& params, FragmentStore& fragments);

// Number of plan slots naming each individual as mother or father.
std::vector<std::uint32_t> selection_counts(std::span<const ChildPlan> plan, std::size_t population);

// Parents bucketed by how many of their children are still unborn; the
// lowest non-empty bucket is served first so buffers are freed as early as
// possible. FIFO within a bucket. Thread safe.
class BirthQueues {
public:
    struct Task {
        std::uint32_t child;
        // The mother has no other child to come and no other reader, so the
        // child may take over her buffer.
        bool in_place;
    };

    struct Released {
        std::array<std::uint32_t, 2> ids {};
        std::size_t count = 0;
    };

    // `births` lists the child slots to materialize. Each child holds its
    // mother, and its father too when `fathers_hold` (fragments read straight
    // from the father's buffer).
    BirthQueues(std::size_t population, std::span<const ChildPlan> plan, std::span<const std::uint32_t> births,
        bool fathers_hold, bool allow_in_place);

    std::optional<Task> next_task();

    // Parents whose last task just finished and whose buffers can go.
    Released complete(const Task& task);

    bool involved(std::uint32_t parent) const;
    // Pending (undispatched) births held by the parent; 0 = not queued.
    std::size_t queue_of(std::uint32_t parent) const;
    std::size_t dispatched() const;
    std::size_t total() const { return births_; }

private:
    std::array<std::uint32_t, 2> holders(std::uint32_t child) const;
    void unlink(std::uint32_t p);
    void append(std::uint32_t p);

    std::span<const ChildPlan> plan_;
    bool fathers_hold_;
    bool allow_in_place_;
    std::size_t births_;

    mutable std::mutex mutex_;
    std::vector<std::uint32_t> pending_;
    std::vector<std::uint32_t> outstanding_;
    std::vector<std::uint8_t> consumed_;
    std::vector<std::uint8_t> dispatched_;
    std::vector<std::uint32_t> offsets_;
    std::vector<std::uint32_t> children_;
    std::vector<std::uint32_t> cursor_;
    std::vector<std::uint32_t> prev_;
    std::vector<std::uint32_t> next_;
    std::vector<std::uint32_t> head_;
    std::vector<std::uint32_t> tail_;
    std::size_t min_queue_ = 1;
    std::size_t handed_out_ = 0;
};

} // namespace flatgp
