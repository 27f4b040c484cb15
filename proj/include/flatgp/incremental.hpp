#pragma once

#include "flatgp/eval.hpp"
#include "flatgp/splice.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace flatgp {

struct Ancestor {
    std::size_t index;
    int arg; // 0 = first argument, 1 = second
};

// Enclosing function nodes of `site`, innermost first, each tagged with the
// argument slot that contains the site.
std::vector<Ancestor> ancestors_of(const OpcodeTable& table, TreeView tree, std::size_t site);

struct TraceLevel {
    std::size_t disrupted_cases = 0;
    double rms_difference = 0.0; // over disrupted lanes only
};

// How far a change travelled. levels[0] compares fragment against excised
// subtree; levels[k] compares the k-th enclosing function's old and new
// outputs. terminated_at is the level where every lane agreed again, or
// empty when the difference reached the root.
struct DisruptionTrace {
    std::vector<TraceLevel> levels;
    std::optional<std::size_t> terminated_at;

    std::size_t levels_climbed() const { return levels.empty() ? 0 : levels.size() - 1; }
};

struct IncrementalResult {
    double fitness = 0.0;
    bool inherited = false;
    std::uint64_t executed_ops = 0;
    DisruptionTrace trace;
};

// Bottom-up fitness of the child mother[0,site) + fragment + mother[site+excised,len)
// computed from the mother and the fragment alone. Both the fragment and the
// excised subtree are evaluated, then old and new values climb the mother's
// ancestor chain, each level evaluating the unchanged sibling once. As soon
// as old and new lanes agree bit for bit, the child's fitness is the mother's.
template <class Lane> class IncrementalEvaluator {
public:
    IncrementalEvaluator(const OpcodeTable& table, const TestSuite& suite, std::size_t stack_limit);

    IncrementalResult eval(TreeView mother, SpliceSite at, TreeView fragment, double mother_fitness);

private:
    TraceLevel compare() const;

    const OpcodeTable* table_;
    const TestSuite* suite_;
    BatchEvaluator<Lane> batch_;
    std::vector<Lane> old_;
    std::vector<Lane> new_;
    std::vector<Lane> old_next_;
    std::vector<Lane> new_next_;
};

extern template class IncrementalEvaluator<double>;
extern template class IncrementalEvaluator<std::uint64_t>;

} // namespace flatgp
