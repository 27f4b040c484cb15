#pragma once

#include "flatgp/opcodes.hpp"
#include "flatgp/rng.hpp"

#include <cstddef>
#include <vector>

namespace flatgp {

struct StructureParams {
    std::size_t max_tree_size = 5000;
    int init_depth_min = 2;
    int init_depth_max = 6;

    // Stack bound for evaluation. Every node of a tree could in principle sit
    // on one root-to-leaf path, so the tree size bounds its height.
    std::size_t max_depth_estimate() const { return max_tree_size; }
};

enum class InitMethod { full, grow };

std::uint8_t arity(const OpcodeTable& table, Code op);

// Node count of the subexpression rooted at index.
std::size_t subtree_extent(const OpcodeTable& table, TreeView tree, std::size_t index);

// Height of the tree; a lone terminal has depth 1.
std::size_t tree_depth(const OpcodeTable& table, TreeView tree);

// Arity-consistency scan: a tokens-needed counter that starts at 1 must reach
// 0 exactly at the end of the sequence. Unknown bytes make a tree invalid.
bool is_valid_tree(const OpcodeTable& table, TreeView tree);

// Throws MalformedGenome with the failing position if the tree is invalid.
void check_tree(const OpcodeTable& table, TreeView tree);

std::vector<Code> random_tree(Rng& rng, const OpcodeTable& table, const StructureParams& params, InitMethod method,
    int depth);

// Ramped half-and-half: individual i uses depth init_depth_min + (i/2) mod span,
// even i use full, odd i use grow.
std::vector<std::vector<Code>> ramped_half_and_half(Rng& rng, const OpcodeTable& table,
    const StructureParams& params, std::size_t count);

// Random tree with exactly `size` nodes (size must be odd for arity-2 tables).
// Used by the splice micro-benchmark, which needs trees of a given length.
std::vector<Code> random_tree_of_size(Rng& rng, const OpcodeTable& table, std::size_t size);

inline constexpr double function_site_bias = 0.9;

// Crossover point: a function node with probability 0.9 when the tree has one,
// otherwise a leaf.
std::size_t pick_site(Rng& rng, const OpcodeTable& table, TreeView tree);

// Uniformly chosen leaf.
std::size_t pick_leaf(Rng& rng, const OpcodeTable& table, TreeView tree);

} // namespace flatgp
