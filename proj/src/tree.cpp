#include "flatgp/tree.hpp"

#include "flatgp/errors.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <utility>

namespace flatgp {

std::uint8_t arity(const OpcodeTable& table, Code op) { return table.arity(op); }

std::size_t subtree_extent(const OpcodeTable& table, TreeView tree, std::size_t index)
{
    if (index >= tree.size()) {
        throw BoundsError(fmt::format("subtree index {} out of range (len {})", index, tree.size()));
    }
    std::size_t needed = 1;
    std::size_t i = index;
    while (needed != 0) {
        if (i >= tree.size()) {
            throw MalformedGenome(fmt::format("subtree at {} runs past end of tree", index));
        }
        needed += table.arity(tree[i]);
        --needed;
        ++i;
    }
    return i - index;
}

std::size_t tree_depth(const OpcodeTable& table, TreeView tree)
{
    // pending[k] = arguments still owed to the open function at depth k
    std::vector<std::uint8_t> pending;
    std::size_t deepest = 0;
    for (const Code c : tree) {
        const auto a = table.arity(c);
        deepest = std::max(deepest, pending.size() + 1);
        if (a > 0) {
            pending.push_back(a);
            continue;
        }
        while (!pending.empty() && --pending.back() == 0) {
            pending.pop_back();
        }
    }
    return deepest;
}

bool is_valid_tree(const OpcodeTable& table, TreeView tree)
{
    std::size_t needed = 1;
    for (std::size_t i = 0; i < tree.size(); ++i) {
        if (needed == 0 || !table.contains(tree[i])) {
            return false;
        }
        needed += table.arity_unchecked(tree[i]);
        --needed;
    }
    return needed == 0;
}

void check_tree(const OpcodeTable& table, TreeView tree)
{
    std::size_t needed = 1;
    for (std::size_t i = 0; i < tree.size(); ++i) {
        if (needed == 0) {
            throw MalformedGenome(fmt::format("trailing opcodes after complete tree at {}", i));
        }
        needed += table.arity(tree[i]);
        --needed;
    }
    if (needed != 0) {
        throw MalformedGenome(fmt::format("tree truncated: {} arguments missing", needed));
    }
}

namespace {

    constexpr int max_init_attempts = 16;

    Code draw(Rng& rng, std::span<const Code> set) { return set[rng.below(set.size())]; }

    bool try_build(Rng& rng, const OpcodeTable& table, std::size_t limit, InitMethod method, int depth,
        std::vector<Code>& out)
    {
        out.clear();
        const auto functions = table.functions();
        const auto terminals = table.terminals();
        const std::size_t n_all = functions.size() + terminals.size();
        // depths of argument slots still to fill, popped in prefix order
        std::vector<int> slots { 1 };
        while (!slots.empty()) {
            const int d = slots.back();
            slots.pop_back();
            if (out.size() == limit) {
                return false;
            }
            bool function = false;
            if (d < depth && !functions.empty()) {
                function = method == InitMethod::full || rng.below(n_all) < functions.size();
            }
            const Code c = function ? draw(rng, functions) : draw(rng, terminals);
            out.push_back(c);
            for (int a = 0; a < table.arity_unchecked(c); ++a) {
                slots.push_back(d + 1);
            }
        }
        return true;
    }

} // namespace

std::vector<Code> random_tree(Rng& rng, const OpcodeTable& table, const StructureParams& params, InitMethod method,
    int depth)
{
    if (depth < 1) {
        throw InitFailure(fmt::format("tree depth {} below 1", depth));
    }
    if (table.terminals().empty()) {
        throw InitFailure("opcode table has no terminals");
    }
    std::vector<Code> out;
    for (int attempt = 0; attempt < max_init_attempts; ++attempt) {
        if (try_build(rng, table, params.max_tree_size, method, depth, out)) {
            return out;
        }
    }
    throw InitFailure(fmt::format("no depth {} tree fits max tree size {} after {} attempts", depth,
        params.max_tree_size, max_init_attempts));
}

std::vector<std::vector<Code>> ramped_half_and_half(Rng& rng, const OpcodeTable& table,
    const StructureParams& params, std::size_t count)
{
    if (params.init_depth_min < 1 || params.init_depth_max < params.init_depth_min) {
        throw InitFailure(
            fmt::format("bad initial depth range [{},{}]", params.init_depth_min, params.init_depth_max));
    }
    const auto span = static_cast<std::size_t>(params.init_depth_max - params.init_depth_min + 1);
    std::vector<std::vector<Code>> trees;
    trees.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const int depth = params.init_depth_min + static_cast<int>((i / 2) % span);
        const auto method = i % 2 == 0 ? InitMethod::full : InitMethod::grow;
        trees.push_back(random_tree(rng, table, params, method, depth));
    }
    return trees;
}

std::vector<Code> random_tree_of_size(Rng& rng, const OpcodeTable& table, std::size_t size)
{
    if (size % 2 == 0 || table.functions().empty()) {
        throw InitFailure(fmt::format("cannot build a binary tree of {} nodes", size));
    }
    std::vector<Code> out;
    out.reserve(size);
    std::vector<std::size_t> todo { size };
    while (!todo.empty()) {
        const std::size_t n = todo.back();
        todo.pop_back();
        if (n == 1) {
            out.push_back(draw(rng, table.terminals()));
            continue;
        }
        // left gets an odd share in [1, n-2]
        const std::size_t left = 2 * rng.below((n - 1) / 2) + 1;
        out.push_back(draw(rng, table.functions()));
        todo.push_back(n - 1 - left);
        todo.push_back(left);
    }
    return out;
}

std::size_t pick_site(Rng& rng, const OpcodeTable& table, TreeView tree)
{
    if (tree.empty()) {
        throw BoundsError("pick_site on empty tree");
    }
    std::size_t functions = 0;
    for (const Code c : tree) {
        functions += table.arity_unchecked(c) > 0 ? 1 : 0;
    }
    const bool want_function = rng.bernoulli(function_site_bias);
    const bool internal = want_function && functions > 0;
    const std::size_t pool = internal ? functions : tree.size() - functions;
    std::size_t k = rng.below(pool);
    for (std::size_t i = 0; i < tree.size(); ++i) {
        if ((table.arity_unchecked(tree[i]) > 0) == internal && k-- == 0) {
            return i;
        }
    }
    throw BoundsError("pick_site on empty tree");
}

std::size_t pick_leaf(Rng& rng, const OpcodeTable& table, TreeView tree)
{
    std::size_t leaves = 0;
    for (const Code c : tree) {
        leaves += table.arity_unchecked(c) == 0 ? 1 : 0;
    }
    if (leaves == 0) {
        throw BoundsError("pick_leaf on tree without leaves");
    }
    std::size_t k = rng.below(leaves);
    for (std::size_t i = 0; i < tree.size(); ++i) {
        if (table.arity_unchecked(tree[i]) == 0 && k-- == 0) {
            return i;
        }
    }
    throw BoundsError("pick_leaf on tree without leaves");
}

} // namespace flatgp
