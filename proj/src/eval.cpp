#include "flatgp/eval.hpp"

#include "flatgp/errors.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace flatgp {

namespace {

    void check_widths(std::size_t l, std::size_t r, std::size_t o)
    {
        if (l != r || l != o) {
            throw MalformedGenome(fmt::format("lane widths differ ({}, {}, {})", l, r, o));
        }
    }

} // namespace

void apply_op(Fn fn, std::span<const double> left, std::span<const double> right, std::span<double> out)
{
    check_widths(left.size(), right.size(), out.size());
    const std::size_t n = out.size();
    const double* l = left.data();
    const double* r = right.data();
    double* o = out.data();
    switch (fn) {
    case Fn::add:
        for (std::size_t i = 0; i < n; ++i) {
            o[i] = l[i] + r[i];
        }
        return;
    case Fn::sub:
        for (std::size_t i = 0; i < n; ++i) {
            o[i] = l[i] - r[i];
        }
        return;
    case Fn::mul:
        for (std::size_t i = 0; i < n; ++i) {
            o[i] = l[i] * r[i];
        }
        return;
    case Fn::pdiv:
        for (std::size_t i = 0; i < n; ++i) {
            o[i] = std::fabs(r[i]) < pdiv_threshold ? 1.0 : l[i] / r[i];
        }
        return;
    default:
        throw MalformedGenome("boolean opcode applied to numeric lanes");
    }
}

void apply_op(Fn fn, std::span<const std::uint64_t> left, std::span<const std::uint64_t> right,
    std::span<std::uint64_t> out)
{
    check_widths(left.size(), right.size(), out.size());
    const std::size_t n = out.size();
    const std::uint64_t* l = left.data();
    const std::uint64_t* r = right.data();
    std::uint64_t* o = out.data();
    switch (fn) {
    case Fn::and_:
        for (std::size_t i = 0; i < n; ++i) {
            o[i] = l[i] & r[i];
        }
        return;
    case Fn::or_:
        for (std::size_t i = 0; i < n; ++i) {
            o[i] = l[i] | r[i];
        }
        return;
    case Fn::nand:
        for (std::size_t i = 0; i < n; ++i) {
            o[i] = ~(l[i] & r[i]);
        }
        return;
    case Fn::nor:
        for (std::size_t i = 0; i < n; ++i) {
            o[i] = ~(l[i] | r[i]);
        }
        return;
    default:
        throw MalformedGenome("numeric opcode applied to packed boolean lanes");
    }
}

double fitness_of(std::span<const double> root, const TestSuite& suite)
{
    const auto targets = suite.targets<double>();
    if (root.size() != targets.size()) {
        throw MalformedGenome("root lanes do not match the suite");
    }
    double error = 0.0;
    for (std::size_t i = 0; i < root.size(); ++i) {
        error += std::fabs(root[i] - targets[i]);
    }
    return std::isnan(error) ? std::numeric_limits<double>::infinity() : error;
}

double fitness_of(std::span<const std::uint64_t> root, const TestSuite& suite)
{
    const auto targets = suite.targets<std::uint64_t>();
    if (root.size() != targets.size()) {
        throw MalformedGenome("root lanes do not match the suite");
    }
    std::uint64_t hits = 0;
    for (std::size_t w = 0; w < root.size(); ++w) {
        std::uint64_t same = ~(root[w] ^ targets[w]);
        if (w + 1 == root.size()) {
            same &= suite.tail_mask();
        }
        hits += static_cast<std::uint64_t>(std::popcount(same));
    }
    return static_cast<double>(hits);
}

template <class Lane>
BatchEvaluator<Lane>::BatchEvaluator(const OpcodeTable& table, const TestSuite& suite, std::size_t stack_limit)
    : table_(&table)
    , suite_(&suite)
    , width_(suite.width())
    , stack_limit_(stack_limit)
{
    constexpr auto wanted = std::is_same_v<Lane, double> ? SuiteMode::numeric : SuiteMode::packed;
    if (suite.mode() != wanted) {
        throw MalformedGenome("evaluator lane type does not match the suite mode");
    }
    if (stack_limit == 0) {
        throw ConfigError("evaluation stack limit must be positive");
    }
}

template <class Lane> void BatchEvaluator<Lane>::grow_to(std::size_t levels)
{
    if (levels > stack_limit_) {
        throw ConfigError(fmt::format("evaluation stack bound {} exceeded", stack_limit_));
    }
    const std::size_t target = std::min(stack_limit_, std::max(levels, 2 * block_of_.size()));
    const std::size_t old = block_of_.size();
    storage_.resize(target * width_);
    frames_.resize(target);
    for (std::size_t b = old; b < target; ++b) {
        block_of_.push_back(b);
    }
}

template <class Lane> void BatchEvaluator<Lane>::load(Code leaf, std::span<Lane> out) const
{
    const auto& op = table_->info(leaf);
    if (op.kind == OpKind::variable) {
        const auto col = suite_->template column<Lane>(op.column);
        std::copy(col.begin(), col.end(), out.begin());
        return;
    }
    if constexpr (std::is_same_v<Lane, double>) {
        std::fill(out.begin(), out.end(), op.value);
    } else {
        throw MalformedGenome(fmt::format("constant {} in a packed boolean tree", op.name));
    }
}

template <class Lane> std::span<const Lane> BatchEvaluator<Lane>::eval(TreeView tree, std::size_t* extent)
{
    std::size_t depth = 0; // level of the next node; the root is level 0
    high_water_ = 0;
    for (std::size_t i = 0; i < tree.size(); ++i) {
        const Code c = tree[i];
        const auto a = table_->arity(c);
        if (depth + 1 > high_water_) {
            high_water_ = depth + 1;
            if (high_water_ > block_of_.size()) {
                grow_to(high_water_);
            }
        }
        if (a == 2) {
            frames_[depth] = { table_->info(c).fn, false };
            ++depth;
            continue;
        }
        if (a != 0) {
            throw MalformedGenome(fmt::format("opcode {} has unsupported arity {}", c, a));
        }
        load(c, block(depth));
        // hand completed values up until one becomes a pending first argument
        while (true) {
            if (depth == 0) {
                if (extent != nullptr) {
                    *extent = i + 1;
                }
                return block(0);
            }
            Frame& parent = frames_[depth - 1];
            if (!parent.has_first) {
                std::swap(block_of_[depth - 1], block_of_[depth]);
                parent.has_first = true;
                break;
            }
            const auto dst = block(depth - 1);
            apply_op(parent.fn, dst, block(depth), dst);
            --depth;
        }
    }
    throw MalformedGenome("tree ends before its last function has all arguments");
}

template class BatchEvaluator<double>;
template class BatchEvaluator<std::uint64_t>;

template <class Lane>
FullEvaluation<Lane> eval_full(
    const OpcodeTable& table, TreeView tree, const TestSuite& suite, EvalCounters* counters, std::size_t stack_limit)
{
    BatchEvaluator<Lane> ev(table, suite, stack_limit == 0 ? std::max<std::size_t>(tree.size(), 1) : stack_limit);
    std::size_t extent = 0;
    const auto root = ev.eval(tree, &extent);
    if (extent != tree.size()) {
        throw MalformedGenome(fmt::format("trailing opcodes after complete tree at {}", extent));
    }
    if (counters != nullptr) {
        const auto ops = static_cast<std::uint64_t>(tree.size()) * suite.n_cases();
        counters->executed_ops += ops;
        counters->equivalent_ops += ops;
    }
    FullEvaluation<Lane> out { { root.begin(), root.end() }, 0.0 };
    out.fitness = fitness_of(std::span<const Lane>(out.root), suite);
    return out;
}

template FullEvaluation<double> eval_full<double>(
    const OpcodeTable&, TreeView, const TestSuite&, EvalCounters*, std::size_t);
template FullEvaluation<std::uint64_t> eval_full<std::uint64_t>(
    const OpcodeTable&, TreeView, const TestSuite&, EvalCounters*, std::size_t);

} // namespace flatgp
