#pragma once

#include "flatgp/opcodes.hpp"
#include "flatgp/suite.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace flatgp {

// Opcode x case evaluations. equivalent_ops counts every opcode of every
// evaluated individual as if it had been interpreted on every case.
struct EvalCounters {
    std::uint64_t executed_ops = 0;
    std::uint64_t equivalent_ops = 0;

    EvalCounters& operator+=(const EvalCounters& o)
    {
        executed_ops += o.executed_ops;
        equivalent_ops += o.equivalent_ops;
        return *this;
    }
};

// Denominators smaller than this in magnitude make PDIV return 1.
inline constexpr double pdiv_threshold = 1e-9;

// Elementwise function application. Numeric lanes support ADD SUB MUL PDIV,
// packed lanes the four bitwise gates; anything else is a MalformedGenome.
// `out` may alias either input.
void apply_op(Fn fn, std::span<const double> left, std::span<const double> right, std::span<double> out);
void apply_op(Fn fn, std::span<const std::uint64_t> left, std::span<const std::uint64_t> right,
    std::span<std::uint64_t> out);

// Sum of absolute errors; NaN maps to +infinity so it always loses.
double fitness_of(std::span<const double> root, const TestSuite& suite);
// Hits: matching bits over all valid cases.
double fitness_of(std::span<const std::uint64_t> root, const TestSuite& suite);

// One pass through the prefix opcodes with every opcode applied to all lanes.
// An explicit stack holds one lane block per tree level, so a tree of height
// h touches exactly h blocks. The evaluator owns its scratch storage and is
// not shared between threads.
template <class Lane> class BatchEvaluator {
public:
    BatchEvaluator(const OpcodeTable& table, const TestSuite& suite, std::size_t stack_limit);

    // Evaluates the complete subtree that starts at tree[0]; trailing opcodes
    // after it are ignored. The returned lanes stay valid until the next call.
    std::span<const Lane> eval(TreeView tree, std::size_t* extent = nullptr);

    std::size_t width() const { return width_; }
    // Deepest stack level used by the last eval().
    std::size_t stack_high_water() const { return high_water_; }
    // Blocks allocated so far (grows on demand up to the limit).
    std::size_t stack_capacity() const { return block_of_.size(); }

private:
    struct Frame {
        Fn fn;
        bool has_first;
    };

    std::span<Lane> block(std::size_t level) { return { storage_.data() + block_of_[level] * width_, width_ }; }
    void grow_to(std::size_t levels);
    void load(Code leaf, std::span<Lane> out) const;

    const OpcodeTable* table_;
    const TestSuite* suite_;
    std::size_t width_;
    std::size_t stack_limit_;
    std::vector<Lane> storage_;
    std::vector<std::size_t> block_of_;
    std::vector<Frame> frames_;
    std::size_t high_water_ = 0;
};

extern template class BatchEvaluator<double>;
extern template class BatchEvaluator<std::uint64_t>;

template <class Lane> struct FullEvaluation {
    std::vector<Lane> root;
    double fitness;
};

// Convenience wrapper: evaluates a whole tree and adds len x n_cases to both
// counters.
template <class Lane>
FullEvaluation<Lane> eval_full(const OpcodeTable& table, TreeView tree, const TestSuite& suite,
    EvalCounters* counters = nullptr, std::size_t stack_limit = 0);

} // namespace flatgp
