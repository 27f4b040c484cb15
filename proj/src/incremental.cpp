#include "flatgp/incremental.hpp"

#include "flatgp/errors.hpp"

#include <fmt/core.h>

#include <bit>
#include <cmath>

namespace flatgp {

std::vector<Ancestor> ancestors_of(const OpcodeTable& table, TreeView tree, std::size_t site)
{
    if (site >= tree.size()) {
        throw BoundsError(fmt::format("site {} out of range (len {})", site, tree.size()));
    }
    struct Open {
        std::size_t index;
        std::uint8_t arity;
        std::uint8_t done;
    };
    std::vector<Open> open;
    for (std::size_t i = 0; i < site; ++i) {
        const auto a = table.arity(tree[i]);
        if (a > 0) {
            open.push_back({ i, a, 0 });
            continue;
        }
        while (!open.empty() && ++open.back().done == open.back().arity) {
            open.pop_back();
        }
    }
    std::vector<Ancestor> chain;
    chain.reserve(open.size());
    for (auto it = open.rbegin(); it != open.rend(); ++it) {
        chain.push_back({ it->index, it->done });
    }
    return chain;
}

template <class Lane>
IncrementalEvaluator<Lane>::IncrementalEvaluator(const OpcodeTable& table, const TestSuite& suite, std::size_t stack_limit)
    : table_(&table)
    , suite_(&suite)
    , batch_(table, suite, stack_limit)
    , old_(suite.width())
    , new_(suite.width())
    , old_next_(suite.width())
    , new_next_(suite.width())
{
}

template <class Lane> TraceLevel IncrementalEvaluator<Lane>::compare() const
{
    TraceLevel level;
    if constexpr (std::is_same_v<Lane, double>) {
        double sum = 0.0;
        for (std::size_t i = 0; i < old_.size(); ++i) {
            if (std::bit_cast<std::uint64_t>(old_[i]) != std::bit_cast<std::uint64_t>(new_[i])) {
                ++level.disrupted_cases;
                const double d = new_[i] - old_[i];
                sum += d * d;
            }
        }
        if (level.disrupted_cases > 0) {
            level.rms_difference = std::sqrt(sum / static_cast<double>(level.disrupted_cases));
        }
    } else {
        for (std::size_t w = 0; w < old_.size(); ++w) {
            std::uint64_t diff = old_[w] ^ new_[w];
            if (w + 1 == old_.size()) {
                diff &= suite_->tail_mask();
            }
            level.disrupted_cases += static_cast<std::size_t>(std::popcount(diff));
        }
        // a flipped bit differs by exactly one
        level.rms_difference = level.disrupted_cases > 0 ? 1.0 : 0.0;
    }
    return level;
}

template <class Lane>
IncrementalResult IncrementalEvaluator<Lane>::eval(
    TreeView mother, SpliceSite at, TreeView fragment, double mother_fitness)
{
    if (at.site >= mother.size() || at.excised == 0 || at.excised > mother.size() - at.site) {
        throw PlanError(fmt::format("site {} extent {} inconsistent with mother of length {}", at.site, at.excised,
            mother.size()));
    }
    IncrementalResult result;
    std::uint64_t nodes = 0;

    std::size_t extent = 0;
    auto lanes = batch_.eval(fragment, &extent);
    if (extent != fragment.size()) {
        throw PlanError("fragment is not a single complete subtree");
    }
    std::copy(lanes.begin(), lanes.end(), new_.begin());
    nodes += fragment.size();

    lanes = batch_.eval(mother.subspan(at.site), &extent);
    if (extent != at.excised) {
        throw PlanError(fmt::format("excised extent {} at site {} does not match subtree extent {}", at.excised,
            at.site, extent));
    }
    std::copy(lanes.begin(), lanes.end(), old_.begin());
    nodes += at.excised;

    auto finish = [&](TraceLevel level, std::size_t index) {
        result.trace.levels.push_back(level);
        if (level.disrupted_cases == 0) {
            result.trace.terminated_at = index;
            return true;
        }
        return false;
    };

    bool done = finish(compare(), 0);
    if (!done) {
        // the changed region of the mother, grown by one ancestor per level
        std::size_t begin = at.site;
        std::size_t end = at.site + at.excised;
        const auto chain = ancestors_of(*table_, mother, at.site);
        for (std::size_t k = 0; k < chain.size() && !done; ++k) {
            const auto& anc = chain[k];
            const Fn fn = table_->info(mother[anc.index]).fn;
            if (anc.arg == 0) {
                lanes = batch_.eval(mother.subspan(end), &extent);
                apply_op(fn, std::span<const Lane>(old_), lanes, std::span<Lane>(old_next_));
                apply_op(fn, std::span<const Lane>(new_), lanes, std::span<Lane>(new_next_));
                end += extent;
            } else {
                lanes = batch_.eval(mother.subspan(anc.index + 1), &extent);
                if (anc.index + 1 + extent != begin) {
                    throw PlanError("ancestor chain does not enclose the site");
                }
                apply_op(fn, lanes, std::span<const Lane>(old_), std::span<Lane>(old_next_));
                apply_op(fn, lanes, std::span<const Lane>(new_), std::span<Lane>(new_next_));
            }
            begin = anc.index;
            nodes += extent + 2;
            old_.swap(old_next_);
            new_.swap(new_next_);
            done = finish(compare(), k + 1);
        }
    }

    result.inherited = done;
    result.fitness = done ? mother_fitness : fitness_of(std::span<const Lane>(new_), *suite_);
    result.executed_ops = nodes * suite_->n_cases();
    return result;
}

template class IncrementalEvaluator<double>;
template class IncrementalEvaluator<std::uint64_t>;

} // namespace flatgp
