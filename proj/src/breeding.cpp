#include "flatgp/breeding.hpp"

#include "flatgp/errors.hpp"
#include "flatgp/selection.hpp"
#include "flatgp/tree.hpp"

#include <fmt/core.h>

#include <algorithm>

namespace flatgp {

std::string_view operator_name(Operator op)
{
    switch (op) {
    case Operator::crossover:
        return "crossover";
    case Operator::mutation:
        return "mutation";
    case Operator::clone:
        return "clone";
    }
    return "?";
}

std::vector<ChildPlan> draw_parents(
    Rng& rng, std::span<const double> fitnesses, SuiteMode mode, const BreedingParams& params)
{
    const auto population = fitnesses.size();
    std::vector<ChildPlan> plan(population);
    for (std::size_t slot = 0; slot < population; ++slot) {
        auto& child = plan[slot];
        if (params.elitism && slot == 0) {
            child.op = Operator::clone;
            child.mother = best_individual(fitnesses, mode);
            continue;
        }
        child.op = rng.bernoulli(params.crossover_rate) ? Operator::crossover : Operator::mutation;
        child.mother = select_parent(rng, fitnesses, params.tournament_size, mode);
        if (child.op == Operator::crossover) {
            child.father = select_parent(rng, fitnesses, params.tournament_size, mode);
        }
    }
    return plan;
}

namespace {

    std::uint32_t narrow(std::size_t v) { return static_cast<std::uint32_t>(v); }

    void crossover_sites(Rng& rng, ChildPlan& child, TreeView mother, TreeView father, const OpcodeTable& table,
        std::size_t max_size)
    {
        for (int attempt = 0; attempt <= max_site_redraws; ++attempt) {
            const auto ms = pick_site(rng, table, mother);
            const auto fs = pick_site(rng, table, father);
            const auto excised = subtree_extent(table, mother, ms);
            const auto fragment = subtree_extent(table, father, fs);
            if (mother.size() - excised + fragment <= max_size) {
                child.mother_site = narrow(ms);
                child.father_site = narrow(fs);
                child.excised = narrow(excised);
                child.fragment_len = narrow(fragment);
                return;
            }
        }
        // leaf for leaf keeps the mother's size, which always fits
        child.mother_site = narrow(pick_leaf(rng, table, mother));
        child.father_site = narrow(pick_leaf(rng, table, father));
        child.excised = 1;
        child.fragment_len = 1;
    }

} // namespace

void choose_sites(Rng& rng, std::span<ChildPlan> plan, const GenomeLookup& genome, const OpcodeTable& table,
    const BreedingParams& params, FragmentStore& fragments)
{
    if (fragments.slots() < plan.size()) {
        fragments.reset(plan.size());
    }
    for (auto& child : plan) {
        const TreeView mother = genome(child.mother);
        child.mother_len = narrow(mother.size());
        switch (child.op) {
        case Operator::clone:
            child.mother_site = 0;
            child.excised = narrow(mother.size());
            child.fragment_len = narrow(mother.size());
            break;
        case Operator::mutation:
            child.mother_site = narrow(pick_site(rng, table, mother));
            child.excised = narrow(subtree_extent(table, mother, child.mother_site));
            break;
        case Operator::crossover:
            crossover_sites(rng, child, mother, genome(child.father), table, params.max_tree_size);
            break;
        }
    }

    StructureParams shape;
    shape.max_tree_size = std::size_t { 1 } << params.mutation_max_depth;
    for (std::size_t slot = 0; slot < plan.size(); ++slot) {
        auto& child = plan[slot];
        if (child.op != Operator::mutation) {
            continue;
        }
        const std::size_t rest = child.mother_len - child.excised;
        const std::size_t room = params.max_tree_size > rest ? params.max_tree_size - rest : 0;
        std::vector<Code> fragment;
        for (int attempt = 0; attempt <= max_site_redraws; ++attempt) {
            const int depth = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(params.mutation_max_depth)));
            fragment = random_tree(rng, table, shape, InitMethod::grow, depth);
            if (fragment.size() <= room) {
                break;
            }
            fragment.clear();
        }
        if (fragment.empty()) {
            const auto terminals = table.terminals();
            fragment.push_back(terminals[rng.below(terminals.size())]);
        }
        child.fragment_len = narrow(fragment.size());
        fragments.put(slot, std::move(fragment));
    }
}

std::vector<ChildPlan> plan_generation(Rng& rng, std::span<const double> fitnesses, SuiteMode mode,
    const GenomeLookup& genome, const OpcodeTable& table, const BreedingParams& params, FragmentStore& fragments)
{
    auto plan = draw_parents(rng, fitnesses, mode, params);
    choose_sites(rng, plan, genome, table, params, fragments);
    return plan;
}

std::vector<std::uint32_t> selection_counts(std::span<const ChildPlan> plan, std::size_t population)
{
    std::vector<std::uint32_t> counts(population, 0);
    for (const auto& child : plan) {
        ++counts.at(child.mother);
        if (child.father != no_parent) {
            ++counts.at(child.father);
        }
    }
    return counts;
}

BirthQueues::BirthQueues(std::size_t population, std::span<const ChildPlan> plan,
    std::span<const std::uint32_t> births, bool fathers_hold, bool allow_in_place)
    : plan_(plan)
    , fathers_hold_(fathers_hold)
    , allow_in_place_(allow_in_place)
    , births_(births.size())
    , pending_(population, 0)
    , outstanding_(population, 0)
    , consumed_(population, 0)
    , dispatched_(plan.size(), 1)
    , offsets_(population + 1, 0)
    , cursor_(population, 0)
    , prev_(population, no_parent)
    , next_(population, no_parent)
{
    for (const auto c : births) {
        if (c >= plan.size()) {
            throw PlanError(fmt::format("birth of child {} outside the plan", c));
        }
        if (dispatched_[c] == 0) {
            throw PlanError(fmt::format("child {} listed twice for birth", c));
        }
        dispatched_[c] = 0;
        const auto hs = holders(c);
        for (const auto h : hs) {
            if (h != no_parent) {
                if (h >= population) {
                    throw PlanError(fmt::format("parent {} outside the population", h));
                }
                ++pending_[h];
            }
        }
        ++offsets_[hs[0] + 1];
        if (hs[1] != no_parent && hs[1] != hs[0]) {
            ++offsets_[hs[1] + 1];
        }
    }
    for (std::size_t p = 0; p < population; ++p) {
        offsets_[p + 1] += offsets_[p];
    }
    children_.resize(offsets_.back());
    std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
    std::vector<std::uint32_t> ordered(births.begin(), births.end());
    std::sort(ordered.begin(), ordered.end());
    for (const auto c : ordered) {
        const auto hs = holders(c);
        children_[fill[hs[0]]++] = c;
        if (hs[1] != no_parent && hs[1] != hs[0]) {
            children_[fill[hs[1]]++] = c;
        }
    }
    for (std::size_t p = 0; p < population; ++p) {
        cursor_[p] = offsets_[p];
    }

    const auto max_pending = pending_.empty() ? 0 : *std::max_element(pending_.begin(), pending_.end());
    head_.assign(std::size_t { max_pending } + 1, no_parent);
    tail_.assign(std::size_t { max_pending } + 1, no_parent);
    for (std::uint32_t p = 0; p < population; ++p) {
        if (pending_[p] > 0) {
            append(p);
        }
    }
}

std::array<std::uint32_t, 2> BirthQueues::holders(std::uint32_t child) const
{
    const auto& c = plan_[child];
    const bool father_holds = fathers_hold_ && c.op == Operator::crossover;
    return { c.mother, father_holds ? c.father : no_parent };
}

void BirthQueues::unlink(std::uint32_t p)
{
    const auto q = pending_[p];
    if (prev_[p] != no_parent) {
        next_[prev_[p]] = next_[p];
    } else {
        head_[q] = next_[p];
    }
    if (next_[p] != no_parent) {
        prev_[next_[p]] = prev_[p];
    } else {
        tail_[q] = prev_[p];
    }
    prev_[p] = next_[p] = no_parent;
}

void BirthQueues::append(std::uint32_t p)
{
    const auto q = pending_[p];
    prev_[p] = tail_[q];
    next_[p] = no_parent;
    if (tail_[q] != no_parent) {
        next_[tail_[q]] = p;
    } else {
        head_[q] = p;
    }
    tail_[q] = p;
    min_queue_ = std::min<std::size_t>(min_queue_, q);
}

std::optional<BirthQueues::Task> BirthQueues::next_task()
{
    std::lock_guard lock(mutex_);
    while (min_queue_ < head_.size() && head_[min_queue_] == no_parent) {
        ++min_queue_;
    }
    if (min_queue_ >= head_.size()) {
        return std::nullopt;
    }
    const auto p = head_[min_queue_];
    while (dispatched_[children_[cursor_[p]]] != 0) {
        ++cursor_[p];
    }
    const auto child = children_[cursor_[p]];
    dispatched_[child] = 1;

    const auto hs = holders(child);
    for (const auto h : hs) {
        if (h == no_parent) {
            continue;
        }
        unlink(h);
        --pending_[h];
        if (pending_[h] > 0) {
            append(h);
        }
    }
    ++outstanding_[hs[0]];
    if (hs[1] != no_parent && hs[1] != hs[0]) {
        ++outstanding_[hs[1]];
    }
    const auto mother = hs[0];
    const bool in_place = allow_in_place_ && pending_[mother] == 0 && outstanding_[mother] == 1;
    if (in_place) {
        consumed_[mother] = 1;
    }
    ++handed_out_;
    return Task { child, in_place };
}

BirthQueues::Released BirthQueues::complete(const Task& task)
{
    std::lock_guard lock(mutex_);
    Released out;
    auto hs = holders(task.child);
    if (hs[1] == hs[0]) {
        hs[1] = no_parent;
    }
    for (const auto h : hs) {
        if (h == no_parent) {
            continue;
        }
        if (outstanding_[h] == 0) {
            throw PlanError(fmt::format("completion of child {} without a matching dispatch", task.child));
        }
        --outstanding_[h];
        if (pending_[h] == 0 && outstanding_[h] == 0 && consumed_[h] == 0) {
            out.ids[out.count++] = h;
        }
    }
    return out;
}

bool BirthQueues::involved(std::uint32_t parent) const { return offsets_[parent + 1] > offsets_[parent]; }

std::size_t BirthQueues::queue_of(std::uint32_t parent) const
{
    std::lock_guard lock(mutex_);
    return pending_[parent];
}

std::size_t BirthQueues::dispatched() const
{
    std::lock_guard lock(mutex_);
    return handed_out_;
}

} // namespace flatgp
