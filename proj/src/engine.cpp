#include "flatgp/engine.hpp"

#include "flatgp/errors.hpp"
#include "flatgp/hash.hpp"
#include "flatgp/selection.hpp"
#include "flatgp/tree.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <exception>
#include <memory>
#include <optional>
#include <thread>

namespace flatgp {

void EngineConfig::validate() const
{
    if (population == 0) {
        throw ConfigError("population must be at least 1");
    }
    if (threads == 0) {
        throw ConfigError("need at least one worker thread");
    }
    if (tournament_size == 0 || population < tournament_size) {
        throw ConfigError(fmt::format("population {} smaller than tournament size {}", population, tournament_size));
    }
    if (crossover_rate < 0.0 || mutation_rate < 0.0 || std::abs(crossover_rate + mutation_rate - 1.0) > 1e-9) {
        throw ConfigError(
            fmt::format("crossover rate {} and mutation rate {} must sum to 1", crossover_rate, mutation_rate));
    }
    if (max_tree_size == 0 || max_tree_size > std::numeric_limits<std::uint32_t>::max()) {
        throw ConfigError(fmt::format("max tree size {} out of range", max_tree_size));
    }
    if (init_depth_min < 1 || init_depth_max < init_depth_min) {
        throw ConfigError(fmt::format("bad initial depth range [{}, {}]", init_depth_min, init_depth_max));
    }
    if (mutation_max_depth < 1 || mutation_max_depth > 16) {
        throw ConfigError(fmt::format("mutation depth {} out of range [1, 16]", mutation_max_depth));
    }
}

StructureParams EngineConfig::structure() const
{
    StructureParams s;
    s.max_tree_size = max_tree_size;
    s.init_depth_min = init_depth_min;
    s.init_depth_max = init_depth_max;
    return s;
}

BreedingParams EngineConfig::breeding() const
{
    BreedingParams b;
    b.tournament_size = tournament_size;
    b.crossover_rate = crossover_rate;
    b.elitism = elitism;
    b.max_tree_size = max_tree_size;
    b.mutation_max_depth = mutation_max_depth;
    return b;
}

std::uint64_t population_checksum(std::span<const std::uint64_t> genome_hashes)
{
    Fnv1a h;
    for (const auto g : genome_hashes) {
        h.update(g);
    }
    return h.value();
}

namespace {

    using Clock = std::chrono::steady_clock;

    double ms_since(Clock::time_point t0)
    {
        return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    }

    // fn(worker) on each of `threads` workers. Failures are rethrown after
    // every worker has stopped.
    template <class Fn> void on_workers(std::size_t threads, Fn&& fn)
    {
        if (threads <= 1) {
            fn(std::size_t { 0 });
            return;
        }
        std::vector<std::exception_ptr> errors(threads);
        {
            std::vector<std::jthread> pool;
            pool.reserve(threads);
            for (std::size_t w = 0; w < threads; ++w) {
                pool.emplace_back([&, w] {
                    try {
                        fn(w);
                    } catch (...) {
                        errors[w] = std::current_exception();
                    }
                });
            }
        }
        for (auto& e : errors) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
    }

    template <class Fn> void parallel_for(std::size_t threads, std::size_t n, Fn&& fn)
    {
        std::atomic<std::size_t> next { 0 };
        std::atomic<bool> failed { false };
        on_workers(std::min(threads, std::max<std::size_t>(n, 1)), [&](std::size_t w) {
            try {
                for (std::size_t i = next++; i < n && !failed; i = next++) {
                    fn(w, i);
                }
            } catch (...) {
                failed = true;
                throw;
            }
        });
    }

    bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

    struct Individual {
        std::optional<BufferHandle> buffer;
        std::uint32_t len = 0;
        double fitness = 0.0;
        std::uint64_t hash = 0;
    };

    template <class Lane> struct Worker {
        Worker(const Problem& problem, std::size_t max_tree_size)
            : incremental(problem.table, problem.suite, max_tree_size)
            , batch(problem.table, problem.suite, max_tree_size)
            , scratch(max_tree_size)
            , check_scratch(max_tree_size)
        {
        }

        IncrementalEvaluator<Lane> incremental;
        BatchEvaluator<Lane> batch;
        std::vector<Code> scratch;
        std::vector<Code> check_scratch;
        std::vector<Code> fragment_copy;
        EvalCounters counters;
        std::size_t inherited = 0;
        std::size_t in_place = 0;

        void reset_counts()
        {
            counters = {};
            inherited = 0;
            in_place = 0;
        }
    };

    template <class Lane> class Runner {
    public:
        Runner(const EngineConfig& config, const Problem& problem, EngineObserver* observer)
            : cfg_(config)
            , problem_(problem)
            , observer_(observer)
            , rng_(config.seed, streams::master)
            , pool_(config.pool_capacity(), config.max_tree_size)
            , n_cases_(problem.suite.n_cases())
        {
            for (std::size_t w = 0; w < cfg_.threads; ++w) {
                workers_.push_back(std::make_unique<Worker<Lane>>(problem_, cfg_.max_tree_size));
            }
        }

        RunReport run()
        {
            const auto start = Clock::now();
            RunReport report;
            report.pool_capacity = pool_.capacity();
            report.generations.push_back(initialize());
            notify(report.generations.back());
            for (std::size_t g = 1; g <= cfg_.generations; ++g) {
                report.generations.push_back(step(g));
                notify(report.generations.back());
            }
            for (std::size_t i = 0; i < pop_.size(); ++i) {
                const auto tree = genome(static_cast<std::uint32_t>(i));
                report.final_population.emplace_back(tree.begin(), tree.end());
                report.final_fitness.push_back(pop_[i].fitness);
                pool_.release(*pop_[i].buffer);
                pop_[i].buffer.reset();
            }
            for (const auto& s : report.generations) {
                report.total_equivalent_ops += s.equivalent_ops;
                report.total_executed_ops += s.executed_ops;
                report.total_crossovers += s.crossovers;
                report.total_resized_crossovers += s.resized_crossovers;
            }
            report.pool_peak = pool_.peak();
            report.wall_ms = ms_since(start);
            return report;
        }

    private:
        std::size_t population() const { return cfg_.population; }
        bool last(std::size_t g) const { return g == cfg_.generations; }

        TreeView genome(std::uint32_t id) const
        {
            const auto& ind = pop_[id];
            if (!ind.buffer) {
                throw AccountingError(fmt::format("individual {} has no live buffer", id));
            }
            return pool_.data(*ind.buffer).first(ind.len);
        }

        // Inserted subtree of child `slot` of the current plan.
        TreeView fragment_of(std::uint32_t slot) const
        {
            const auto& p = plan_[slot];
            switch (p.op) {
            case Operator::clone:
                return genome(p.mother);
            case Operator::mutation:
                return fragments_.get(slot);
            case Operator::crossover:
                break;
            }
            if (cfg_.fatherless) {
                return fragments_.get(slot);
            }
            return genome(p.father).subspan(p.father_site, p.fragment_len);
        }

        static std::uint64_t recipe_hash(TreeView mother, const ChildPlan& p, TreeView fragment)
        {
            return Fnv1a {}
                .update(mother.first(p.mother_site))
                .update(fragment)
                .update(mother.subspan(std::size_t { p.mother_site } + p.excised))
                .value();
        }

        void release(std::uint32_t id)
        {
            pool_.release(*pop_[id].buffer);
            pop_[id].buffer.reset();
        }

        GenerationStats initialize()
        {
            const auto t0 = Clock::now();
            pool_.begin_window();
            for (auto& w : workers_) {
                w->reset_counts();
            }
            const auto trees = ramped_half_and_half(rng_, problem_.table, cfg_.structure(), population());
            pop_.assign(population(), {});
            for (std::size_t i = 0; i < trees.size(); ++i) {
                const auto h = pool_.acquire();
                std::copy(trees[i].begin(), trees[i].end(), pool_.data(h).begin());
                pop_[i].buffer = h;
                pop_[i].len = static_cast<std::uint32_t>(trees[i].size());
                pop_[i].hash = genome_hash(trees[i]);
            }
            parallel_for(cfg_.threads, population(), [&](std::size_t w, std::size_t i) {
                auto& worker = *workers_[w];
                const auto tree = genome(static_cast<std::uint32_t>(i));
                pop_[i].fitness = fitness_of(worker.batch.eval(tree), problem_.suite);
                const std::uint64_t ops = std::uint64_t { tree.size() } * n_cases_;
                worker.counters.executed_ops += ops;
                worker.counters.equivalent_ops += ops;
            });

            std::vector<std::uint8_t> none(population(), 0);
            if (!last(0)) {
                auto next_plan = draw_parents(rng_, fitnesses(pop_), problem_.suite.mode(), cfg_.breeding());
                adopt_plan(std::move(next_plan), 1);
            }
            return finish_stats(0, t0, none);
        }

        std::vector<double> fitnesses(const std::vector<Individual>& pop) const
        {
            std::vector<double> f(pop.size());
            std::transform(pop.begin(), pop.end(), f.begin(), [](const Individual& ind) { return ind.fitness; });
            return f;
        }

        // pop_ holds the parents of `next_plan`. Free the unselected, choose
        // sites and fragments, then free individuals that only donate subtrees.
        void adopt_plan(std::vector<ChildPlan>&& next_plan, std::size_t child_gen)
        {
            const auto counts = selection_counts(next_plan, population());
            for (std::uint32_t i = 0; i < population(); ++i) {
                if (pop_[i].buffer && counts[i] == 0) {
                    release(i);
                }
            }
            plan_ = std::move(next_plan);
            const GenomeLookup lookup = [this](std::uint32_t id) { return genome(id); };
            choose_sites(rng_, plan_, lookup, problem_.table, cfg_.breeding(), fragments_);

            if (cfg_.fatherless) {
                std::vector<std::uint8_t> mother(population(), 0);
                for (std::uint32_t c = 0; c < plan_.size(); ++c) {
                    const auto& p = plan_[c];
                    mother[p.mother] = 1;
                    if (p.op == Operator::crossover) {
                        fragments_.put(c, genome(p.father).subspan(p.father_site, p.fragment_len));
                    }
                }
                for (std::uint32_t i = 0; i < population(); ++i) {
                    if (pop_[i].buffer && mother[i] == 0) {
                        release(i);
                    }
                }
            }
            if (observer_) {
                observer_->on_plan(child_gen, plan_);
            }
        }

        void evaluate_child(Worker<Lane>& w, std::uint32_t c, TreeView built = {})
        {
            const auto& p = plan_[c];
            auto& child = next_[c];
            const TreeView mother = genome(p.mother);
            const TreeView fragment = fragment_of(c);
            const double mother_fitness = pop_[p.mother].fitness;
            child.len = static_cast<std::uint32_t>(p.child_size());
            child.hash = recipe_hash(mother, p, fragment);
            const std::uint64_t equivalent = std::uint64_t { child.len } * n_cases_;
            w.counters.equivalent_ops += equivalent;

            if (p.op == Operator::clone) {
                child.fitness = mother_fitness;
                ++w.inherited;
            } else if (cfg_.incremental) {
                auto r = w.incremental.eval(mother, p.splice(), fragment, mother_fitness);
                child.fitness = r.fitness;
                w.counters.executed_ops += r.executed_ops;
                w.inherited += r.inherited ? 1 : 0;
                if (cfg_.collect_traces) {
                    traces_[c] = std::move(r.trace);
                }
            } else {
                TreeView tree = built;
                if (tree.empty()) {
                    const auto len = splice_copy(mother, p.splice(), fragment, w.scratch);
                    tree = TreeView(w.scratch).first(len);
                }
                child.fitness = fitness_of(w.batch.eval(tree), problem_.suite);
                w.counters.executed_ops += equivalent;
            }
            if (cfg_.verify) {
                verify_child(w, c, mother, fragment);
            }
        }

        void verify_child(Worker<Lane>& w, std::uint32_t c, TreeView mother, TreeView fragment)
        {
            const auto& p = plan_[c];
            const auto len = splice_copy(mother, p.splice(), fragment, w.check_scratch);
            const TreeView tree = TreeView(w.check_scratch).first(len);
            check_tree(problem_.table, tree);
            if (genome_hash(tree) != next_[c].hash) {
                throw Error(fmt::format("child {}: recipe hash differs from genome hash", c));
            }
            const double full = fitness_of(w.batch.eval(tree), problem_.suite);
            if (!same_bits(full, next_[c].fitness)) {
                throw Error(fmt::format(
                    "child {}: fast fitness {} differs from full evaluation {}", c, next_[c].fitness, full));
            }
        }

        // Builds the children flagged in `births` through the birth queues.
        // When `evaluate` is set each child is also evaluated, before its
        // mother's buffer can be overwritten.
        void materialize(const std::vector<std::uint8_t>& births, bool evaluate)
        {
            std::vector<std::uint32_t> slots;
            for (std::uint32_t c = 0; c < births.size(); ++c) {
                if (births[c] != 0) {
                    slots.push_back(c);
                } else {
                    fragments_.drop(c);
                }
            }
            BirthQueues queues(population(), plan_, slots, !cfg_.fatherless, cfg_.in_place);
            for (std::uint32_t i = 0; i < population(); ++i) {
                if (pop_[i].buffer && !queues.involved(i)) {
                    release(i);
                }
            }

            std::atomic<bool> failed { false };
            on_workers(std::min(cfg_.threads, std::max<std::size_t>(slots.size(), 1)), [&](std::size_t wi) {
                auto& w = *workers_[wi];
                try {
                    while (!failed) {
                        const auto task = queues.next_task();
                        if (!task) {
                            break;
                        }
                        birth(w, *task, evaluate);
                        const auto freed = queues.complete(*task);
                        for (std::size_t k = 0; k < freed.count; ++k) {
                            release(freed.ids[k]);
                        }
                    }
                } catch (...) {
                    failed = true;
                    throw;
                }
            });

            for (std::uint32_t i = 0; i < population(); ++i) {
                if (pop_[i].buffer) {
                    throw AccountingError(fmt::format("parent {} still holds a buffer after breeding", i));
                }
            }
        }

        void birth(Worker<Lane>& w, BirthQueues::Task task, bool evaluate)
        {
            const auto c = task.child;
            const auto& p = plan_[c];
            auto& child = next_[c];
            const bool full_after = evaluate && !cfg_.incremental && p.op != Operator::clone;
            if (evaluate && !full_after) {
                evaluate_child(w, c);
            }

            if (p.op == Operator::clone && task.in_place) {
                child.buffer = pop_[p.mother].buffer;
                pop_[p.mother].buffer.reset();
            } else if (task.in_place) {
                TreeView fragment = fragment_of(c);
                if (!cfg_.fatherless && p.op == Operator::crossover && p.father == p.mother) {
                    // the fragment lives in the buffer about to be rewritten
                    w.fragment_copy.assign(fragment.begin(), fragment.end());
                    fragment = w.fragment_copy;
                }
                const auto handle = *pop_[p.mother].buffer;
                splice_in_place(pool_.data(handle), p.mother_len, p.splice(), fragment);
                child.buffer = handle;
                pop_[p.mother].buffer.reset();
                ++w.in_place;
            } else {
                const auto handle = pool_.acquire();
                splice_copy(genome(p.mother), p.splice(), fragment_of(c), pool_.data(handle));
                child.buffer = handle;
            }
            fragments_.drop(c);

            const auto built = pool_.data(*child.buffer).first(p.child_size());
            if (full_after) {
                child.len = static_cast<std::uint32_t>(p.child_size());
                child.fitness = fitness_of(w.batch.eval(built), problem_.suite);
                child.hash = genome_hash(built);
                const std::uint64_t ops = std::uint64_t { child.len } * n_cases_;
                w.counters.equivalent_ops += ops;
                w.counters.executed_ops += ops;
            }
            if (cfg_.verify) {
                check_tree(problem_.table, built);
                if (genome_hash(built) != child.hash) {
                    throw Error(fmt::format("child {}: built genome differs from its recipe", c));
                }
            }
        }

        GenerationStats step(std::size_t g)
        {
            const auto t0 = Clock::now();
            pool_.begin_window();
            for (auto& w : workers_) {
                w->reset_counts();
            }
            next_.assign(population(), {});
            traces_.assign(cfg_.collect_traces ? population() : 0, std::nullopt);

            std::vector<std::uint8_t> births(population(), 1);
            std::optional<std::vector<ChildPlan>> next_plan;
            if (cfg_.fitness_first) {
                parallel_for(cfg_.threads, population(), [&](std::size_t w, std::size_t c) {
                    evaluate_child(*workers_[w], static_cast<std::uint32_t>(c));
                });
                if (!last(g)) {
                    next_plan = draw_parents(rng_, fitnesses(next_), problem_.suite.mode(), cfg_.breeding());
                    const auto counts = selection_counts(*next_plan, population());
                    for (std::size_t c = 0; c < population(); ++c) {
                        births[c] = counts[c] > 0 ? 1 : 0;
                    }
                }
                materialize(births, false);
            } else {
                materialize(births, true);
                if (!last(g)) {
                    next_plan = draw_parents(rng_, fitnesses(next_), problem_.suite.mode(), cfg_.breeding());
                }
            }

            if (observer_ && cfg_.collect_traces) {
                for (std::uint32_t c = 0; c < traces_.size(); ++c) {
                    if (traces_[c]) {
                        observer_->on_trace(g, c, *traces_[c]);
                    }
                }
            }
            if (observer_) {
                observer_->on_births(g, births);
            }

            std::size_t crossovers = 0;
            std::size_t resized = 0;
            for (const auto& p : plan_) {
                if (p.op == Operator::crossover) {
                    ++crossovers;
                    resized += p.excised != p.fragment_len ? 1 : 0;
                }
            }

            pop_.swap(next_);
            next_.clear();
            if (next_plan) {
                adopt_plan(std::move(*next_plan), g + 1);
            }
            auto stats = finish_stats(g, t0, births);
            stats.crossovers = crossovers;
            stats.resized_crossovers = resized;
            return stats;
        }

        GenerationStats finish_stats(std::size_t g, Clock::time_point t0, const std::vector<std::uint8_t>& births)
        {
            GenerationStats s;
            s.gen = g;
            for (const auto& w : workers_) {
                s.equivalent_ops += w->counters.equivalent_ops;
                s.executed_ops += w->counters.executed_ops;
                s.inherited += w->inherited;
                s.in_place_births += w->in_place;
            }
            s.skip_fraction = s.equivalent_ops > 0
                ? 1.0 - static_cast<double>(s.executed_ops) / static_cast<double>(s.equivalent_ops)
                : 0.0;
            double fitness_sum = 0.0;
            double size_sum = 0.0;
            std::vector<std::uint64_t> hashes(population());
            for (std::size_t i = 0; i < population(); ++i) {
                fitness_sum += pop_[i].fitness;
                size_sum += pop_[i].len;
                hashes[i] = pop_[i].hash;
            }
            const auto f = fitnesses(pop_);
            s.best_fitness = f[best_individual(f, problem_.suite.mode())];
            s.mean_fitness = fitness_sum / static_cast<double>(population());
            s.mean_size = size_sum / static_cast<double>(population());
            s.children_skipped = static_cast<std::size_t>(std::count(births.begin(), births.end(), 0));
            if (g == 0) {
                s.children_skipped = 0;
            }
            s.checksum = population_checksum(hashes);
            s.buffers_peak = pool_.window_peak();
            s.wall_ms = ms_since(t0);
            return s;
        }

        void notify(const GenerationStats& s)
        {
            if (observer_) {
                observer_->on_generation(s);
            }
        }

        const EngineConfig& cfg_;
        const Problem& problem_;
        EngineObserver* observer_;
        Rng rng_;
        BufferPool pool_;
        FragmentStore fragments_;
        std::uint64_t n_cases_;
        std::vector<std::unique_ptr<Worker<Lane>>> workers_;
        std::vector<Individual> pop_;
        std::vector<Individual> next_;
        std::vector<ChildPlan> plan_;
        std::vector<std::optional<DisruptionTrace>> traces_;
    };

} // namespace

RunReport run(const EngineConfig& config, const Problem& problem, EngineObserver* observer)
{
    config.validate();
    if (problem.table.functions().empty() || problem.table.terminals().empty()) {
        throw ConfigError(fmt::format("problem {} needs both functions and terminals", problem.name));
    }
    if (problem.suite.n_cases() == 0) {
        throw ConfigError(fmt::format("problem {} has no fitness cases", problem.name));
    }
    if (problem.suite.mode() == SuiteMode::packed) {
        Runner<std::uint64_t> runner(config, problem, observer);
        return runner.run();
    }
    Runner<double> runner(config, problem, observer);
    return runner.run();
}

} // namespace flatgp
