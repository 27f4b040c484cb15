#include "cli.hpp"

#include "flatgp/bench.hpp"
#include "flatgp/errors.hpp"
#include "flatgp/report.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

namespace flatgp::cli {

Problem make_problem(const RunSpec& spec)
{
    if (spec.problem == "sextic") {
        return make_sextic(spec.cases, spec.engine.seed);
    }
    if (spec.problem == "mux6") {
        if (spec.cases != 64) {
            throw ConfigError(fmt::format("mux6 has exactly 64 cases, not {}", spec.cases));
        }
        return make_mux6();
    }
    return load_suite_csv(spec.problem, spec.engine.seed);
}

namespace {

    struct Toggles {
        std::string incremental = "on";
        std::string fitness_first = "on";
        std::string in_place = "on";
        std::string fatherless = "on";
    };

    std::unique_ptr<std::ofstream> open_out(const std::string& path)
    {
        if (path.empty()) {
            return nullptr;
        }
        auto f = std::make_unique<std::ofstream>(path);
        if (!*f) {
            throw ConfigError(fmt::format("cannot write {}", path));
        }
        return f;
    }

    void add_toggle(CLI::App& app, const std::string& name, std::string& value, const std::string& what)
    {
        app.add_option(name, value, what)->check(CLI::IsMember({ "on", "off" }))->capture_default_str();
    }

    int run_engine(const RunSpec& spec, std::ostream& out, std::ostream& err)
    {
        const auto problem = make_problem(spec);
        auto stats_file = open_out(spec.stats_out);
        auto trace_file = open_out(spec.trace_out);
        auto plan_file = open_out(spec.plan_dump);
        std::ostream* stats = stats_file ? stats_file.get() : &out;

        EngineConfig config = spec.engine;
        config.collect_traces = trace_file != nullptr;
        CsvObserver observer(stats, plan_file.get(), trace_file.get());
        const auto report = run(config, problem, &observer);

        if (!spec.population_out.empty()) {
            auto pop = open_out(spec.population_out);
            for (const auto& genome : report.final_population) {
                *pop << format_tree(problem.table, genome) << '\n';
            }
        }
        (stats_file ? out : err) << summary_line(report) << '\n';
        return 0;
    }


    // The benchmark subcommand is not configurable, so its section is left out.
    void write_config(std::ostream& f, const std::string& ini)
    {
        std::istringstream lines(ini);
        std::string line;
        while (std::getline(lines, line)) {
            if (!line.starts_with("splice-bench.")) {
                f << line << '\n';
            }
        }
    }

} // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app { "Flattened-tree genetic programming engine and benchmarks", "flatgp" };
    app.set_config("--config", "", "Read options from an INI/TOML file");

    RunSpec spec;
    Toggles toggles;
    auto& e = spec.engine;
    std::string save_config;
    bool dry_run = false;

    app.add_option("--problem", spec.problem, "sextic, mux6, or a suite CSV path")->capture_default_str();
    app.add_option("--cases", spec.cases, "Fitness cases for sextic")->capture_default_str()->check(
        CLI::PositiveNumber);
    app.add_option("--pop", e.population, "Population size M")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--gens", e.generations, "Generations after generation 0")->capture_default_str();
    app.add_option("--max-size", e.max_tree_size, "Maximum tree size (nodes)")->capture_default_str()->check(
        CLI::PositiveNumber);
    app.add_option("--threads", e.threads, "Worker threads t")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--seed", e.seed, "Random seed")->capture_default_str();
    app.add_option("--tournament", e.tournament_size, "Tournament size")->capture_default_str()->check(
        CLI::PositiveNumber);
    app.add_option("--xo-rate", e.crossover_rate, "Crossover rate")->capture_default_str()->check(
        CLI::Range(0.0, 1.0));
    app.add_option("--mutation-rate", e.mutation_rate, "Mutation rate")->capture_default_str()->check(
        CLI::Range(0.0, 1.0));
    add_toggle(app, "--incremental", toggles.incremental, "Incremental evaluation");
    add_toggle(app, "--fitness-first", toggles.fitness_first, "Evaluate children before building them");
    add_toggle(app, "--in-place", toggles.in_place, "Reuse a mother's buffer for her last child");
    add_toggle(app, "--fatherless", toggles.fatherless, "Copy crossover fragments out before breeding");
    app.add_flag("--elitism", e.elitism, "Clone the best individual into slot 0");
    app.add_option("--init-depth-min", e.init_depth_min, "Smallest ramped initial depth")->capture_default_str();
    app.add_option("--init-depth-max", e.init_depth_max, "Largest ramped initial depth")->capture_default_str();
    app.add_option("--mutation-depth", e.mutation_max_depth, "Largest mutation subtree depth")
        ->capture_default_str();
    app.add_flag("--verify", e.verify, "Check every child against a full evaluation");
    app.add_option("--stats-out", spec.stats_out, "Per-generation stats CSV (default stdout)");
    app.add_option("--trace-out", spec.trace_out, "Disruption trace CSV");
    app.add_option("--plan-dump", spec.plan_dump, "Breeding plan CSV");
    app.add_option("--population-out", spec.population_out, "Final population, one genome per line");
    app.add_option("--save-config", save_config, "Write the resolved options to a config file")
        ->configurable(false);
    app.add_flag("--dry-run", dry_run, "Resolve options and exit without running")->configurable(false);

    auto* bench = app.add_subcommand("splice-bench", "Time copy splices against in-place splices");
    std::vector<std::size_t> sizes { 64, 256, 1024, 4096, 16384 };
    std::size_t splices = 2000;
    std::uint64_t bench_seed = 1;
    bench->add_option("--sizes", sizes, "Genome sizes")->delimiter(',')->capture_default_str();
    bench->add_option("--splices", splices, "Splices per size")->capture_default_str();
    bench->add_option("--seed", bench_seed, "Random seed")->capture_default_str();
    bench->configurable(false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& ex) {
        return app.exit(ex, out, err);
    }

    try {
        if (bench->parsed()) {
            const auto rows = splice_microbench(sizes, splices, bench_seed);
            out << splice_bench_header() << '\n';
            for (const auto& r : rows) {
                out << splice_bench_row(r) << '\n';
            }
            return 0;
        }
        e.incremental = toggles.incremental == "on";
        e.fitness_first = toggles.fitness_first == "on";
        e.in_place = toggles.in_place == "on";
        e.fatherless = toggles.fatherless == "on";
        // derived values are written back so a saved config reproduces the run
        auto derive = [&](const std::string& name, const auto& value) {
            auto* opt = app.get_option(name);
            opt->clear();
            opt->add_result(fmt::format("{}", value));
        };
        if (app.count("--xo-rate") > 0 && app.count("--mutation-rate") == 0) {
            e.mutation_rate = 1.0 - e.crossover_rate;
            derive("--mutation-rate", e.mutation_rate);
        } else if (app.count("--mutation-rate") > 0 && app.count("--xo-rate") == 0) {
            e.crossover_rate = 1.0 - e.mutation_rate;
            derive("--xo-rate", e.crossover_rate);
        }
        if (spec.problem == "mux6" && app.count("--cases") == 0) {
            spec.cases = 64;
            derive("--cases", spec.cases);
        }
        e.validate();
        if (!save_config.empty()) {
            std::ofstream f(save_config);
            if (!f) {
                throw ConfigError(fmt::format("cannot write {}", save_config));
            }
            write_config(f, app.config_to_str(true, false));
        }
        if (dry_run) {
            return 0;
        }
        return run_engine(spec, out, err);
    } catch (const Error& ex) {
        err << "error: " << ex.what() << '\n';
        return 2;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return 1;
    }
}

} // namespace flatgp::cli
