#include "flatgp/report.hpp"

#include <fmt/core.h>

#include <ostream>

namespace flatgp {

std::string_view stats_header()
{
    return "gen,best_fitness,mean_fitness,mean_size,equivalent_ops,executed_ops,skip_fraction,children_skipped,"
           "buffers_peak,wall_ms";
}

std::string stats_row(const GenerationStats& s)
{
    return fmt::format("{},{},{},{},{},{},{},{},{},{:.3f}", s.gen, s.best_fitness, s.mean_fitness, s.mean_size,
        s.equivalent_ops, s.executed_ops, s.skip_fraction, s.children_skipped, s.buffers_peak, s.wall_ms);
}

std::string_view plan_header()
{
    return "gen,slot,op,mother,father,mother_site,excised_extent,father_site,fragment_len,mother_len,child_len";
}

std::string plan_row(std::size_t gen, std::size_t slot, const ChildPlan& p)
{
    const std::string father = p.father == no_parent ? std::string {} : fmt::format("{}", p.father);
    return fmt::format("{},{},{},{},{},{},{},{},{},{},{}", gen, slot, operator_name(p.op), p.mother, father,
        p.mother_site, p.excised, p.op == Operator::crossover ? fmt::format("{}", p.father_site) : std::string {},
        p.fragment_len, p.mother_len, p.child_size());
}

std::string_view trace_header() { return "gen,child,levels_climbed,terminated_at,levels"; }

std::string trace_row(std::size_t gen, std::uint32_t child, const DisruptionTrace& trace)
{
    std::string levels;
    for (const auto& l : trace.levels) {
        if (!levels.empty()) {
            levels += ' ';
        }
        levels += fmt::format("{}:{}", l.disrupted_cases, l.rms_difference);
    }
    const std::string end = trace.terminated_at ? fmt::format("{}", *trace.terminated_at) : std::string("root");
    return fmt::format("{},{},{},{},{}", gen, child, trace.levels_climbed(), end, levels);
}

std::string summary_line(const RunReport& r)
{
    const double skip = r.total_equivalent_ops > 0
        ? 1.0 - static_cast<double>(r.total_executed_ops) / static_cast<double>(r.total_equivalent_ops)
        : 0.0;
    const double resized = r.total_crossovers > 0
        ? static_cast<double>(r.total_resized_crossovers) / static_cast<double>(r.total_crossovers)
        : 0.0;
    return fmt::format("total equivalent_ops={} executed_ops={} skip_fraction={:.4f} wall_ms={:.1f} "
                       "equivalent_ops_per_s={:.4g} pool_peak={}/{} resized_crossovers={:.3f}",
        r.total_equivalent_ops, r.total_executed_ops, skip, r.wall_ms, r.equivalent_ops_per_second(), r.pool_peak,
        r.pool_capacity, resized);
}

CsvObserver::CsvObserver(std::ostream* stats, std::ostream* plan, std::ostream* trace)
    : stats_(stats)
    , plan_(plan)
    , trace_(trace)
{
    if (stats_) {
        *stats_ << stats_header() << '\n';
    }
    if (plan_) {
        *plan_ << plan_header() << '\n';
    }
    if (trace_) {
        *trace_ << trace_header() << '\n';
    }
}

void CsvObserver::on_generation(const GenerationStats& s)
{
    if (stats_) {
        *stats_ << stats_row(s) << '\n';
    }
}

void CsvObserver::on_plan(std::size_t gen, std::span<const ChildPlan> plan)
{
    if (!plan_) {
        return;
    }
    for (std::size_t slot = 0; slot < plan.size(); ++slot) {
        *plan_ << plan_row(gen, slot, plan[slot]) << '\n';
    }
}

void CsvObserver::on_trace(std::size_t gen, std::uint32_t child, const DisruptionTrace& trace)
{
    if (trace_) {
        *trace_ << trace_row(gen, child, trace) << '\n';
    }
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text)
{
    std::vector<std::vector<std::string>> rows;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        auto line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view {} : text.substr(eol + 1);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            fields.emplace_back(line.substr(start, comma - start));
            if (comma == std::string_view::npos) {
                break;
            }
            start = comma + 1;
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

} // namespace flatgp
