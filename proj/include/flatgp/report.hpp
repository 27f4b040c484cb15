#pragma once

#include "flatgp/engine.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace flatgp {

// Stats CSV. Columns are fixed; wall_ms and buffers_peak depend on thread
// scheduling, every other column is reproducible from (flags, seed).
std::string_view stats_header();
std::string stats_row(const GenerationStats& s);

std::string_view plan_header();
std::string plan_row(std::size_t gen, std::size_t slot, const ChildPlan& p);

// levels is a space separated list of count:rms pairs, level 0 first.
std::string_view trace_header();
std::string trace_row(std::size_t gen, std::uint32_t child, const DisruptionTrace& trace);

std::string summary_line(const RunReport& report);

// Streams every hook to CSV files. Null streams are skipped.
class CsvObserver : public EngineObserver {
public:
    CsvObserver(std::ostream* stats, std::ostream* plan, std::ostream* trace);

    void on_generation(const GenerationStats& s) override;
    void on_plan(std::size_t gen, std::span<const ChildPlan> plan) override;
    void on_trace(std::size_t gen, std::uint32_t child, const DisruptionTrace& trace) override;

private:
    std::ostream* stats_;
    std::ostream* plan_;
    std::ostream* trace_;
};

// Splits CSV text into rows of fields. No quoting: none of the files above need it.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

} // namespace flatgp
