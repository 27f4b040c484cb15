#pragma once

#include "flatgp/engine.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace flatgp::cli {

struct RunSpec {
    // sextic, mux6, or a path to a suite CSV
    std::string problem = "sextic";
    std::size_t cases = 48;
    EngineConfig engine;
    std::string stats_out;
    std::string trace_out;
    std::string plan_dump;
    std::string population_out;
};

Problem make_problem(const RunSpec& spec);

// Whole command line, including the splice-bench subcommand. Returns the
// process exit code; diagnostics go to `err`.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace flatgp::cli
