#pragma once

#include "flatgp/rng.hpp"
#include "flatgp/suite.hpp"

#include <cstddef>
#include <cstdint>
#include <span>

namespace flatgp {

// Tournament selection: k ids drawn uniformly with replacement, the fittest
// wins. Contestants tied on the best fitness are split by one more uniform
// draw over the tied draws.
std::uint32_t select_parent(Rng& rng, std::span<const double> fitnesses, std::size_t k, SuiteMode mode);

// Index of the fittest individual; lowest index on ties.
std::uint32_t best_individual(std::span<const double> fitnesses, SuiteMode mode);

} // namespace flatgp
