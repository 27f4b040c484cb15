#include "flatgp/selection.hpp"

#include "flatgp/errors.hpp"

#include <vector>

namespace flatgp {

std::uint32_t select_parent(Rng& rng, std::span<const double> fitnesses, std::size_t k, SuiteMode mode)
{
    if (fitnesses.empty() || k == 0) {
        throw ConfigError("tournament needs a non-empty population and k >= 1");
    }
    std::vector<std::uint32_t> tied;
    tied.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto id = static_cast<std::uint32_t>(rng.below(fitnesses.size()));
        if (tied.empty() || fitter(fitnesses[id], fitnesses[tied.front()], mode)) {
            tied.assign(1, id);
        } else if (fitnesses[id] == fitnesses[tied.front()]) {
            tied.push_back(id);
        }
    }
    if (tied.size() == 1) {
        return tied.front();
    }
    return tied[rng.below(tied.size())];
}

std::uint32_t best_individual(std::span<const double> fitnesses, SuiteMode mode)
{
    if (fitnesses.empty()) {
        throw ConfigError("empty population has no best individual");
    }
    std::uint32_t best = 0;
    for (std::uint32_t i = 1; i < fitnesses.size(); ++i) {
        if (fitter(fitnesses[i], fitnesses[best], mode)) {
            best = i;
        }
    }
    return best;
}

} // namespace flatgp
