#include "flatgp/bench.hpp"

#include "flatgp/errors.hpp"
#include "flatgp/rng.hpp"
#include "flatgp/splice.hpp"
#include "flatgp/suite.hpp"
#include "flatgp/tree.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cstring>

namespace flatgp {

namespace {

    struct Step {
        SpliceSite at;
        std::vector<Code> fragment;
    };

    std::size_t odd_at_least_one(std::size_t n) { return n % 2 == 0 ? n + 1 : n; }

    template <class Fn> double time_ns(Fn&& fn)
    {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        return std::chrono::duration<double, std::nano>(std::chrono::steady_clock::now() - t0).count();
    }

} // namespace

std::vector<SpliceBenchRow> splice_microbench(std::span<const std::size_t> sizes, std::size_t splices,
    std::uint64_t seed)
{
    const std::vector<std::string> vars { "X" };
    const auto constants = constant_palette(seed);
    const auto table = regression_table(vars, constants);

    std::vector<SpliceBenchRow> rows;
    for (const auto requested : sizes) {
        if (requested == 0) {
            throw ConfigError("splice benchmark sizes must be positive");
        }
        Rng rng(seed, requested);
        const std::size_t size = odd_at_least_one(requested);
        const std::size_t capacity = 2 * size + 64;
        const auto start = random_tree_of_size(rng, table, size);

        // Recipes depend on the evolving genome, so they are planned on a
        // reference chain first.
        std::vector<Step> steps;
        steps.reserve(splices);
        std::vector<Code> genome = start;
        for (std::size_t i = 0; i < splices; ++i) {
            const auto site = pick_site(rng, table, genome);
            const auto excised = subtree_extent(table, genome, site);
            std::size_t want = excised;
            switch (rng.below(3)) {
            case 0:
                want = excised > 2 ? excised - 2 : excised;
                break;
            case 2:
                want = genome.size() + 2 <= capacity ? excised + 2 : excised;
                break;
            default:
                break;
            }
            // drift back towards the requested size
            if (genome.size() > size + size / 4 && want > 2) {
                want -= 2;
            } else if (genome.size() + size / 4 < size) {
                want += 2;
            }
            auto fragment = random_tree_of_size(rng, table, odd_at_least_one(want));
            std::vector<Code> next(genome.begin(), genome.begin() + static_cast<std::ptrdiff_t>(site));
            next.insert(next.end(), fragment.begin(), fragment.end());
            next.insert(next.end(), genome.begin() + static_cast<std::ptrdiff_t>(site + excised), genome.end());
            genome = std::move(next);
            steps.push_back({ { site, excised }, std::move(fragment) });
        }

        std::vector<Code> ping(capacity);
        std::vector<Code> pong(capacity);
        std::vector<Code> inplace(capacity);

        auto copy_chain = [&] {
            std::copy(start.begin(), start.end(), ping.begin());
            std::size_t len = start.size();
            std::vector<Code>* src = &ping;
            std::vector<Code>* dst = &pong;
            for (const auto& s : steps) {
                len = splice_copy(TreeView(*src).first(len), s.at, s.fragment, *dst);
                std::swap(src, dst);
            }
            return std::pair { src, len };
        };
        auto in_place_chain = [&] {
            std::copy(start.begin(), start.end(), inplace.begin());
            std::size_t len = start.size();
            for (const auto& s : steps) {
                len = splice_in_place(inplace, len, s.at, s.fragment);
            }
            return len;
        };

        SpliceBenchRow row;
        row.size = size;
        // warm both paths once, then keep the faster of three timed runs
        copy_chain();
        in_place_chain();
        double copy_best = 0.0;
        double in_place_best = 0.0;
        for (int rep = 0; rep < 3; ++rep) {
            const double c = time_ns(copy_chain);
            const double p = time_ns(in_place_chain);
            copy_best = rep == 0 ? c : std::min(copy_best, c);
            in_place_best = rep == 0 ? p : std::min(in_place_best, p);
        }
        const double n = static_cast<double>(std::max<std::size_t>(splices, 1));
        row.copy_ns = copy_best / n;
        row.in_place_ns = in_place_best / n;

        // untimed lockstep comparison after every splice
        row.equal = true;
        std::copy(start.begin(), start.end(), ping.begin());
        std::copy(start.begin(), start.end(), inplace.begin());
        std::size_t copy_len = start.size();
        std::size_t in_place_len = start.size();
        for (const auto& s : steps) {
            copy_len = splice_copy(TreeView(ping).first(copy_len), s.at, s.fragment, pong);
            std::swap(ping, pong);
            in_place_len = splice_in_place(inplace, in_place_len, s.at, s.fragment);
            if (copy_len != in_place_len || std::memcmp(ping.data(), inplace.data(), copy_len) != 0) {
                row.equal = false;
                break;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

std::string_view splice_bench_header() { return "size,copy_ns,inplace_ns,ratio,equal"; }

std::string splice_bench_row(const SpliceBenchRow& row)
{
    return fmt::format("{},{:.1f},{:.1f},{:.2f},{}", row.size, row.copy_ns, row.in_place_ns, row.ratio(),
        row.equal ? "yes" : "no");
}

} // namespace flatgp
