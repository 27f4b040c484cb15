#include "flatgp/suite.hpp"

#include "flatgp/errors.hpp"
#include "flatgp/rng.hpp"

#include <fmt/core.h>

#include <charconv>
#include <fstream>
#include <sstream>

namespace flatgp {

TestSuite TestSuite::numeric(
    std::vector<std::string> names, std::vector<std::vector<double>> columns, std::vector<double> targets)
{
    if (names.size() != columns.size()) {
        throw ConfigError("one name per variable column required");
    }
    for (const auto& c : columns) {
        if (c.size() != targets.size()) {
            throw ConfigError("all suite columns must have the same number of cases");
        }
    }
    TestSuite s;
    s.mode_ = SuiteMode::numeric;
    s.n_cases_ = targets.size();
    s.names_ = std::move(names);
    s.values_ = std::move(columns);
    s.value_targets_ = std::move(targets);
    return s;
}

TestSuite TestSuite::packed(std::vector<std::string> names, std::size_t n_cases,
    std::vector<std::vector<std::uint64_t>> columns, std::vector<std::uint64_t> targets)
{
    const std::size_t words = (n_cases + 63) / 64;
    if (names.size() != columns.size() || targets.size() != words) {
        throw ConfigError("packed suite layout does not match its case count");
    }
    for (const auto& c : columns) {
        if (c.size() != words) {
            throw ConfigError("packed suite layout does not match its case count");
        }
    }
    TestSuite s;
    s.mode_ = SuiteMode::packed;
    s.n_cases_ = n_cases;
    s.names_ = std::move(names);
    s.words_ = std::move(columns);
    s.word_targets_ = std::move(targets);
    return s;
}

template <> std::span<const double> TestSuite::column<double>(std::size_t variable) const
{
    return values_.at(variable);
}

template <> std::span<const std::uint64_t> TestSuite::column<std::uint64_t>(std::size_t variable) const
{
    return words_.at(variable);
}

template <> std::span<const double> TestSuite::targets<double>() const { return value_targets_; }

template <> std::span<const std::uint64_t> TestSuite::targets<std::uint64_t>() const { return word_targets_; }

std::uint64_t TestSuite::tail_mask() const
{
    const auto rem = n_cases_ % 64;
    return rem == 0 ? ~std::uint64_t { 0 } : (std::uint64_t { 1 } << rem) - 1;
}

std::vector<double> constant_palette(std::uint64_t seed)
{
    Rng rng(seed, streams::constants);
    std::vector<double> palette(constant_palette_size);
    for (auto& c : palette) {
        c = rng.uniform(-1.0, 1.0);
    }
    return palette;
}

double sextic(double x)
{
    const double x2 = x * x;
    return x2 * x2 * x2 - 2.0 * x2 * x2 + x2;
}

Problem make_sextic(std::size_t n_cases, std::uint64_t seed)
{
    if (n_cases == 0) {
        throw ConfigError("sextic needs at least one fitness case");
    }
    Rng rng(seed, streams::suite);
    std::vector<double> xs(n_cases);
    std::vector<double> ys(n_cases);
    for (std::size_t i = 0; i < n_cases; ++i) {
        xs[i] = rng.uniform(-1.0, 1.0);
        ys[i] = sextic(xs[i]);
    }
    std::vector<std::string> names { "X" };
    const auto palette = constant_palette(seed);
    return { "sextic", regression_table(names, palette), TestSuite::numeric(names, { std::move(xs) }, std::move(ys)) };
}

std::uint64_t mux6_target_word()
{
    std::uint64_t word = 0;
    for (unsigned c = 0; c < 64; ++c) {
        const unsigned address = c & 3u;
        word |= std::uint64_t { (c >> (2 + address)) & 1u } << c;
    }
    return word;
}

Problem make_mux6()
{
    std::vector<std::string> names { "A0", "A1", "D0", "D1", "D2", "D3" };
    std::vector<std::vector<std::uint64_t>> columns(6, std::vector<std::uint64_t>(1, 0));
    for (unsigned c = 0; c < 64; ++c) {
        for (unsigned v = 0; v < 6; ++v) {
            columns[v][0] |= std::uint64_t { (c >> v) & 1u } << c;
        }
    }
    return { "mux6", mux6_table(), TestSuite::packed(std::move(names), 64, std::move(columns), { mux6_target_word() }) };
}

namespace {

    std::vector<std::string> split_csv(const std::string& line)
    {
        std::vector<std::string> out;
        std::string field;
        std::istringstream in(line);
        while (std::getline(in, field, ',')) {
            const auto b = field.find_first_not_of(" \t\r");
            const auto e = field.find_last_not_of(" \t\r");
            out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
        }
        return out;
    }

} // namespace

Problem load_suite_csv(const std::filesystem::path& path, std::uint64_t seed)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(fmt::format("cannot read suite file {}", path.string()));
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw ConfigError(fmt::format("suite file {} is empty", path.string()));
    }
    const auto header = split_csv(line);
    std::size_t target_col = header.size();
    std::vector<std::string> names;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "target") {
            target_col = i;
        } else {
            names.push_back(header[i]);
        }
    }
    if (target_col == header.size()) {
        throw ConfigError(fmt::format("suite file {} has no 'target' column", path.string()));
    }
    if (names.empty()) {
        throw ConfigError(fmt::format("suite file {} has no variable columns", path.string()));
    }
    std::vector<std::vector<double>> columns(names.size());
    std::vector<double> targets;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const auto fields = split_csv(line);
        if (fields.size() != header.size()) {
            throw ConfigError(fmt::format("{}:{}: expected {} fields", path.string(), row, header.size()));
        }
        std::size_t v = 0;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            double x = 0;
            const auto* first = fields[i].data();
            const auto* last = first + fields[i].size();
            auto [ptr, ec] = std::from_chars(first, last, x);
            if (ec != std::errc {} || ptr != last) {
                throw ConfigError(fmt::format("{}:{}: bad number '{}'", path.string(), row, fields[i]));
            }
            if (i == target_col) {
                targets.push_back(x);
            } else {
                columns[v++].push_back(x);
            }
        }
    }
    if (targets.empty()) {
        throw ConfigError(fmt::format("suite file {} has no cases", path.string()));
    }
    const auto palette = constant_palette(seed);
    auto table = regression_table(names, palette);
    return { path.stem().string(), std::move(table),
        TestSuite::numeric(std::move(names), std::move(columns), std::move(targets)) };
}

} // namespace flatgp
