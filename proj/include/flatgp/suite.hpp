#pragma once

#include "flatgp/opcodes.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace flatgp {

enum class SuiteMode { numeric, packed };

// Fitness cases. Numeric suites hold one double per case in each column.
// Packed suites hold ceil(n_cases/64) words per column; bit c of word w is
// case 64w + c.
class TestSuite {
public:
    static TestSuite numeric(std::vector<std::string> names, std::vector<std::vector<double>> columns,
        std::vector<double> targets);
    static TestSuite packed(std::vector<std::string> names, std::size_t n_cases,
        std::vector<std::vector<std::uint64_t>> columns, std::vector<std::uint64_t> targets);

    SuiteMode mode() const { return mode_; }
    std::size_t n_cases() const { return n_cases_; }
    // Lane count: n_cases for numeric suites, word count for packed ones.
    std::size_t width() const { return mode_ == SuiteMode::numeric ? n_cases_ : words_.empty() ? 0 : words_[0].size(); }
    std::size_t n_variables() const { return names_.size(); }
    const std::vector<std::string>& variable_names() const { return names_; }

    template <class Lane> std::span<const Lane> column(std::size_t variable) const;
    template <class Lane> std::span<const Lane> targets() const;

    // Valid bits of the last packed word.
    std::uint64_t tail_mask() const;

private:
    SuiteMode mode_ = SuiteMode::numeric;
    std::size_t n_cases_ = 0;
    std::vector<std::string> names_;
    std::vector<std::vector<double>> values_;
    std::vector<double> value_targets_;
    std::vector<std::vector<std::uint64_t>> words_;
    std::vector<std::uint64_t> word_targets_;
};

template <> std::span<const double> TestSuite::column<double>(std::size_t variable) const;
template <> std::span<const std::uint64_t> TestSuite::column<std::uint64_t>(std::size_t variable) const;
template <> std::span<const double> TestSuite::targets<double>() const;
template <> std::span<const std::uint64_t> TestSuite::targets<std::uint64_t>() const;

// Numeric fitness is an error (lower is better); packed fitness counts hits.
inline bool higher_is_better(SuiteMode mode) { return mode == SuiteMode::packed; }
inline bool fitter(double a, double b, SuiteMode mode) { return higher_is_better(mode) ? a > b : a < b; }

struct Problem {
    std::string name;
    OpcodeTable table;
    TestSuite suite;
};

inline constexpr std::size_t constant_palette_size = 4;

// Constant palette C0..C3, uniform on [-1, 1], drawn from the constants stream.
std::vector<double> constant_palette(std::uint64_t seed);

double sextic(double x);

// x^6 - 2x^4 + x^2 on n_cases points uniform on [-1, 1].
Problem make_sextic(std::size_t n_cases, std::uint64_t seed);

// Six-multiplexer, all 64 cases packed into one word per column.
Problem make_mux6();
std::uint64_t mux6_target_word();

// CSV with a header row; the column named "target" holds the targets and
// every other column becomes a variable terminal.
Problem load_suite_csv(const std::filesystem::path& path, std::uint64_t seed);

} // namespace flatgp
