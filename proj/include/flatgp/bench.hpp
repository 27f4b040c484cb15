#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace flatgp {

struct SpliceBenchRow {
    std::size_t size = 0;
    double copy_ns = 0.0;
    double in_place_ns = 0.0;
    bool equal = false;

    // copy time over in-place time
    double ratio() const { return in_place_ns > 0.0 ? copy_ns / in_place_ns : 0.0; }
};

// Times a chain of random splices on a regression genome of about `size`
// nodes, once through splice_copy (ping-ponging between two buffers) and once
// through splice_in_place. Fragments are drawn to shrink, keep or grow the
// excised size so the genome length stays near `size`. `equal` reports that
// both paths produced the same genome after every splice.
std::vector<SpliceBenchRow> splice_microbench(std::span<const std::size_t> sizes, std::size_t splices,
    std::uint64_t seed);

std::string_view splice_bench_header();
std::string splice_bench_row(const SpliceBenchRow& row);

} // namespace flatgp
