#pragma once

#include "flatgp/opcodes.hpp"

#include <cstdint>
#include <span>

namespace flatgp {

// FNV-1a, 64 bit. Streaming so a child's genome hash can be computed from its
// recipe (mother prefix, fragment, mother tail) without building the genome.
class Fnv1a {
public:
    Fnv1a& update(std::span<const Code> bytes)
    {
        for (const auto b : bytes) {
            state_ = (state_ ^ b) * prime;
        }
        return *this;
    }

    Fnv1a& update(std::uint64_t word)
    {
        for (int i = 0; i < 8; ++i) {
            state_ = (state_ ^ ((word >> (8 * i)) & 0xff)) * prime;
        }
        return *this;
    }

    std::uint64_t value() const { return state_; }

private:
    static constexpr std::uint64_t prime = 0x100000001b3ULL;
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t genome_hash(TreeView tree) { return Fnv1a {}.update(tree).value(); }

} // namespace flatgp
