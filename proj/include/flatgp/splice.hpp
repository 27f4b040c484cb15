#pragma once

#include "flatgp/opcodes.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace flatgp {

// Where a child differs from its mother: the subtree [site, site + excised)
// of the mother is replaced by a fragment.
struct SpliceSite {
    std::size_t site = 0;
    std::size_t excised = 0;
};

inline std::size_t spliced_size(std::size_t mother_len, SpliceSite at, std::size_t fragment_len)
{
    return mother_len - at.excised + fragment_len;
}

// Copy of the complete subtree of `father` rooted at `site`.
std::vector<Code> extract_fragment(const OpcodeTable& table, TreeView father, std::size_t site);

// Replace the excised subtree inside the mother's own buffer. The tail moves
// up or down with an overlap-safe memmove, then the fragment is written over
// the gap. Returns the child's length. The fragment must not live inside
// `buffer`.
std::size_t splice_in_place(std::span<Code> buffer, std::size_t mother_len, SpliceSite at, TreeView fragment);

// Build the child in `dest` from three copies: the mother's root segment, the
// fragment, then the mother's tail. The mother is not modified.
std::size_t splice_copy(TreeView mother, SpliceSite at, TreeView fragment, std::span<Code> dest);

} // namespace flatgp
