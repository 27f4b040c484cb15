#include "flatgp/splice.hpp"

#include "flatgp/errors.hpp"
#include "flatgp/tree.hpp"

#include <fmt/core.h>

#include <cstring>
#include <functional>

namespace flatgp {

namespace {

    bool overlaps(std::span<const Code> a, std::span<const Code> b)
    {
        if (a.empty() || b.empty()) {
            return false;
        }
        const std::less<const Code*> before;
        return before(a.data(), b.data() + b.size()) && before(b.data(), a.data() + a.size());
    }

    void check_site(std::size_t mother_len, SpliceSite at)
    {
        if (at.excised == 0 || at.site >= mother_len || at.excised > mother_len - at.site) {
            throw SpliceError(fmt::format(
                "splice site {} with extent {} does not fit a genome of length {}", at.site, at.excised, mother_len));
        }
    }

} // namespace

std::vector<Code> extract_fragment(const OpcodeTable& table, TreeView father, std::size_t site)
{
    const auto extent = subtree_extent(table, father, site);
    const auto first = father.begin() + static_cast<std::ptrdiff_t>(site);
    return { first, first + static_cast<std::ptrdiff_t>(extent) };
}

std::size_t splice_in_place(std::span<Code> buffer, std::size_t mother_len, SpliceSite at, TreeView fragment)
{
    check_site(mother_len, at);
    const auto child_len = spliced_size(mother_len, at, fragment.size());
    if (mother_len > buffer.size() || child_len > buffer.size()) {
        throw SpliceError(fmt::format("child of length {} overflows buffer of {}", child_len, buffer.size()));
    }
    if (overlaps(buffer, fragment)) {
        throw SpliceError("fragment aliases the buffer being spliced in place");
    }
    const std::size_t tail = at.site + at.excised;
    const std::size_t new_tail = at.site + fragment.size();
    if (new_tail != tail) {
        std::memmove(buffer.data() + new_tail, buffer.data() + tail, mother_len - tail);
    }
    if (!fragment.empty()) {
        std::memcpy(buffer.data() + at.site, fragment.data(), fragment.size());
    }
    return child_len;
}

std::size_t splice_copy(TreeView mother, SpliceSite at, TreeView fragment, std::span<Code> dest)
{
    check_site(mother.size(), at);
    const auto child_len = spliced_size(mother.size(), at, fragment.size());
    if (child_len > dest.size()) {
        throw SpliceError(fmt::format("child of length {} overflows buffer of {}", child_len, dest.size()));
    }
    if (overlaps(dest.first(child_len), mother) || overlaps(dest.first(child_len), fragment)) {
        throw SpliceError("copy splice destination overlaps its sources");
    }
    const std::size_t tail = at.site + at.excised;
    Code* out = dest.data();
    std::memcpy(out, mother.data(), at.site);
    out += at.site;
    if (!fragment.empty()) {
        std::memcpy(out, fragment.data(), fragment.size());
        out += fragment.size();
    }
    std::memcpy(out, mother.data() + tail, mother.size() - tail);
    return child_len;
}

} // namespace flatgp
