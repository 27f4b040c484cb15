#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace flatgp {

// One byte per tree node.
using Code = std::uint8_t;
using TreeView = std::span<const Code>;

enum class OpKind : std::uint8_t { variable, constant, function };

enum class Fn : std::uint8_t { none, add, sub, mul, pdiv, and_, or_, nand, nor };

struct OpInfo {
    std::string name;
    std::uint8_t arity = 0;
    OpKind kind = OpKind::variable;
    Fn fn = Fn::none;
    std::uint32_t column = 0; // variable: suite column index
    double value = 0.0;       // constant: palette value
};

// Byte value -> opcode description for one problem. Codes are dense:
// functions first, then variables, then constants.
class OpcodeTable {
public:
    static constexpr std::uint8_t unknown_arity = 0xff;

    Code add(OpInfo info);

    std::size_t size() const { return ops_.size(); }
    bool contains(Code c) const { return c < ops_.size(); }

    // Throws MalformedGenome for a byte outside the table.
    std::uint8_t arity(Code c) const;
    const OpInfo& info(Code c) const;

    // Fast path for scans over already validated genomes.
    std::uint8_t arity_unchecked(Code c) const { return arity_[c]; }

    std::span<const Code> functions() const { return functions_; }
    std::span<const Code> terminals() const { return terminals_; }

    std::optional<Code> find(std::string_view name) const;

    // "code name arity kind" lines, the format used in docs/opcodes.md.
    std::string describe() const;

private:
    std::vector<OpInfo> ops_;
    std::array<std::uint8_t, 256> arity_ = filled_unknown();
    std::vector<Code> functions_;
    std::vector<Code> terminals_;

    static std::array<std::uint8_t, 256> filled_unknown()
    {
        std::array<std::uint8_t, 256> a{};
        a.fill(unknown_arity);
        return a;
    }
};

// ADD SUB MUL PDIV, one variable per name, then C0..Ck-1.
OpcodeTable regression_table(std::span<const std::string> variables, std::span<const double> constants);

// AND OR NAND NOR, A0 A1 D0..D3 (columns 0..5 of the multiplexer suite).
OpcodeTable mux6_table();

// Genome dump format: space separated opcode names in prefix order.
std::string format_tree(const OpcodeTable& table, TreeView tree);
std::vector<Code> parse_tree(const OpcodeTable& table, std::string_view text);

} // namespace flatgp
