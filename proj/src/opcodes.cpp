#include "flatgp/opcodes.hpp"

#include "flatgp/errors.hpp"

#include <fmt/core.h>

#include <sstream>

namespace flatgp {

Code OpcodeTable::add(OpInfo info)
{
    if (ops_.size() >= 255) {
        throw MalformedGenome("opcode table full");
    }
    const auto code = static_cast<Code>(ops_.size());
    arity_[code] = info.arity;
    if (info.kind == OpKind::function) {
        functions_.push_back(code);
    } else {
        terminals_.push_back(code);
    }
    ops_.push_back(std::move(info));
    return code;
}

std::uint8_t OpcodeTable::arity(Code c) const
{
    const auto a = arity_[c];
    if (a == unknown_arity) {
        throw MalformedGenome(fmt::format("unknown opcode byte {}", c));
    }
    return a;
}

const OpInfo& OpcodeTable::info(Code c) const
{
    if (!contains(c)) {
        throw MalformedGenome(fmt::format("unknown opcode byte {}", c));
    }
    return ops_[c];
}

std::optional<Code> OpcodeTable::find(std::string_view name) const
{
    for (std::size_t i = 0; i < ops_.size(); ++i) {
        if (ops_[i].name == name) {
            return static_cast<Code>(i);
        }
    }
    return std::nullopt;
}

std::string OpcodeTable::describe() const
{
    std::string out;
    for (std::size_t i = 0; i < ops_.size(); ++i) {
        const auto& op = ops_[i];
        const char* kind = op.kind == OpKind::function ? "function"
            : op.kind == OpKind::variable              ? "terminal-variable"
                                                       : "terminal-constant";
        out += fmt::format("{} {} {} {}", i, op.name, op.arity, kind);
        if (op.kind == OpKind::constant) {
            out += fmt::format(" {}", op.value);
        }
        out += '\n';
    }
    return out;
}

OpcodeTable regression_table(std::span<const std::string> variables, std::span<const double> constants)
{
    OpcodeTable t;
    t.add({ "ADD", 2, OpKind::function, Fn::add });
    t.add({ "SUB", 2, OpKind::function, Fn::sub });
    t.add({ "MUL", 2, OpKind::function, Fn::mul });
    t.add({ "PDIV", 2, OpKind::function, Fn::pdiv });
    for (std::size_t i = 0; i < variables.size(); ++i) {
        t.add({ variables[i], 0, OpKind::variable, Fn::none, static_cast<std::uint32_t>(i) });
    }
    for (std::size_t i = 0; i < constants.size(); ++i) {
        t.add({ fmt::format("C{}", i), 0, OpKind::constant, Fn::none, 0, constants[i] });
    }
    return t;
}

OpcodeTable mux6_table()
{
    OpcodeTable t;
    t.add({ "AND", 2, OpKind::function, Fn::and_ });
    t.add({ "OR", 2, OpKind::function, Fn::or_ });
    t.add({ "NAND", 2, OpKind::function, Fn::nand });
    t.add({ "NOR", 2, OpKind::function, Fn::nor });
    const char* names[] = { "A0", "A1", "D0", "D1", "D2", "D3" };
    for (std::uint32_t i = 0; i < 6; ++i) {
        t.add({ names[i], 0, OpKind::variable, Fn::none, i });
    }
    return t;
}

std::string format_tree(const OpcodeTable& table, TreeView tree)
{
    std::string out;
    for (std::size_t i = 0; i < tree.size(); ++i) {
        if (i != 0) {
            out += ' ';
        }
        out += table.info(tree[i]).name;
    }
    return out;
}

std::vector<Code> parse_tree(const OpcodeTable& table, std::string_view text)
{
    std::vector<Code> out;
    std::istringstream in { std::string(text) };
    std::string tok;
    while (in >> tok) {
        auto c = table.find(tok);
        if (!c) {
            throw MalformedGenome(fmt::format("unknown opcode name '{}'", tok));
        }
        out.push_back(*c);
    }
    return out;
}

} // namespace flatgp
