// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rewasm/text.hpp"
#include "rewasm/errors.hpp"
#include <bit>
#include <charconv>
#include <cmath>
#include <sstream>

namespace rewasm
{
namespace
{
std::string float_text(double value)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value < 0 ? "-inf" : "inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, r.ptr);
}

std::string float_text(float value)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value < 0 ? "-inf" : "inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, r.ptr);
}

std::string quoted(std::string_view s)
{
    std::string out = "\"";
    for (const unsigned char c : s)
    {
        if (c == '"' || c == '\\')
        {
            out += '\\';
            out += static_cast<char>(c);
        }
        else if (c < 0x20 || c >= 0x7F)
        {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\x%02x", c);
            out += buf;
        }
        else
            out += static_cast<char>(c);
    }
    return out + "\"";
}

std::string valtypes(const std::vector<ValType>& types)
{
    std::string out = "[";
    for (size_t i = 0; i < types.size(); ++i)
    {
        if (i != 0)
            out += ", ";
        out += quoted(to_string(types[i]));
    }
    return out + "]";
}

std::string opcode_hex(Opcode op)
{
    char buf[16];
    const auto code = static_cast<unsigned>(op);
    std::snprintf(buf, sizeof buf, code > 0xFF ? "0x%04X" : "0x%02X", code);
    return buf;
}

std::string immediate_value(const Immediate& imm)
{
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, BlockType>)
            {
                if (v.kind == BlockType::Kind::value)
                    return quoted(to_string(v.value));
                if (v.kind == BlockType::Kind::type_index)
                    return "type " + std::to_string(v.type_index);
                return "";
            }
            else if constexpr (std::is_same_v<T, MemArg>)
                return std::to_string(v.align) + ", " + std::to_string(v.offset);
            else if constexpr (std::is_same_v<T, I32> || std::is_same_v<T, I64>)
                return std::to_string(v.value);
            else if constexpr (std::is_same_v<T, F32>)
                return float_text(std::bit_cast<float>(v.bits));
            else if constexpr (std::is_same_v<T, F64>)
                return float_text(std::bit_cast<double>(v.bits));
            else
                return std::to_string(v.value);
        },
        imm);
}

std::string listing_instruction(const Instruction& instr)
{
    std::string out = "Instruction(\"" + opcode_hex(instr.opcode) + "\", [";
    bool first = true;
    for (const auto& imm : instr.immediates)
    {
        auto text = immediate_value(imm);
        if (text.empty())
            continue;
        if (!first)
            out += ", ";
        out += text;
        first = false;
    }
    return out + "])";
}

std::string const_text(const ConstExpr& expr)
{
    if (expr.instrs.size() == 2 && expr.instrs[1].opcode == Opcode::end)
    {
        const auto& i = expr.instrs[0];
        if (i.opcode == Opcode::i32_const || i.opcode == Opcode::i64_const ||
            i.opcode == Opcode::f32_const || i.opcode == Opcode::f64_const)
            return immediate_value(i.immediates.at(0));
    }
    std::vector<Instruction> body = expr.instrs;
    if (!body.empty() && body.back().opcode == Opcode::end)
        body.pop_back();
    return "[" + format_instructions(body) + "]";
}

std::string bytes_text(const Bytes& bytes, size_t max_bytes)
{
    if (bytes.size() <= max_bytes)
        return "\"" + to_hex(bytes) + "\"";
    return "\"" + to_hex(std::span{bytes}.first(max_bytes)) + "...\" (" +
           std::to_string(bytes.size()) + " bytes)";
}

std::string limits_text(const char* name, uint32_t min, std::optional<uint32_t> max)
{
    std::string out = std::string{name} + "(" + std::to_string(min);
    if (max)
        out += ", " + std::to_string(*max);
    return out + ")";
}

std::string name_map_text(const NameMap& map)
{
    std::string out = "[";
    for (size_t i = 0; i < map.size(); ++i)
    {
        if (i != 0)
            out += ", ";
        out += "(" + std::to_string(map[i].idx) + ", " + quoted(map[i].name) + ")";
    }
    return out + "]";
}

// Parsing.

std::vector<std::string_view> split_words(std::string_view text)
{
    std::vector<std::string_view> words;
    size_t i = 0;
    while (i < text.size())
    {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
            ++i;
        const auto start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])))
            ++i;
        if (i > start)
            words.push_back(text.substr(start, i - start));
    }
    return words;
}

[[noreturn]] void bad(std::string_view text, const std::string& why)
{
    throw SyntaxError{"cannot parse instruction '" + std::string{text} + "': " + why};
}

template <typename T>
T parse_integer(std::string_view word, std::string_view text)
{
    bool negative = false;
    std::string_view digits = word;
    if (!digits.empty() && (digits[0] == '-' || digits[0] == '+'))
    {
        negative = digits[0] == '-';
        digits.remove_prefix(1);
    }
    int base = 10;
    if (digits.size() > 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X'))
    {
        base = 16;
        digits.remove_prefix(2);
    }
    uint64_t magnitude = 0;
    const auto r = std::from_chars(digits.data(), digits.data() + digits.size(), magnitude, base);
    if (r.ec != std::errc{} || r.ptr != digits.data() + digits.size() || digits.empty())
        bad(text, "'" + std::string{word} + "' is not an integer");
    using U = std::make_unsigned_t<T>;
    if constexpr (std::is_signed_v<T>)
    {
        // Accept both the signed range and the unsigned bit pattern.
        if (negative)
        {
            if (magnitude > static_cast<uint64_t>(std::numeric_limits<T>::max()) + 1)
                bad(text, "'" + std::string{word} + "' is out of range");
            return static_cast<T>(static_cast<U>(0 - magnitude));
        }
        if (magnitude > std::numeric_limits<U>::max())
            bad(text, "'" + std::string{word} + "' is out of range");
        return static_cast<T>(static_cast<U>(magnitude));
    }
    else
    {
        if (negative || magnitude > std::numeric_limits<T>::max())
            bad(text, "'" + std::string{word} + "' is out of range");
        return static_cast<T>(magnitude);
    }
}

template <typename F>
F parse_float(std::string_view word, std::string_view text)
{
    std::string_view w = word;
    bool negative = false;
    if (!w.empty() && (w[0] == '-' || w[0] == '+'))
    {
        negative = w[0] == '-';
        w.remove_prefix(1);
    }
    F value{};
    if (w == "inf")
        value = std::numeric_limits<F>::infinity();
    else if (w == "nan")
        value = std::numeric_limits<F>::quiet_NaN();
    else
    {
        const auto r = std::from_chars(w.data(), w.data() + w.size(), value);
        if (r.ec != std::errc{} || r.ptr != w.data() + w.size() || w.empty())
            bad(text, "'" + std::string{word} + "' is not a number");
    }
    return negative ? -value : value;
}

uint32_t log2_alignment(uint32_t bytes, std::string_view text)
{
    if (bytes == 0 || !std::has_single_bit(bytes))
        bad(text, "alignment must be a power of two");
    return static_cast<uint32_t>(std::countr_zero(bytes));
}
}  // namespace

std::string to_hex(std::span<const uint8_t> bytes)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (const auto b : bytes)
    {
        out += digits[b >> 4];
        out += digits[b & 0xF];
    }
    return out;
}

Bytes from_hex(std::string_view text)
{
    if (text.starts_with("0x") || text.starts_with("0X"))
        text.remove_prefix(2);
    if (text.size() % 2 != 0)
        throw SyntaxError{"hex string has an odd number of digits"};
    Bytes out;
    out.reserve(text.size() / 2);
    for (size_t i = 0; i < text.size(); i += 2)
    {
        uint8_t b = 0;
        const auto r = std::from_chars(text.data() + i, text.data() + i + 2, b, 16);
        if (r.ec != std::errc{} || r.ptr != text.data() + i + 2)
            throw SyntaxError{"bad hex digits '" + std::string{text.substr(i, 2)} + "'"};
        out.push_back(b);
    }
    return out;
}

std::string format_instruction(const Instruction& instr)
{
    std::string out{mnemonic(instr.opcode)};
    const auto& info = opcode_info(instr.opcode);
    for (const auto& imm : instr.immediates)
    {
        if (const auto* mem = std::get_if<MemArg>(&imm))
        {
            if (mem->offset != 0)
                out += " offset=" + std::to_string(mem->offset);
            if (mem->align != info.natural_alignment)
                out += " align=" + std::to_string(uint64_t{1} << mem->align);
            continue;
        }
        if (std::holds_alternative<MemIdx>(imm))
            continue;
        if (const auto* table = std::get_if<TableIdx>(&imm))
        {
            if (table->value != 0)
                out += " table=" + std::to_string(table->value);
            continue;
        }
        if (const auto* b = std::get_if<BlockType>(&imm))
        {
            if (b->kind == BlockType::Kind::value)
                out += " " + std::string{to_string(b->value)};
            else if (b->kind == BlockType::Kind::type_index)
                out += " type=" + std::to_string(b->type_index);
            continue;
        }
        auto text = immediate_value(imm);
        out += " " + text;
    }
    return out;
}

std::string format_instructions(const std::vector<Instruction>& instrs)
{
    std::string out;
    for (size_t i = 0; i < instrs.size(); ++i)
    {
        if (i != 0)
            out += "; ";
        out += format_instruction(instrs[i]);
    }
    return out;
}

Instruction parse_instruction(std::string_view text)
{
    const auto words = split_words(text);
    if (words.empty())
        bad(text, "empty instruction");
    const auto op = opcode_from_mnemonic(words[0]);
    if (!op)
        bad(text, "unknown mnemonic '" + std::string{words[0]} + "'");
    const auto& info = opcode_info(*op);
    Instruction instr{*op, {}};
    const std::vector<std::string_view> args(words.begin() + 1, words.end());

    auto expect_args = [&](size_t n) {
        if (args.size() != n)
            bad(text, std::string{info.mnemonic} + " takes " + std::to_string(n) +
                          " operand(s), got " + std::to_string(args.size()));
    };
    auto u32 = [&](std::string_view w) { return parse_integer<uint32_t>(w, text); };

    switch (info.layout)
    {
    case ImmediateLayout::none:
        expect_args(0);
        break;
    case ImmediateLayout::block_type:
        if (args.empty())
            instr.immediates.push_back(BlockType::empty());
        else if (args.size() == 1 && args[0].starts_with("type="))
            instr.immediates.push_back(BlockType::of_type(u32(args[0].substr(5))));
        else if (args.size() == 1 && valtype_from_string(args[0]))
            instr.immediates.push_back(BlockType::of(*valtype_from_string(args[0])));
        else
            bad(text, "block type must be empty, a value type or type=N");
        break;
    case ImmediateLayout::label:
        expect_args(1);
        instr.immediates.push_back(LabelIdx{u32(args[0])});
        break;
    case ImmediateLayout::label_table:
        if (args.empty())
            bad(text, "br_table needs at least a default label");
        for (const auto a : args)
            instr.immediates.push_back(LabelIdx{u32(a)});
        break;
    case ImmediateLayout::function:
        expect_args(1);
        instr.immediates.push_back(FuncIdx{u32(args[0])});
        break;
    case ImmediateLayout::call_indirect:
    {
        if (args.empty() || args.size() > 2)
            bad(text, "call_indirect takes a type index and an optional table=N");
        uint32_t table = 0;
        if (args.size() == 2)
        {
            if (!args[1].starts_with("table="))
                bad(text, "second operand of call_indirect must be table=N");
            table = u32(args[1].substr(6));
        }
        auto type = args[0];
        if (type.starts_with("type="))
            type.remove_prefix(5);
        instr.immediates.push_back(TypeIdx{u32(type)});
        instr.immediates.push_back(TableIdx{table});
        break;
    }
    case ImmediateLayout::local:
        expect_args(1);
        instr.immediates.push_back(LocalIdx{u32(args[0])});
        break;
    case ImmediateLayout::global:
        expect_args(1);
        instr.immediates.push_back(GlobalIdx{u32(args[0])});
        break;
    case ImmediateLayout::memarg:
    {
        MemArg mem{info.natural_alignment, 0};
        for (const auto a : args)
        {
            if (a.starts_with("offset="))
                mem.offset = u32(a.substr(7));
            else if (a.starts_with("align="))
                mem.align = log2_alignment(u32(a.substr(6)), text);
            else
                bad(text, "memory operands are offset=N and align=N");
        }
        instr.immediates.push_back(mem);
        break;
    }
    case ImmediateLayout::memory:
        expect_args(0);
        instr.immediates.push_back(MemIdx{0});
        break;
    case ImmediateLayout::i32:
        expect_args(1);
        instr.immediates.push_back(I32{parse_integer<int32_t>(args[0], text)});
        break;
    case ImmediateLayout::i64:
        expect_args(1);
        instr.immediates.push_back(I64{parse_integer<int64_t>(args[0], text)});
        break;
    case ImmediateLayout::f32:
        expect_args(1);
        instr.immediates.push_back(F32{std::bit_cast<uint32_t>(parse_float<float>(args[0], text))});
        break;
    case ImmediateLayout::f64:
        expect_args(1);
        instr.immediates.push_back(
            F64{std::bit_cast<uint64_t>(parse_float<double>(args[0], text))});
        break;
    }
    return instr;
}

std::vector<Instruction> parse_instructions(std::string_view text)
{
    std::vector<Instruction> out;
    size_t start = 0;
    while (start <= text.size())
    {
        auto stop = text.find_first_of(";\n", start);
        if (stop == std::string_view::npos)
            stop = text.size();
        const auto item = text.substr(start, stop - start);
        if (!split_words(item).empty())
            out.push_back(parse_instruction(item));
        start = stop + 1;
    }
    return out;
}

std::string format_element(const Element& element, size_t max_bytes)
{
    return std::visit(
        [max_bytes](const auto& e) -> std::string {
            using E = std::decay_t<decltype(e)>;
            const auto n = [](uint32_t v) { return std::to_string(v); };
            if constexpr (std::is_same_v<E, TypeElement>)
                return "Type(" + n(e.idx) + ", " + valtypes(e.params) + ", " +
                       valtypes(e.results) + ")";
            else if constexpr (std::is_same_v<E, ImportElement>)
            {
                std::string desc;
                if (const auto* f = std::get_if<FunctionImport>(&e.desc))
                    desc = n(f->type_idx);
                else if (const auto* t = std::get_if<TableImport>(&e.desc))
                    desc = limits_text("Table", t->limits.min, t->limits.max);
                else if (const auto* m = std::get_if<MemoryImport>(&e.desc))
                    desc = limits_text("Memory", m->limits.min, m->limits.max);
                else
                {
                    const auto& g = std::get<GlobalImport>(e.desc);
                    desc = "Global(" + quoted(to_string(g.type)) + ", " +
                           (g.mut == Mutability::mutable_ ? "0x01" : "0x00") + ")";
                }
                return "Import(" + n(e.idx) + ", " + quoted(e.module_name) + ", " + quoted(e.name) +
                       ", " + desc + ")";
            }
            else if constexpr (std::is_same_v<E, FunctionElement>)
                return "Function(" + n(e.func_idx) + ", " + n(e.type_idx) + ")";
            else if constexpr (std::is_same_v<E, TableElement>)
                return limits_text("Table", e.min, e.max);
            else if constexpr (std::is_same_v<E, MemoryElement>)
                return limits_text("Memory", e.min, e.max);
            else if constexpr (std::is_same_v<E, GlobalElement>)
                return "Global(" + n(e.idx) + ", " + quoted(to_string(e.type)) + ", " +
                       (e.mut == Mutability::mutable_ ? "0x01" : "0x00") + ", " +
                       const_text(e.init) + ")";
            else if constexpr (std::is_same_v<E, ExportElement>)
                return "Export(" + n(e.idx) + ", " + quoted(e.name) + ", " +
                       quoted(to_string(e.kind)) + ", " + n(e.target_idx) + ")";
            else if constexpr (std::is_same_v<E, StartElement>)
                return "Start(" + n(e.func_idx) + ")";
            else if constexpr (std::is_same_v<E, ElemElement>)
            {
                std::string funcs = "[";
                for (size_t i = 0; i < e.func_idxs.size(); ++i)
                    funcs += (i ? ", " : "") + n(e.func_idxs[i]);
                return "Elem(" + n(e.idx) + ", " + const_text(e.offset) + ", " + funcs + "])";
            }
            else if constexpr (std::is_same_v<E, CodeElement>)
            {
                std::string out = "Code(" + n(e.func_idx) + ", [";
                for (size_t i = 0; i < e.locals.size(); ++i)
                    out += std::string{i ? ", " : ""} + "Local(" + n(e.locals[i].count) + ", " +
                           quoted(to_string(e.locals[i].type)) + ")";
                out += "], [";
                for (size_t i = 0; i < e.body.size(); ++i)
                    out += (i ? ", " : "") + listing_instruction(e.body[i]);
                return out + "])";
            }
            else if constexpr (std::is_same_v<E, DataElement>)
                return "Data(" + n(e.idx) + ", " + n(e.mem_idx) + ", " + const_text(e.offset) +
                       ", " + bytes_text(e.init, max_bytes) + ")";
            else
            {
                if (const auto* names = std::get_if<NameSection>(&e.payload))
                {
                    std::string out = "Custom(" + quoted(e.name);
                    if (names->module_name)
                        out += ", module=" + quoted(*names->module_name);
                    out += ", functions=" + name_map_text(names->functions);
                    if (!names->locals.empty())
                        out += ", locals=" + std::to_string(names->locals.size());
                    if (!names->globals.empty())
                        out += ", globals=" + name_map_text(names->globals);
                    if (!names->data.empty())
                        out += ", data=" + name_map_text(names->data);
                    return out + ")";
                }
                return "Custom(" + quoted(e.name) + ", " +
                       bytes_text(std::get<Bytes>(e.payload), max_bytes) + ")";
            }
        },
        element);
}

std::vector<std::string> format_module(const Module& module, std::optional<SectionKind> only)
{
    std::vector<std::string> lines;
    for (uint8_t k = 0; k <= static_cast<uint8_t>(SectionKind::custom); ++k)
    {
        const auto kind = static_cast<SectionKind>(k);
        if (only && *only != kind)
            continue;
        const auto n = section_size(module, kind);
        for (size_t pos = 0; pos < n; ++pos)
            lines.push_back(format_element(element_at(module, kind, pos)));
    }
    return lines;
}
}  // namespace rewasm
