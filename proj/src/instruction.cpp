// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rewasm/instruction.hpp"
#include <bit>

namespace rewasm
{
std::string_view to_string(ValType type)
{
    switch (type)
    {
    case ValType::i32:
        return "i32";
    case ValType::i64:
        return "i64";
    case ValType::f32:
        return "f32";
    case ValType::f64:
        return "f64";
    }
    return "?";
}

std::optional<ValType> valtype_from_string(std::string_view text) noexcept
{
    if (text == "i32")
        return ValType::i32;
    if (text == "i64")
        return ValType::i64;
    if (text == "f32")
        return ValType::f32;
    if (text == "f64")
        return ValType::f64;
    return std::nullopt;
}

std::optional<ValType> valtype_from_byte(uint8_t byte) noexcept
{
    switch (byte)
    {
    case 0x7F:
    case 0x7E:
    case 0x7D:
    case 0x7C:
        return static_cast<ValType>(byte);
    default:
        return std::nullopt;
    }
}

std::vector<uint8_t> Instruction::opcode_bytes() const
{
    const auto code = static_cast<uint16_t>(opcode);
    if (code > 0xFF)
        return {static_cast<uint8_t>(code >> 8), static_cast<uint8_t>(code & 0xFF)};
    return {static_cast<uint8_t>(code)};
}

ConstExpr ConstExpr::i32(int32_t value)
{
    return {{ins::i32_const(value), ins::end()}};
}

ConstExpr ConstExpr::i64(int64_t value)
{
    return {{ins::i64_const(value), ins::end()}};
}

ConstExpr ConstExpr::f32(float value)
{
    return {{ins::f32_const(value), ins::end()}};
}

ConstExpr ConstExpr::f64(double value)
{
    return {{ins::f64_const(value), ins::end()}};
}

ConstExpr ConstExpr::global(uint32_t global_idx)
{
    return {{ins::global_get(global_idx), ins::end()}};
}

std::optional<int32_t> ConstExpr::literal_i32() const
{
    if (instrs.size() != 2 || instrs[0].opcode != Opcode::i32_const ||
        instrs[1].opcode != Opcode::end || instrs[0].immediates.size() != 1)
        return std::nullopt;
    if (const auto* lit = std::get_if<I32>(&instrs[0].immediates[0]))
        return lit->value;
    return std::nullopt;
}

namespace ins
{
Instruction op(Opcode opcode)
{
    return {opcode, {}};
}

Instruction end()
{
    return op(Opcode::end);
}

Instruction call(uint32_t func_idx)
{
    return {Opcode::call, {FuncIdx{func_idx}}};
}

Instruction call_indirect(uint32_t type_idx)
{
    return {Opcode::call_indirect, {TypeIdx{type_idx}, TableIdx{0}}};
}

Instruction local_get(uint32_t idx)
{
    return {Opcode::local_get, {LocalIdx{idx}}};
}

Instruction local_set(uint32_t idx)
{
    return {Opcode::local_set, {LocalIdx{idx}}};
}

Instruction local_tee(uint32_t idx)
{
    return {Opcode::local_tee, {LocalIdx{idx}}};
}

Instruction global_get(uint32_t idx)
{
    return {Opcode::global_get, {GlobalIdx{idx}}};
}

Instruction global_set(uint32_t idx)
{
    return {Opcode::global_set, {GlobalIdx{idx}}};
}

Instruction i32_const(int32_t value)
{
    return {Opcode::i32_const, {I32{value}}};
}

Instruction i64_const(int64_t value)
{
    return {Opcode::i64_const, {I64{value}}};
}

Instruction f32_const(float value)
{
    return {Opcode::f32_const, {F32{std::bit_cast<uint32_t>(value)}}};
}

Instruction f64_const(double value)
{
    return {Opcode::f64_const, {F64{std::bit_cast<uint64_t>(value)}}};
}

Instruction block(BlockType type)
{
    return {Opcode::block, {type}};
}

Instruction loop(BlockType type)
{
    return {Opcode::loop, {type}};
}

Instruction if_(BlockType type)
{
    return {Opcode::if_, {type}};
}

Instruction br(uint32_t depth)
{
    return {Opcode::br, {LabelIdx{depth}}};
}

Instruction br_if(uint32_t depth)
{
    return {Opcode::br_if, {LabelIdx{depth}}};
}

Instruction br_table(std::vector<uint32_t> targets, uint32_t default_target)
{
    Instruction instr{Opcode::br_table, {}};
    for (const auto t : targets)
        instr.immediates.emplace_back(LabelIdx{t});
    instr.immediates.emplace_back(LabelIdx{default_target});
    return instr;
}

Instruction memory(Opcode opcode, uint32_t offset, std::optional<uint32_t> align)
{
    const auto& info = opcode_info(opcode);
    return {opcode, {MemArg{align.value_or(info.natural_alignment), offset}}};
}
}  // namespace ins

bool is_well_structured(const std::vector<Instruction>& body) noexcept
{
    // Each open frame remembers whether it was opened by `if`.
    std::vector<bool> frames;
    for (size_t i = 0; i < body.size(); ++i)
    {
        const auto op = body[i].opcode;
        if (opens_block(op))
            frames.push_back(op == Opcode::if_);
        else if (op == Opcode::else_)
        {
            if (frames.empty() || !frames.back())
                return false;
            frames.back() = false;  // a second else is not allowed
        }
        else if (op == Opcode::end)
        {
            if (frames.empty())
                return i + 1 == body.size();
            frames.pop_back();
        }
    }
    return false;
}

std::vector<Instruction> close_body(std::vector<Instruction> body)
{
    int64_t depth = 0;
    for (const auto& instr : body)
    {
        if (opens_block(instr.opcode))
            ++depth;
        else if (instr.opcode == Opcode::end)
            --depth;
    }
    if (depth >= 0)
        body.push_back(ins::end());
    return body;
}
}  // namespace rewasm
