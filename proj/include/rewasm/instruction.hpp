// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "opcodes.hpp"
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rewasm
{
enum class ValType : uint8_t
{
    i32 = 0x7F,
    i64 = 0x7E,
    f32 = 0x7D,
    f64 = 0x7C,
};

std::string_view to_string(ValType type);
std::optional<ValType> valtype_from_string(std::string_view text) noexcept;
std::optional<ValType> valtype_from_byte(uint8_t byte) noexcept;

/// An index into one specific index space; the tag keeps spaces apart.
template <typename Tag>
struct IndexImmediate
{
    uint32_t value = 0;

    friend auto operator<=>(const IndexImmediate&, const IndexImmediate&) = default;
};

using FuncIdx = IndexImmediate<struct FuncIdxTag>;
using TypeIdx = IndexImmediate<struct TypeIdxTag>;
using GlobalIdx = IndexImmediate<struct GlobalIdxTag>;
using LocalIdx = IndexImmediate<struct LocalIdxTag>;
using LabelIdx = IndexImmediate<struct LabelIdxTag>;
using TableIdx = IndexImmediate<struct TableIdxTag>;
using MemIdx = IndexImmediate<struct MemIdxTag>;

struct BlockType
{
    enum class Kind : uint8_t
    {
        empty,
        value,
        type_index,
    };

    Kind kind = Kind::empty;
    ValType value = ValType::i32;  ///< valid when kind == value
    uint32_t type_index = 0;       ///< valid when kind == type_index

    static BlockType empty() { return {}; }
    static BlockType of(ValType t) { return {Kind::value, t, 0}; }
    static BlockType of_type(uint32_t idx) { return {Kind::type_index, ValType::i32, idx}; }

    friend bool operator==(const BlockType& a, const BlockType& b)
    {
        if (a.kind != b.kind)
            return false;
        if (a.kind == Kind::value)
            return a.value == b.value;
        if (a.kind == Kind::type_index)
            return a.type_index == b.type_index;
        return true;
    }
};

struct MemArg
{
    uint32_t align = 0;  ///< log2 of the alignment
    uint32_t offset = 0;

    friend bool operator==(const MemArg&, const MemArg&) = default;
};

struct I32
{
    int32_t value = 0;
    friend bool operator==(const I32&, const I32&) = default;
};

struct I64
{
    int64_t value = 0;
    friend bool operator==(const I64&, const I64&) = default;
};

/// Float literals are kept as raw bits so NaN payloads survive a round trip.
struct F32
{
    uint32_t bits = 0;
    friend bool operator==(const F32&, const F32&) = default;
};

struct F64
{
    uint64_t bits = 0;
    friend bool operator==(const F64&, const F64&) = default;
};

using Immediate = std::variant<FuncIdx, TypeIdx, GlobalIdx, LocalIdx, LabelIdx, TableIdx, MemIdx,
    BlockType, MemArg, I32, I64, F32, F64>;

struct Instruction
{
    Opcode opcode = Opcode::nop;
    /// br_table stores its targets followed by the default label.
    std::vector<Immediate> immediates;

    /// Raw encoding of the opcode (prefix byte first for 0xFC instructions).
    std::vector<uint8_t> opcode_bytes() const;

    friend bool operator==(const Instruction&, const Instruction&) = default;
};

/// Instruction sequence of a constant initializer, including the final `end`.
struct ConstExpr
{
    std::vector<Instruction> instrs;

    static ConstExpr i32(int32_t value);
    static ConstExpr i64(int64_t value);
    static ConstExpr f32(float value);
    static ConstExpr f64(double value);
    static ConstExpr global(uint32_t global_idx);

    /// The value when the expression is exactly `i32.const k; end`.
    std::optional<int32_t> literal_i32() const;

    friend bool operator==(const ConstExpr&, const ConstExpr&) = default;
};

/// Factories for the instructions most rewriting code needs to build.
namespace ins
{
Instruction op(Opcode opcode);
Instruction end();
Instruction call(uint32_t func_idx);
Instruction call_indirect(uint32_t type_idx);
Instruction local_get(uint32_t idx);
Instruction local_set(uint32_t idx);
Instruction local_tee(uint32_t idx);
Instruction global_get(uint32_t idx);
Instruction global_set(uint32_t idx);
Instruction i32_const(int32_t value);
Instruction i64_const(int64_t value);
Instruction f32_const(float value);
Instruction f64_const(double value);
Instruction block(BlockType type = {});
Instruction loop(BlockType type = {});
Instruction if_(BlockType type = {});
Instruction br(uint32_t depth);
Instruction br_if(uint32_t depth);
Instruction br_table(std::vector<uint32_t> targets, uint32_t default_target);
/// Load or store with the opcode's natural alignment unless given.
Instruction memory(Opcode opcode, uint32_t offset = 0, std::optional<uint32_t> align = {});
}  // namespace ins

/// Checks that block/loop/if and end markers balance and that the sequence is
/// closed by a final `end` at depth zero. `else` must be inside an `if`.
bool is_well_structured(const std::vector<Instruction>& body) noexcept;

/// Appends the closing `end` when the sequence is not already closed.
std::vector<Instruction> close_body(std::vector<Instruction> body);
}  // namespace rewasm
