// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace rewasm
{
/// Shape of the immediates that follow an opcode in the binary format.
enum class ImmediateLayout : uint8_t
{
    none,
    block_type,
    label,
    label_table,  ///< br_table: vec(label) + default label
    function,
    call_indirect,  ///< type index + table index
    local,
    global,
    memarg,
    memory,  ///< reserved memory index byte of memory.size / memory.grow
    i32,
    i64,
    f32,
    f64,
};

// X(code, identifier, mnemonic, layout, natural alignment log2)
// Opcodes in the 0xFC prefix space are stored as 0xFC00 | sub-opcode.
#define REWASM_FOREACH_OPCODE(X)                               \
    X(0x00, unreachable, "unreachable", none, 0)               \
    X(0x01, nop, "nop", none, 0)                               \
    X(0x02, block, "block", block_type, 0)                     \
    X(0x03, loop, "loop", block_type, 0)                       \
    X(0x04, if_, "if", block_type, 0)                          \
    X(0x05, else_, "else", none, 0)                            \
    X(0x0B, end, "end", none, 0)                               \
    X(0x0C, br, "br", label, 0)                                \
    X(0x0D, br_if, "br_if", label, 0)                          \
    X(0x0E, br_table, "br_table", label_table, 0)              \
    X(0x0F, return_, "return", none, 0)                        \
    X(0x10, call, "call", function, 0)                         \
    X(0x11, call_indirect, "call_indirect", call_indirect, 0)  \
    X(0x1A, drop, "drop", none, 0)                             \
    X(0x1B, select, "select", none, 0)                         \
    X(0x20, local_get, "local.get", local, 0)                  \
    X(0x21, local_set, "local.set", local, 0)                  \
    X(0x22, local_tee, "local.tee", local, 0)                  \
    X(0x23, global_get, "global.get", global, 0)               \
    X(0x24, global_set, "global.set", global, 0)               \
    X(0x28, i32_load, "i32.load", memarg, 2)                   \
    X(0x29, i64_load, "i64.load", memarg, 3)                   \
    X(0x2A, f32_load, "f32.load", memarg, 2)                   \
    X(0x2B, f64_load, "f64.load", memarg, 3)                   \
    X(0x2C, i32_load8_s, "i32.load8_s", memarg, 0)             \
    X(0x2D, i32_load8_u, "i32.load8_u", memarg, 0)             \
    X(0x2E, i32_load16_s, "i32.load16_s", memarg, 1)           \
    X(0x2F, i32_load16_u, "i32.load16_u", memarg, 1)           \
    X(0x30, i64_load8_s, "i64.load8_s", memarg, 0)             \
    X(0x31, i64_load8_u, "i64.load8_u", memarg, 0)             \
    X(0x32, i64_load16_s, "i64.load16_s", memarg, 1)           \
    X(0x33, i64_load16_u, "i64.load16_u", memarg, 1)           \
    X(0x34, i64_load32_s, "i64.load32_s", memarg, 2)           \
    X(0x35, i64_load32_u, "i64.load32_u", memarg, 2)           \
    X(0x36, i32_store, "i32.store", memarg, 2)                 \
    X(0x37, i64_store, "i64.store", memarg, 3)                 \
    X(0x38, f32_store, "f32.store", memarg, 2)                 \
    X(0x39, f64_store, "f64.store", memarg, 3)                 \
    X(0x3A, i32_store8, "i32.store8", memarg, 0)               \
    X(0x3B, i32_store16, "i32.store16", memarg, 1)             \
    X(0x3C, i64_store8, "i64.store8", memarg, 0)               \
    X(0x3D, i64_store16, "i64.store16", memarg, 1)             \
    X(0x3E, i64_store32, "i64.store32", memarg, 2)             \
    X(0x3F, memory_size, "memory.size", memory, 0)             \
    X(0x40, memory_grow, "memory.grow", memory, 0)             \
    X(0x41, i32_const, "i32.const", i32, 0)                    \
    X(0x42, i64_const, "i64.const", i64, 0)                    \
    X(0x43, f32_const, "f32.const", f32, 0)                    \
    X(0x44, f64_const, "f64.const", f64, 0)                    \
    X(0x45, i32_eqz, "i32.eqz", none, 0)                       \
    X(0x46, i32_eq, "i32.eq", none, 0)                         \
    X(0x47, i32_ne, "i32.ne", none, 0)                         \
    X(0x48, i32_lt_s, "i32.lt_s", none, 0)                     \
    X(0x49, i32_lt_u, "i32.lt_u", none, 0)                     \
    X(0x4A, i32_gt_s, "i32.gt_s", none, 0)                     \
    X(0x4B, i32_gt_u, "i32.gt_u", none, 0)                     \
    X(0x4C, i32_le_s, "i32.le_s", none, 0)                     \
    X(0x4D, i32_le_u, "i32.le_u", none, 0)                     \
    X(0x4E, i32_ge_s, "i32.ge_s", none, 0)                     \
    X(0x4F, i32_ge_u, "i32.ge_u", none, 0)                     \
    X(0x50, i64_eqz, "i64.eqz", none, 0)                       \
    X(0x51, i64_eq, "i64.eq", none, 0)                         \
    X(0x52, i64_ne, "i64.ne", none, 0)                         \
    X(0x53, i64_lt_s, "i64.lt_s", none, 0)                     \
    X(0x54, i64_lt_u, "i64.lt_u", none, 0)                     \
    X(0x55, i64_gt_s, "i64.gt_s", none, 0)                     \
    X(0x56, i64_gt_u, "i64.gt_u", none, 0)                     \
    X(0x57, i64_le_s, "i64.le_s", none, 0)                     \
    X(0x58, i64_le_u, "i64.le_u", none, 0)                     \
    X(0x59, i64_ge_s, "i64.ge_s", none, 0)                     \
    X(0x5A, i64_ge_u, "i64.ge_u", none, 0)                     \
    X(0x5B, f32_eq, "f32.eq", none, 0)                         \
    X(0x5C, f32_ne, "f32.ne", none, 0)                         \
    X(0x5D, f32_lt, "f32.lt", none, 0)                         \
    X(0x5E, f32_gt, "f32.gt", none, 0)                         \
    X(0x5F, f32_le, "f32.le", none, 0)                         \
    X(0x60, f32_ge, "f32.ge", none, 0)                         \
    X(0x61, f64_eq, "f64.eq", none, 0)                         \
    X(0x62, f64_ne, "f64.ne", none, 0)                         \
    X(0x63, f64_lt, "f64.lt", none, 0)                         \
    X(0x64, f64_gt, "f64.gt", none, 0)                         \
    X(0x65, f64_le, "f64.le", none, 0)                         \
    X(0x66, f64_ge, "f64.ge", none, 0)                         \
    X(0x67, i32_clz, "i32.clz", none, 0)                       \
    X(0x68, i32_ctz, "i32.ctz", none, 0)                       \
    X(0x69, i32_popcnt, "i32.popcnt", none, 0)                 \
    X(0x6A, i32_add, "i32.add", none, 0)                       \
    X(0x6B, i32_sub, "i32.sub", none, 0)                       \
    X(0x6C, i32_mul, "i32.mul", none, 0)                       \
    X(0x6D, i32_div_s, "i32.div_s", none, 0)                   \
    X(0x6E, i32_div_u, "i32.div_u", none, 0)                   \
    X(0x6F, i32_rem_s, "i32.rem_s", none, 0)                   \
    X(0x70, i32_rem_u, "i32.rem_u", none, 0)                   \
    X(0x71, i32_and, "i32.and", none, 0)                       \
    X(0x72, i32_or, "i32.or", none, 0)                         \
    X(0x73, i32_xor, "i32.xor", none, 0)                       \
    X(0x74, i32_shl, "i32.shl", none, 0)                       \
    X(0x75, i32_shr_s, "i32.shr_s", none, 0)                   \
    X(0x76, i32_shr_u, "i32.shr_u", none, 0)                   \
    X(0x77, i32_rotl, "i32.rotl", none, 0)                     \
    X(0x78, i32_rotr, "i32.rotr", none, 0)                     \
    X(0x79, i64_clz, "i64.clz", none, 0)                       \
    X(0x7A, i64_ctz, "i64.ctz", none, 0)                       \
    X(0x7B, i64_popcnt, "i64.popcnt", none, 0)                 \
    X(0x7C, i64_add, "i64.add", none, 0)                       \
    X(0x7D, i64_sub, "i64.sub", none, 0)                       \
    X(0x7E, i64_mul, "i64.mul", none, 0)                       \
    X(0x7F, i64_div_s, "i64.div_s", none, 0)                   \
    X(0x80, i64_div_u, "i64.div_u", none, 0)                   \
    X(0x81, i64_rem_s, "i64.rem_s", none, 0)                   \
    X(0x82, i64_rem_u, "i64.rem_u", none, 0)                   \
    X(0x83, i64_and, "i64.and", none, 0)                       \
    X(0x84, i64_or, "i64.or", none, 0)                         \
    X(0x85, i64_xor, "i64.xor", none, 0)                       \
    X(0x86, i64_shl, "i64.shl", none, 0)                       \
    X(0x87, i64_shr_s, "i64.shr_s", none, 0)                   \
    X(0x88, i64_shr_u, "i64.shr_u", none, 0)                   \
    X(0x89, i64_rotl, "i64.rotl", none, 0)                     \
    X(0x8A, i64_rotr, "i64.rotr", none, 0)                     \
    X(0x8B, f32_abs, "f32.abs", none, 0)                       \
    X(0x8C, f32_neg, "f32.neg", none, 0)                       \
    X(0x8D, f32_ceil, "f32.ceil", none, 0)                     \
    X(0x8E, f32_floor, "f32.floor", none, 0)                   \
    X(0x8F, f32_trunc, "f32.trunc", none, 0)                   \
    X(0x90, f32_nearest, "f32.nearest", none, 0)               \
    X(0x91, f32_sqrt, "f32.sqrt", none, 0)                     \
    X(0x92, f32_add, "f32.add", none, 0)                       \
    X(0x93, f32_sub, "f32.sub", none, 0)                       \
    X(0x94, f32_mul, "f32.mul", none, 0)                       \
    X(0x95, f32_div, "f32.div", none, 0)                       \
    X(0x96, f32_min, "f32.min", none, 0)                       \
    X(0x97, f32_max, "f32.max", none, 0)                       \
    X(0x98, f32_copysign, "f32.copysign", none, 0)             \
    X(0x99, f64_abs, "f64.abs", none, 0)                       \
    X(0x9A, f64_neg, "f64.neg", none, 0)                       \
    X(0x9B, f64_ceil, "f64.ceil", none, 0)                     \
    X(0x9C, f64_floor, "f64.floor", none, 0)                   \
    X(0x9D, f64_trunc, "f64.trunc", none, 0)                   \
    X(0x9E, f64_nearest, "f64.nearest", none, 0)               \
    X(0x9F, f64_sqrt, "f64.sqrt", none, 0)                     \
    X(0xA0, f64_add, "f64.add", none, 0)                       \
    X(0xA1, f64_sub, "f64.sub", none, 0)                       \
    X(0xA2, f64_mul, "f64.mul", none, 0)                       \
    X(0xA3, f64_div, "f64.div", none, 0)                       \
    X(0xA4, f64_min, "f64.min", none, 0)                       \
    X(0xA5, f64_max, "f64.max", none, 0)                       \
    X(0xA6, f64_copysign, "f64.copysign", none, 0)             \
    X(0xA7, i32_wrap_i64, "i32.wrap_i64", none, 0)             \
    X(0xA8, i32_trunc_f32_s, "i32.trunc_f32_s", none, 0)       \
    X(0xA9, i32_trunc_f32_u, "i32.trunc_f32_u", none, 0)       \
    X(0xAA, i32_trunc_f64_s, "i32.trunc_f64_s", none, 0)       \
    X(0xAB, i32_trunc_f64_u, "i32.trunc_f64_u", none, 0)       \
    X(0xAC, i64_extend_i32_s, "i64.extend_i32_s", none, 0)     \
    X(0xAD, i64_extend_i32_u, "i64.extend_i32_u", none, 0)     \
    X(0xAE, i64_trunc_f32_s, "i64.trunc_f32_s", none, 0)       \
    X(0xAF, i64_trunc_f32_u, "i64.trunc_f32_u", none, 0)       \
    X(0xB0, i64_trunc_f64_s, "i64.trunc_f64_s", none, 0)       \
    X(0xB1, i64_trunc_f64_u, "i64.trunc_f64_u", none, 0)       \
    X(0xB2, f32_convert_i32_s, "f32.convert_i32_s", none, 0)   \
    X(0xB3, f32_convert_i32_u, "f32.convert_i32_u", none, 0)   \
    X(0xB4, f32_convert_i64_s, "f32.convert_i64_s", none, 0)   \
    X(0xB5, f32_convert_i64_u, "f32.convert_i64_u", none, 0)   \
    X(0xB6, f32_demote_f64, "f32.demote_f64", none, 0)         \
    X(0xB7, f64_convert_i32_s, "f64.convert_i32_s", none, 0)   \
    X(0xB8, f64_convert_i32_u, "f64.convert_i32_u", none, 0)   \
    X(0xB9, f64_convert_i64_s, "f64.convert_i64_s", none, 0)   \
    X(0xBA, f64_convert_i64_u, "f64.convert_i64_u", none, 0)   \
    X(0xBB, f64_promote_f32, "f64.promote_f32", none, 0)       \
    X(0xBC, i32_reinterpret_f32, "i32.reinterpret_f32", none, 0) \
    X(0xBD, i64_reinterpret_f64, "i64.reinterpret_f64", none, 0) \
    X(0xBE, f32_reinterpret_i32, "f32.reinterpret_i32", none, 0) \
    X(0xBF, f64_reinterpret_i64, "f64.reinterpret_i64", none, 0) \
    X(0xC0, i32_extend8_s, "i32.extend8_s", none, 0)           \
    X(0xC1, i32_extend16_s, "i32.extend16_s", none, 0)         \
    X(0xC2, i64_extend8_s, "i64.extend8_s", none, 0)           \
    X(0xC3, i64_extend16_s, "i64.extend16_s", none, 0)         \
    X(0xC4, i64_extend32_s, "i64.extend32_s", none, 0)         \
    X(0xFC00, i32_trunc_sat_f32_s, "i32.trunc_sat_f32_s", none, 0) \
    X(0xFC01, i32_trunc_sat_f32_u, "i32.trunc_sat_f32_u", none, 0) \
    X(0xFC02, i32_trunc_sat_f64_s, "i32.trunc_sat_f64_s", none, 0) \
    X(0xFC03, i32_trunc_sat_f64_u, "i32.trunc_sat_f64_u", none, 0) \
    X(0xFC04, i64_trunc_sat_f32_s, "i64.trunc_sat_f32_s", none, 0) \
    X(0xFC05, i64_trunc_sat_f32_u, "i64.trunc_sat_f32_u", none, 0) \
    X(0xFC06, i64_trunc_sat_f64_s, "i64.trunc_sat_f64_s", none, 0) \
    X(0xFC07, i64_trunc_sat_f64_u, "i64.trunc_sat_f64_u", none, 0)

enum class Opcode : uint16_t
{
#define REWASM_OPCODE_ENUM(code, ident, mnemonic, layout, align) ident = code,
    REWASM_FOREACH_OPCODE(REWASM_OPCODE_ENUM)
#undef REWASM_OPCODE_ENUM
};

constexpr uint8_t prefix_fc = 0xFC;

struct OpcodeInfo
{
    Opcode opcode;
    std::string_view mnemonic;
    ImmediateLayout layout;
    /// log2 of the access width; meaningful for memarg instructions only.
    uint8_t natural_alignment;
};

/// Returns nullptr for codes outside the supported instruction set.
const OpcodeInfo* find_opcode(uint16_t code) noexcept;
const OpcodeInfo& opcode_info(Opcode opcode);
std::optional<Opcode> opcode_from_mnemonic(std::string_view mnemonic) noexcept;

inline std::string_view mnemonic(Opcode opcode)
{
    return opcode_info(opcode).mnemonic;
}

constexpr bool opens_block(Opcode op) noexcept
{
    return op == Opcode::block || op == Opcode::loop || op == Opcode::if_;
}
}  // namespace rewasm
