// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rewasm/opcodes.hpp"
#include "rewasm/errors.hpp"
#include <algorithm>
#include <array>
#include <string>

namespace rewasm
{
namespace
{
constexpr std::array opcode_table = {
#define REWASM_OPCODE_INFO(code, ident, text, layout, align) \
    OpcodeInfo{Opcode::ident, text, ImmediateLayout::layout, align},
    REWASM_FOREACH_OPCODE(REWASM_OPCODE_INFO)
#undef REWASM_OPCODE_INFO
};

constexpr bool table_is_sorted()
{
    for (size_t i = 1; i < opcode_table.size(); ++i)
        if (opcode_table[i - 1].opcode >= opcode_table[i].opcode)
            return false;
    return true;
}
static_assert(table_is_sorted(), "opcode table must be sorted by code");
}  // namespace

const OpcodeInfo* find_opcode(uint16_t code) noexcept
{
    const auto it = std::lower_bound(opcode_table.begin(), opcode_table.end(), code,
        [](const OpcodeInfo& info, uint16_t c) { return static_cast<uint16_t>(info.opcode) < c; });
    if (it == opcode_table.end() || static_cast<uint16_t>(it->opcode) != code)
        return nullptr;
    return &*it;
}

const OpcodeInfo& opcode_info(Opcode opcode)
{
    if (const auto* info = find_opcode(static_cast<uint16_t>(opcode)))
        return *info;
    throw Error{"unknown opcode " + std::to_string(static_cast<unsigned>(opcode))};
}

std::optional<Opcode> opcode_from_mnemonic(std::string_view text) noexcept
{
    for (const auto& info : opcode_table)
        if (info.mnemonic == text)
            return info.opcode;
    return std::nullopt;
}
}  // namespace rewasm
