// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "section_rewriter.hpp"
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rewasm
{
/// Mnemonic form, e.g. "i32.const 7", "call 5", "i64.store offset=8 align=8",
/// "block i32", "br_table 0 1 2" (the last label is the default).
std::string format_instruction(const Instruction& instr);
std::string format_instructions(const std::vector<Instruction>& instrs);

/// Parses the mnemonic form. Alignment is given in bytes as in the text
/// format and defaults to the natural alignment. Throws SyntaxError.
Instruction parse_instruction(std::string_view text);
/// Instructions separated by ';' or newlines; empty items are skipped.
std::vector<Instruction> parse_instructions(std::string_view text);

/// Constructor-like notation, e.g. `Type(0, ["i32"], ["i32"])`,
/// `Function(2, 0)`, `Elem(0, 1, [1])`. Instructions print as
/// `Instruction("0x03", [])`; byte payloads longer than `max_bytes` are cut.
std::string format_element(const Element& element, size_t max_bytes = 32);

/// One line per element, in section order, optionally for one kind only.
std::vector<std::string> format_module(
    const Module& module, std::optional<SectionKind> only = std::nullopt);

std::string to_hex(std::span<const uint8_t> bytes);
/// Accepts an optional "0x" prefix; throws SyntaxError on odd length or bad
/// digits.
Bytes from_hex(std::string_view text);
}  // namespace rewasm
