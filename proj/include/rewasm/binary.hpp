// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "module.hpp"
#include <array>
#include <span>
#include <string>
#include <vector>

namespace rewasm
{
inline constexpr std::array<uint8_t, 4> wasm_magic = {0x00, 0x61, 0x73, 0x6D};
inline constexpr std::array<uint8_t, 4> wasm_version = {0x01, 0x00, 0x00, 0x00};

struct ParseWarning
{
    uint64_t offset = 0;
    std::string message;
};

struct ParseDiagnostics
{
    std::vector<ParseWarning> warnings;
    /// Number of LEB128 values that used more bytes than necessary.
    uint32_t non_minimal_leb_count = 0;
};

struct ParseResult
{
    Module module;
    ParseDiagnostics diagnostics;
};

/// Decodes a binary into the object model. The "name" custom section is
/// decoded; every other custom or unknown section is kept as opaque bytes
/// together with its position.
///
/// Throws FormatError (bad header, malformed or mismatched section sizes,
/// unsupported encodings) and TruncatedError when the input ends early.
ParseResult parse_module(std::span<const uint8_t> bytes);

/// Encodes a module. Known sections are emitted in canonical order, empty
/// ones are omitted, integers use minimal LEB128 and adjacent local runs of
/// the same type are merged.
///
/// Throws EncodeError when the module cannot be represented, e.g. when the
/// function and code sections differ in length.
Bytes encode_module(const Module& module);

/// Decodes the payload of a "name" custom section.
NameSection parse_name_section(std::span<const uint8_t> payload, uint64_t offset = 0);
Bytes encode_name_section(const NameSection& names);

/// Merges adjacent runs of the same type and drops empty runs.
std::vector<Local> normalize_locals(const std::vector<Local>& locals);
}  // namespace rewasm
