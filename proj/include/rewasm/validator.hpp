// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "module.hpp"
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rewasm
{
enum class Severity : uint8_t
{
    error,
    warning,
};

struct Diagnostic
{
    Severity severity = Severity::error;
    SectionId section = SectionId::custom;
    std::optional<uint32_t> element;
    /// Stable short identifier such as "func-code-count".
    std::string code;
    std::string message;
};

std::string to_string(const Diagnostic& diagnostic);
bool has_errors(const std::vector<Diagnostic>& diagnostics) noexcept;

/// Structural checks (index continuity, index ranges, limits, segment bounds,
/// export names, start signature, block structure, constant expressions).
/// Operand-stack typing is left to an external validator. Never throws.
std::vector<Diagnostic> validate_structure(const Module& module);

enum class ExternalStatus : uint8_t
{
    accepted,
    rejected,
    skipped,
};

struct ExternalResult
{
    ExternalStatus status = ExternalStatus::skipped;
    int exit_code = 0;
    std::string tool_output;

    bool accepted() const noexcept { return status == ExternalStatus::accepted; }
};

/// Environment variable holding the external validator command.
inline constexpr const char* validator_env = "REWASM_VALIDATOR";

/// The command from REWASM_VALIDATOR, if set and non-empty.
std::optional<std::string> validator_command_from_env();

/// Writes `bytes` to a temporary file and runs `command` on it through the
/// shell. A "{}" in the command is replaced by the quoted file path;
/// otherwise the path is appended. No command means skipped. Throws
/// EnvironmentError when the tool cannot be run (shell exit status 126/127).
ExternalResult validate_external(
    std::span<const uint8_t> bytes, const std::optional<std::string>& command);
}  // namespace rewasm
