// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "delta.hpp"
#include "module.hpp"
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Recipe files: one step per line, `<api> [positional...] [key=value...]`.
// `#` starts a comment, values may be double-quoted, instruction lists use
// mnemonic syntax separated by ';', type lists are comma separated
// (`i32,i64`, `[]` for none), byte strings are hex.
//
//     insertGlobalVariable 0 i32 mut=1 init=42
//     appendInternalFunction params=i32 results=i32 body="local.get 0; end"
//     instrumentCall callee=5 module=hooks

namespace rewasm
{
struct ScriptStep
{
    uint32_t line = 0;
    std::string api;
    std::vector<std::string> positional;
    std::vector<std::pair<std::string, std::string>> named;
};

/// Throws SyntaxError naming the line.
std::vector<ScriptStep> parse_script(std::string_view text);

struct ScriptOptions
{
    /// Seed for steps with random choices when they do not give one.
    uint64_t seed = 0;
};

struct StepOutcome
{
    bool success = false;
    std::string message;
    std::vector<RewriteDelta> deltas;
};

/// Runs one step. API errors propagate as exceptions; SyntaxError is thrown
/// for unknown steps or bad arguments.
StepOutcome run_step(Module& module, const ScriptStep& step, const ScriptOptions& options = {});

/// Canonical step names.
std::vector<std::string> script_api_names();
}  // namespace rewasm
