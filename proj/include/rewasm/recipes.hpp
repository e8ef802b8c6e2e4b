// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "module.hpp"
#include <string>

namespace rewasm
{
/// Imports `call_pre` (i32 + callee params -> callee results) and
/// `call_post` (callee signature) from `hooks_module` and wraps every
/// `call callee` as
///
///     i32.const callee; call call_pre; call callee; call call_post
///
/// The i32 argument is the callee's index before the rewrite. Callees with
/// parameters or results get their arguments spilled into fresh locals so
/// each hook sees the same arguments and the hook results are dropped.
bool instrument_call(Module& module, uint32_t callee, const std::string& hooks_module = "hooks");

/// Appends a hook around `callee` that reserves `frame_size` bytes on the
/// shadow stack, stores `canary` there, calls the callee, traps when the
/// canary changed and pops the frame. Requires a memory and a mutable i32
/// stack-pointer global; throws PreconditionError otherwise.
bool harden_stack_canary(Module& module, uint32_t callee, int64_t canary,
    uint32_t frame_size = 16, uint32_t stack_pointer = 0);

struct MutationResult
{
    bool success = false;
    uint32_t inserted_func_idx = 0;
};

/// Inserts an unreferenced function with a randomly chosen existing type
/// whose body only pushes zero constants for the results. Deterministic in
/// `seed`. Throws PreconditionError when the module has no types.
MutationResult mutate_insert_function(Module& module, uint64_t seed);
}  // namespace rewasm
