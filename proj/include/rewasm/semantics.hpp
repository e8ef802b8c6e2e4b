// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "module.hpp"
#include <string>
#include <vector>

// High-level rewriting APIs. Every call edits the module through the section
// rewriter and then re-points all cross-section references.
//
// Index parameters are absolute in their index space (function and global
// indices count imports first). modify/delete calls whose target does not
// exist return false and leave the module untouched; insert calls with an
// impossible position throw IndexError.

namespace rewasm
{
using ValTypes = std::vector<ValType>;
using Body = std::vector<Instruction>;

// Globals.
bool append_global_variable(Module& m, ValType type, Mutability mut, ConstExpr init);
bool insert_global_variable(
    Module& m, uint32_t idx, ValType type, Mutability mut, ConstExpr init);
bool modify_global_variable(
    Module& m, uint32_t idx, ValType type, Mutability mut, ConstExpr init);
/// Throws BrokenReferenceError while the global is still used.
bool delete_global_variable(Module& m, uint32_t idx);

// Imports and exports.
bool insert_import_function(Module& m, uint32_t idx, std::string module_name,
    std::string func_name, ValTypes params, ValTypes results);
bool append_import_function(
    Module& m, std::string module_name, std::string func_name, ValTypes params, ValTypes results);
/// Replaces module name, field name and signature of function import `idx`.
bool modify_import_function(Module& m, uint32_t idx, std::string module_name,
    std::string func_name, ValTypes params, ValTypes results);
/// Throws BrokenReferenceError while the import is still used.
bool delete_import_function(Module& m, uint32_t idx);

/// `idx` is the position in the export section.
bool insert_export_function(Module& m, uint32_t idx, std::string name, uint32_t func_idx);
bool append_export_function(Module& m, std::string name, uint32_t func_idx);
/// Renames and/or re-targets the function export at position `idx`.
bool modify_export_function(Module& m, uint32_t idx, std::string name, uint32_t func_idx);
bool delete_export_function(Module& m, uint32_t idx);

// Linear memory.
bool append_linear_memory(Module& m, uint32_t page_num);
bool modify_linear_memory(Module& m, uint32_t offset, const Bytes& bytes);

// Functions.
bool insert_internal_function(Module& m, uint32_t func_idx, ValTypes params, ValTypes results,
    std::vector<Local> locals, Body body);
bool append_internal_function(
    Module& m, ValTypes params, ValTypes results, std::vector<Local> locals, Body body);
/// Inserts the function and appends it to elem segment 0, creating the
/// table and segment when missing.
bool insert_indirect_function(Module& m, uint32_t func_idx, ValTypes params, ValTypes results,
    std::vector<Local> locals, Body body);
/// Inserts a wrapper for `hooked_func_idx` at `func_idx` and redirects calls
/// outside the wrapper, elem entries, exports and the start function to it.
/// Indices inside `body` refer to the module before the insertion.
bool insert_hook_function(Module& m, uint32_t func_idx, uint32_t hooked_func_idx, Body body,
    ValTypes params, ValTypes results, std::vector<Local> locals);

bool delete_func_instr(Module& m, uint32_t func_idx, uint32_t offset);
/// Inserts before the final `end`.
bool append_func_instrs(Module& m, uint32_t func_idx, Body instrs);
/// Inserts before the instruction at `offset`.
bool insert_func_instrs(Module& m, uint32_t func_idx, uint32_t offset, Body instrs);
/// Replaces the instruction at `offset` by `instrs`.
bool modify_func_instr(Module& m, uint32_t func_idx, uint32_t offset, Body instrs);
/// Replaces every occurrence of `target` in every internal function.
bool modify_func_instr(Module& m, const Instruction& target, Body instrs);
/// Returns the local index of the new local.
uint32_t append_func_local(Module& m, uint32_t func_idx, ValType type);

// Names. insert fails on an existing entry, modify/delete on a missing one.
bool modify_func_name(Module& m, uint32_t func_idx, std::string name);
bool delete_func_name(Module& m, uint32_t func_idx);
bool insert_func_name(Module& m, uint32_t func_idx, std::string name);
bool modify_global_name(Module& m, uint32_t global_idx, std::string name);
bool delete_global_name(Module& m, uint32_t global_idx);
bool insert_global_name(Module& m, uint32_t global_idx, std::string name);
bool insert_data_name(Module& m, uint32_t data_idx, std::string name);
bool modify_data_name(Module& m, uint32_t data_idx, std::string name);
bool delete_data_name(Module& m, uint32_t data_idx);

/// Index of a type with this signature, appending one when none exists.
uint32_t find_or_add_type(Module& m, const ValTypes& params, const ValTypes& results);
}  // namespace rewasm
