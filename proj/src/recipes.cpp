// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rewasm/recipes.hpp"
#include "rewasm/errors.hpp"
#include "rewasm/semantics.hpp"
#include <random>

namespace rewasm
{
namespace
{
Instruction zero_of(ValType type)
{
    switch (type)
    {
    case ValType::i32:
        return ins::i32_const(0);
    case ValType::i64:
        return ins::i64_const(0);
    case ValType::f32:
        return ins::f32_const(0.0F);
    case ValType::f64:
        return ins::f64_const(0.0);
    }
    return ins::i32_const(0);
}

std::vector<uint32_t> positions_of(const Body& body, const Instruction& target)
{
    std::vector<uint32_t> out;
    for (uint32_t i = 0; i < body.size(); ++i)
        if (body[i] == target)
            out.push_back(i);
    return out;
}
}  // namespace

bool instrument_call(Module& m, uint32_t callee, const std::string& hooks_module)
{
    const auto type = m.function_type(callee);
    const auto& params = type.params;
    const auto& results = type.results;

    ValTypes pre_params{ValType::i32};
    pre_params.insert(pre_params.end(), params.begin(), params.end());

    // Appending a function import moves every internal function up by one.
    auto target = callee;
    const auto pre = m.imported_count(ExternalKind::function);
    append_import_function(m, hooks_module, "call_pre", pre_params, results);
    if (target >= pre)
        ++target;
    const auto post = m.imported_count(ExternalKind::function);
    append_import_function(m, hooks_module, "call_post", params, results);
    if (target >= post)
        ++target;

    const auto call = ins::call(target);
    const auto imported = m.imported_count(ExternalKind::function);
    for (uint32_t pos = 0; pos < m.code_sec.size(); ++pos)
    {
        const auto func_idx = imported + pos;
        const auto sites = positions_of(m.code_sec[pos].body, call);
        if (sites.empty())
            continue;

        std::vector<uint32_t> arg_locals;
        for (const auto p : params)
            arg_locals.push_back(append_func_local(m, func_idx, p));
        std::vector<uint32_t> result_locals;
        for (const auto r : results)
            result_locals.push_back(append_func_local(m, func_idx, r));

        auto push_args = [&](Body& out) {
            for (const auto l : arg_locals)
                out.push_back(ins::local_get(l));
        };
        auto drop_results = [&](Body& out) {
            for (size_t i = 0; i < results.size(); ++i)
                out.push_back(ins::op(Opcode::drop));
        };

        Body wrapped;
        for (auto it = arg_locals.rbegin(); it != arg_locals.rend(); ++it)
            wrapped.push_back(ins::local_set(*it));
        wrapped.push_back(ins::i32_const(static_cast<int32_t>(callee)));
        push_args(wrapped);
        wrapped.push_back(ins::call(pre));
        drop_results(wrapped);
        push_args(wrapped);
        wrapped.push_back(call);
        for (auto it = result_locals.rbegin(); it != result_locals.rend(); ++it)
            wrapped.push_back(ins::local_set(*it));
        push_args(wrapped);
        wrapped.push_back(ins::call(post));
        drop_results(wrapped);
        for (const auto l : result_locals)
            wrapped.push_back(ins::local_get(l));

        // Back to front so earlier offsets stay valid.
        for (auto it = sites.rbegin(); it != sites.rend(); ++it)
            modify_func_instr(m, func_idx, *it, wrapped);
    }
    return true;
}

bool harden_stack_canary(
    Module& m, uint32_t callee, int64_t canary, uint32_t frame_size, uint32_t stack_pointer)
{
    if (m.total_memory_count() == 0)
        throw PreconditionError{"stack canary needs a linear memory"};
    if (stack_pointer >= m.total_global_count())
        throw PreconditionError{"stack pointer global " + std::to_string(stack_pointer) +
                                " does not exist"};
    const auto sp_type = m.global_type(stack_pointer);
    if (sp_type.type != ValType::i32 || sp_type.mut != Mutability::mutable_)
        throw PreconditionError{"stack pointer global " + std::to_string(stack_pointer) +
                                " must be a mutable i32"};

    const auto type = m.function_type(callee);
    const auto frame = static_cast<int32_t>(frame_size);

    Body body{
        ins::global_get(stack_pointer),
        ins::i32_const(frame),
        ins::op(Opcode::i32_sub),
        ins::global_set(stack_pointer),
        ins::global_get(stack_pointer),
        ins::i64_const(canary),
        ins::memory(Opcode::i64_store),
    };
    for (uint32_t i = 0; i < type.params.size(); ++i)
        body.push_back(ins::local_get(i));
    const Body check{
        ins::global_get(stack_pointer),
        ins::memory(Opcode::i64_load),
        ins::i64_const(canary),
        ins::op(Opcode::i64_eq),
        ins::br_if(0),
        ins::op(Opcode::unreachable),
    };
    body.push_back(ins::call(callee));
    body.push_back(ins::block());
    body.insert(body.end(), check.begin(), check.end());
    body.push_back(ins::end());
    body.insert(body.end(), {
                                ins::global_get(stack_pointer),
                                ins::i32_const(frame),
                                ins::op(Opcode::i32_add),
                                ins::global_set(stack_pointer),
                                ins::op(Opcode::return_),
                            });

    return insert_hook_function(
        m, m.total_function_count(), callee, std::move(body), type.params, type.results, {});
}

MutationResult mutate_insert_function(Module& m, uint64_t seed)
{
    if (m.type_sec.empty())
        throw PreconditionError{"module has no types to pick a signature from"};
    std::mt19937_64 rng{seed};
    std::uniform_int_distribution<size_t> pick_type{0, m.type_sec.size() - 1};
    const auto type = m.type_sec[pick_type(rng)];

    Body body;
    for (const auto r : type.results)
        body.push_back(zero_of(r));

    const auto imported = m.imported_count(ExternalKind::function);
    std::uniform_int_distribution<uint32_t> pick_pos{imported, m.total_function_count()};
    const auto func_idx = pick_pos(rng);
    insert_internal_function(m, func_idx, type.params, type.results, {}, std::move(body));
    return {true, func_idx};
}
}  // namespace rewasm
