// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rewasm/module.hpp"
#include "rewasm/errors.hpp"
#include <algorithm>
#include <numeric>

namespace rewasm
{
std::string_view to_string(ExternalKind kind)
{
    switch (kind)
    {
    case ExternalKind::function:
        return "func";
    case ExternalKind::table:
        return "table";
    case ExternalKind::memory:
        return "mem";
    case ExternalKind::global:
        return "global";
    }
    return "?";
}

std::optional<uint32_t> ImportElement::type_idx() const noexcept
{
    if (const auto* f = std::get_if<FunctionImport>(&desc))
        return f->type_idx;
    return std::nullopt;
}

uint64_t CodeElement::local_count() const noexcept
{
    return std::accumulate(locals.begin(), locals.end(), uint64_t{0},
        [](uint64_t sum, const Local& l) { return sum + l.count; });
}

uint32_t Module::imported_count(ExternalKind kind) const noexcept
{
    return static_cast<uint32_t>(std::count_if(import_sec.begin(), import_sec.end(),
        [kind](const ImportElement& imp) { return imp.kind() == kind; }));
}

uint32_t Module::total_function_count() const noexcept
{
    return imported_count(ExternalKind::function) + static_cast<uint32_t>(func_sec.size());
}

uint32_t Module::total_global_count() const noexcept
{
    return imported_count(ExternalKind::global) + static_cast<uint32_t>(global_sec.size());
}

uint32_t Module::total_table_count() const noexcept
{
    return imported_count(ExternalKind::table) + static_cast<uint32_t>(table_sec.size());
}

uint32_t Module::total_memory_count() const noexcept
{
    return imported_count(ExternalKind::memory) + static_cast<uint32_t>(mem_sec.size());
}

ResolvedFunction Module::resolve_function(uint32_t func_idx) const
{
    uint32_t seen = 0;
    for (uint32_t pos = 0; pos < import_sec.size(); ++pos)
    {
        const auto& imp = import_sec[pos];
        if (!imp.is_function())
            continue;
        if (seen == func_idx)
            return {FunctionKind::imported, *imp.type_idx(), std::nullopt, pos};
        ++seen;
    }
    const auto internal = static_cast<uint64_t>(func_idx) - seen;
    if (func_idx < seen || internal >= func_sec.size())
        throw IndexError{"function index " + std::to_string(func_idx) +
                         " is out of range of the function index space (size " +
                         std::to_string(total_function_count()) + ")"};
    const auto pos = static_cast<uint32_t>(internal);
    return {FunctionKind::internal, func_sec[pos].type_idx, pos, std::nullopt};
}

const TypeElement& Module::function_type(uint32_t func_idx) const
{
    const auto resolved = resolve_function(func_idx);
    if (resolved.type_idx >= type_sec.size())
        throw IndexError{"type index " + std::to_string(resolved.type_idx) +
                         " of function " + std::to_string(func_idx) +
                         " is out of range of the type index space"};
    return type_sec[resolved.type_idx];
}

GlobalImport Module::global_type(uint32_t global_idx) const
{
    uint32_t seen = 0;
    for (const auto& imp : import_sec)
    {
        if (const auto* g = std::get_if<GlobalImport>(&imp.desc))
        {
            if (seen == global_idx)
                return *g;
            ++seen;
        }
    }
    const auto internal = static_cast<uint64_t>(global_idx) - seen;
    if (global_idx < seen || internal >= global_sec.size())
        throw IndexError{"global index " + std::to_string(global_idx) +
                         " is out of range of the global index space"};
    const auto& g = global_sec[internal];
    return {g.type, g.mut};
}

std::optional<LimitsRef> Module::memory_limits() noexcept
{
    for (auto& imp : import_sec)
        if (auto* m = std::get_if<MemoryImport>(&imp.desc))
            return LimitsRef{m->limits.min, m->limits.max};
    if (!mem_sec.empty())
        return LimitsRef{mem_sec.front().min, mem_sec.front().max};
    return std::nullopt;
}

std::optional<LimitsRef> Module::table_limits() noexcept
{
    for (auto& imp : import_sec)
        if (auto* t = std::get_if<TableImport>(&imp.desc))
            return LimitsRef{t->limits.min, t->limits.max};
    if (!table_sec.empty())
        return LimitsRef{table_sec.front().min, table_sec.front().max};
    return std::nullopt;
}

NameSection* Module::name_section() noexcept
{
    for (auto& c : custom_secs)
        if (auto* names = std::get_if<NameSection>(&c.payload))
            return names;
    return nullptr;
}

const NameSection* Module::name_section() const noexcept
{
    for (const auto& c : custom_secs)
        if (const auto* names = std::get_if<NameSection>(&c.payload))
            return names;
    return nullptr;
}

NameSection& Module::ensure_name_section()
{
    if (auto* names = name_section())
        return *names;
    uint32_t order = 0;
    for (const auto& c : custom_secs)
        if (c.placement.after == static_cast<uint8_t>(SectionId::data))
            order = std::max(order, c.placement.order + 1);
    for (const auto& u : unknown_secs)
        if (u.placement.after == static_cast<uint8_t>(SectionId::data))
            order = std::max(order, u.placement.order + 1);
    custom_secs.push_back(
        {"name", NameSection{}, Placement{static_cast<uint8_t>(SectionId::data), order}});
    return std::get<NameSection>(custom_secs.back().payload);
}

bool operator==(const Module& a, const Module& b)
{
    return a.type_sec == b.type_sec && a.import_sec == b.import_sec &&
           a.func_sec == b.func_sec && a.table_sec == b.table_sec && a.mem_sec == b.mem_sec &&
           a.global_sec == b.global_sec && a.export_sec == b.export_sec &&
           a.start_sec == b.start_sec && a.elem_sec == b.elem_sec && a.code_sec == b.code_sec &&
           a.data_sec == b.data_sec && a.custom_secs == b.custom_secs &&
           a.unknown_secs == b.unknown_secs;
}
}  // namespace rewasm
