// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rewasm/references.hpp"
#include "rewasm/errors.hpp"
#include <algorithm>

namespace rewasm
{
namespace
{
thread_local DeltaRecorder* active_recorder = nullptr;

const char* section_name(SectionId id)
{
    switch (id)
    {
    case SectionId::custom:
        return "custom";
    case SectionId::type:
        return "type";
    case SectionId::import:
        return "import";
    case SectionId::function:
        return "function";
    case SectionId::table:
        return "table";
    case SectionId::memory:
        return "memory";
    case SectionId::global:
        return "global";
    case SectionId::export_:
        return "export";
    case SectionId::start:
        return "start";
    case SectionId::element:
        return "elem";
    case SectionId::code:
        return "code";
    case SectionId::data:
        return "data";
    }
    return "?";
}

ExternalKind external_kind_of(IndexSpace space)
{
    switch (space)
    {
    case IndexSpace::table:
        return ExternalKind::table;
    case IndexSpace::memory:
        return ExternalKind::memory;
    case IndexSpace::global:
        return ExternalKind::global;
    default:
        return ExternalKind::function;
    }
}

bool has_exports(IndexSpace space)
{
    return space == IndexSpace::function || space == IndexSpace::table ||
           space == IndexSpace::memory || space == IndexSpace::global;
}

void visit_instructions(std::vector<Instruction>& instrs, IndexSpace space, SectionId section,
    uint32_t element, const RefVisitor& visit)
{
    for (size_t i = 0; i < instrs.size(); ++i)
    {
        auto& instr = instrs[i];
        for (auto& imm : instr.immediates)
        {
            RefSite site{section, element, "", static_cast<uint32_t>(i), false};
            site.what = mnemonic(instr.opcode).data();
            switch (space)
            {
            case IndexSpace::function:
                if (auto* f = std::get_if<FuncIdx>(&imm))
                    visit(f->value, site);
                break;
            case IndexSpace::type:
                if (auto* t = std::get_if<TypeIdx>(&imm))
                    visit(t->value, site);
                else if (auto* b = std::get_if<BlockType>(&imm);
                         b != nullptr && b->kind == BlockType::Kind::type_index)
                    visit(b->type_index, site);
                break;
            case IndexSpace::global:
                if (auto* g = std::get_if<GlobalIdx>(&imm))
                    visit(g->value, site);
                break;
            case IndexSpace::local:
                if (auto* l = std::get_if<LocalIdx>(&imm))
                    visit(l->value, site);
                break;
            case IndexSpace::table:
                if (auto* t = std::get_if<TableIdx>(&imm))
                    visit(t->value, site);
                break;
            case IndexSpace::memory:
                if (auto* m = std::get_if<MemIdx>(&imm))
                    visit(m->value, site);
                break;
            default:
                break;
            }
        }
    }
}

void visit_name_map(NameMap& map, const char* what, uint32_t custom_pos, const RefVisitor& visit)
{
    for (auto& entry : map)
        visit(entry.idx, RefSite{SectionId::custom, custom_pos, what, std::nullopt, true});
}

void visit_names(Module& m, IndexSpace space, uint32_t function, const RefVisitor& visit)
{
    for (uint32_t pos = 0; pos < m.custom_secs.size(); ++pos)
    {
        auto* names = std::get_if<NameSection>(&m.custom_secs[pos].payload);
        if (names == nullptr)
            continue;
        switch (space)
        {
        case IndexSpace::function:
            visit_name_map(names->functions, "function name", pos, visit);
            for (auto& entry : names->locals)
                visit(entry.idx,
                    RefSite{SectionId::custom, pos, "local names owner", std::nullopt, true});
            break;
        case IndexSpace::global:
            visit_name_map(names->globals, "global name", pos, visit);
            break;
        case IndexSpace::data:
            visit_name_map(names->data, "data name", pos, visit);
            break;
        case IndexSpace::local:
            for (auto& entry : names->locals)
                if (entry.idx == function)
                    visit_name_map(entry.names, "local name", pos, visit);
            break;
        default:
            break;
        }
    }
}

void drop_unset(NameMap& map)
{
    std::erase_if(map, [](const NameAssoc& a) { return a.idx == unset_index; });
}
}  // namespace

std::string describe(const RefSite& site)
{
    std::string out = std::string{section_name(site.section)} + " section element " +
                      std::to_string(site.element);
    if (site.instr)
        out += ", instruction " + std::to_string(*site.instr);
    out += " (";
    out += site.what;
    out += ")";
    return out;
}

void for_each_reference(
    Module& m, IndexSpace space, const RefVisitor& visit, uint32_t function)
{
    if (space == IndexSpace::local)
    {
        const auto imports = m.imported_count(ExternalKind::function);
        if (function >= imports && function - imports < m.code_sec.size())
        {
            const auto pos = function - imports;
            visit_instructions(m.code_sec[pos].body, space, SectionId::code, pos, visit);
        }
        visit_names(m, space, function, visit);
        return;
    }

    if (space == IndexSpace::type)
    {
        for (uint32_t pos = 0; pos < m.import_sec.size(); ++pos)
            if (auto* f = std::get_if<FunctionImport>(&m.import_sec[pos].desc))
                visit(f->type_idx, RefSite{SectionId::import, pos, "import type", std::nullopt, false});
        for (uint32_t pos = 0; pos < m.func_sec.size(); ++pos)
            visit(m.func_sec[pos].type_idx, RefSite{SectionId::function, pos, "function type", std::nullopt, false});
    }

    if (space == IndexSpace::global)
    {
        for (uint32_t pos = 0; pos < m.global_sec.size(); ++pos)
            visit_instructions(
                m.global_sec[pos].init.instrs, space, SectionId::global, pos, visit);
    }

    if (has_exports(space))
    {
        const auto kind = external_kind_of(space);
        for (uint32_t pos = 0; pos < m.export_sec.size(); ++pos)
            if (m.export_sec[pos].kind == kind)
                visit(m.export_sec[pos].target_idx,
                    RefSite{SectionId::export_, pos, "export target", std::nullopt, false});
    }

    if (space == IndexSpace::function && m.start_sec)
        visit(m.start_sec->func_idx, RefSite{SectionId::start, 0, "start function", std::nullopt, false});

    for (uint32_t pos = 0; pos < m.elem_sec.size(); ++pos)
    {
        auto& elem = m.elem_sec[pos];
        visit_instructions(elem.offset.instrs, space, SectionId::element, pos, visit);
        if (space == IndexSpace::function)
            for (uint32_t i = 0; i < elem.func_idxs.size(); ++i)
                visit(elem.func_idxs[i], RefSite{SectionId::element, pos, "elem entry", i});
    }

    for (uint32_t pos = 0; pos < m.code_sec.size(); ++pos)
        visit_instructions(m.code_sec[pos].body, space, SectionId::code, pos, visit);

    for (uint32_t pos = 0; pos < m.data_sec.size(); ++pos)
    {
        auto& data = m.data_sec[pos];
        visit_instructions(data.offset.instrs, space, SectionId::data, pos, visit);
        if (space == IndexSpace::memory)
            visit(data.mem_idx, RefSite{SectionId::data, pos, "data memory", std::nullopt, false});
    }

    visit_names(m, space, 0, visit);
}

std::vector<RefSite> broken_references(const Module& module, const RewriteDelta& delta)
{
    std::vector<RefSite> broken;
    if (delta.offset >= 0)
        return broken;
    // Visiting needs mutable access; nothing is written.
    for_each_reference(
        const_cast<Module&>(module), delta.space,
        [&](uint32_t& index, const RefSite& site) {
            if (!site.is_name && !delta.apply(index))
                broken.push_back(site);
        },
        delta.function);
    return broken;
}

uint32_t fix_references(Module& module, const RewriteDelta& delta)
{
    if (delta.is_identity())
        return 0;
    if (const auto broken = broken_references(module, delta); !broken.empty())
        throw BrokenReferenceError{"removing " + to_string(delta) + " would break " +
                                   std::to_string(broken.size()) + " reference(s), first at " +
                                   describe(broken.front())};

    uint32_t patched = 0;
    bool dropped = false;
    for_each_reference(
        module, delta.space,
        [&](uint32_t& index, const RefSite& site) {
            const auto moved = delta.apply(index);
            if (!moved)
            {
                // Only name entries reach this point.
                index = unset_index;
                dropped = true;
                ++patched;
                return;
            }
            if (*moved != index)
            {
                index = *moved;
                ++patched;
            }
            (void)site;
        },
        delta.function);

    if (dropped)
    {
        for (auto& custom : module.custom_secs)
        {
            auto* names = std::get_if<NameSection>(&custom.payload);
            if (names == nullptr)
                continue;
            drop_unset(names->functions);
            drop_unset(names->globals);
            drop_unset(names->data);
            std::erase_if(names->locals,
                [](const IndirectNameAssoc& a) { return a.idx == unset_index; });
            for (auto& entry : names->locals)
                drop_unset(entry.names);
        }
    }

    module.touch();
    if (active_recorder != nullptr)
        active_recorder->m_deltas.push_back(delta);
    return patched;
}

DeltaRecorder::DeltaRecorder() : m_previous{active_recorder}
{
    active_recorder = this;
}

DeltaRecorder::~DeltaRecorder()
{
    active_recorder = m_previous;
}
}  // namespace rewasm
