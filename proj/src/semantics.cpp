// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rewasm/semantics.hpp"
#include "rewasm/errors.hpp"
#include "rewasm/references.hpp"
#include "rewasm/section_rewriter.hpp"
#include <algorithm>

namespace rewasm
{
namespace
{
Selection element_selection(const Module& m, SectionKind kind, size_t position)
{
    return select_all(m, kind).at(static_cast<std::ptrdiff_t>(position));
}

void require_no_broken(const Module& m, const RewriteDelta& delta, std::string_view what)
{
    if (const auto broken = broken_references(m, delta); !broken.empty())
        throw BrokenReferenceError{std::string{what} + " is still referenced from " +
                                   describe(broken.front()) + " and " +
                                   std::to_string(broken.size() - 1) + " other site(s)"};
}

ConstExpr closed(ConstExpr expr)
{
    if (expr.instrs.empty() || expr.instrs.back().opcode != Opcode::end)
        expr.instrs.push_back(ins::end());
    return expr;
}

std::optional<size_t> internal_global_pos(const Module& m, uint32_t idx)
{
    const auto imported = m.imported_count(ExternalKind::global);
    if (idx < imported || idx - imported >= m.global_sec.size())
        return std::nullopt;
    return idx - imported;
}

std::optional<size_t> function_import_pos(const Module& m, uint32_t idx)
{
    uint32_t seen = 0;
    for (size_t pos = 0; pos < m.import_sec.size(); ++pos)
        if (m.import_sec[pos].is_function() && seen++ == idx)
            return pos;
    return std::nullopt;
}

std::optional<size_t> code_pos(const Module& m, uint32_t func_idx)
{
    const auto imported = m.imported_count(ExternalKind::function);
    if (func_idx < imported || func_idx - imported >= m.code_sec.size())
        return std::nullopt;
    return func_idx - imported;
}

bool is_function_export(const Module& m, uint32_t idx)
{
    return idx < m.export_sec.size() && m.export_sec[idx].kind == ExternalKind::function;
}

void check_function_index(const Module& m, uint32_t func_idx)
{
    if (func_idx >= m.total_function_count())
        throw IndexError{"function index " + std::to_string(func_idx) +
                         " is outside the function index space (size " +
                         std::to_string(m.total_function_count()) + ")"};
}

void check_export_name(const Module& m, const std::string& name, std::optional<size_t> except)
{
    for (size_t pos = 0; pos < m.export_sec.size(); ++pos)
        if (pos != except && m.export_sec[pos].name == name)
            throw DuplicateExportError{"export name '" + name + "' is already used"};
}

void replace_body(Module& m, size_t pos, Body body)
{
    if (!is_well_structured(body))
        throw StructureError{"edit would leave function body " + std::to_string(pos) +
                             " with unbalanced block structure"};
    update(m, element_selection(m, SectionKind::code, pos), "body", std::move(body));
}

std::pair<uint32_t, uint32_t> write_range(uint32_t offset, size_t size)
{
    if (uint64_t{offset} + size > (uint64_t{1} << 32))
        throw LimitError{"write past the 4 GiB address space"};
    return {offset, static_cast<uint32_t>(size)};
}

// Name maps.

NameMap* name_map(NameSection& names, IndexSpace space)
{
    switch (space)
    {
    case IndexSpace::function:
        return &names.functions;
    case IndexSpace::global:
        return &names.globals;
    case IndexSpace::data:
        return &names.data;
    default:
        return nullptr;
    }
}

NameMap::iterator find_name(NameMap& map, uint32_t idx)
{
    auto it = std::lower_bound(map.begin(), map.end(), idx,
        [](const NameAssoc& a, uint32_t i) { return a.idx < i; });
    return it != map.end() && it->idx == idx ? it : map.end();
}

uint32_t space_size(const Module& m, IndexSpace space)
{
    switch (space)
    {
    case IndexSpace::function:
        return m.total_function_count();
    case IndexSpace::global:
        return m.total_global_count();
    case IndexSpace::data:
        return static_cast<uint32_t>(m.data_sec.size());
    default:
        return 0;
    }
}

bool insert_name(Module& m, IndexSpace space, uint32_t idx, std::string name)
{
    if (idx >= space_size(m, space))
        throw IndexError{std::string{to_string(space)} + " index " + std::to_string(idx) +
                         " is out of range"};
    if (auto* names = m.name_section())
        if (auto& map = *name_map(*names, space); find_name(map, idx) != map.end())
            return false;
    auto& map = *name_map(m.ensure_name_section(), space);
    auto it = std::lower_bound(map.begin(), map.end(), idx,
        [](const NameAssoc& a, uint32_t i) { return a.idx < i; });
    map.insert(it, NameAssoc{idx, std::move(name)});
    m.touch();
    return true;
}

bool modify_name(Module& m, IndexSpace space, uint32_t idx, std::string name)
{
    auto* names = m.name_section();
    if (names == nullptr)
        return false;
    auto& map = *name_map(*names, space);
    auto it = find_name(map, idx);
    if (it == map.end())
        return false;
    it->name = std::move(name);
    m.touch();
    return true;
}

bool delete_name(Module& m, IndexSpace space, uint32_t idx)
{
    auto* names = m.name_section();
    if (names == nullptr)
        return false;
    auto& map = *name_map(*names, space);
    auto it = find_name(map, idx);
    if (it == map.end())
        return false;
    map.erase(it);
    m.touch();
    return true;
}
}  // namespace

uint32_t find_or_add_type(Module& m, const ValTypes& params, const ValTypes& results)
{
    const auto existing = select(m, TypePattern{any, params, results});
    if (!existing.empty())
        return existing.get<TypeElement>().idx;
    insert_at(m, m.type_sec.size(), TypeElement{unset_index, params, results});
    return m.type_sec.back().idx;
}

// Globals.

bool append_global_variable(Module& m, ValType type, Mutability mut, ConstExpr init)
{
    return insert_global_variable(m, m.total_global_count(), type, mut, std::move(init));
}

bool insert_global_variable(
    Module& m, uint32_t idx, ValType type, Mutability mut, ConstExpr init)
{
    const auto imported = m.imported_count(ExternalKind::global);
    if (idx < imported || idx > m.total_global_count())
        throw IndexError{"global index " + std::to_string(idx) + " is outside [" +
                         std::to_string(imported) + ", " +
                         std::to_string(m.total_global_count()) + "]"};
    insert_at(m, idx - imported, GlobalElement{unset_index, type, mut, closed(std::move(init))});
    fix_references(m, {IndexSpace::global, idx, 1, 0});
    return true;
}

bool modify_global_variable(
    Module& m, uint32_t idx, ValType type, Mutability mut, ConstExpr init)
{
    const auto pos = internal_global_pos(m, idx);
    if (!pos)
        return false;
    auto& g = m.global_sec[*pos];
    g.type = type;
    g.mut = mut;
    g.init = closed(std::move(init));
    m.touch();
    return true;
}

bool delete_global_variable(Module& m, uint32_t idx)
{
    const auto pos = internal_global_pos(m, idx);
    if (!pos)
        return false;
    const RewriteDelta delta{IndexSpace::global, idx, -1, 0};
    require_no_broken(m, delta, "global " + std::to_string(idx));
    remove(m, element_selection(m, SectionKind::global, *pos));
    fix_references(m, delta);
    return true;
}

// Imports and exports.

bool insert_import_function(Module& m, uint32_t idx, std::string module_name,
    std::string func_name, ValTypes params, ValTypes results)
{
    const auto imported = m.imported_count(ExternalKind::function);
    if (idx > imported)
        throw IndexError{"imported functions occupy function indices [0, " +
                         std::to_string(imported) + "]; cannot insert at " +
                         std::to_string(idx)};
    const auto type_idx = find_or_add_type(m, params, results);
    const auto pos = function_import_pos(m, idx).value_or(m.import_sec.size());
    insert_at(m, pos,
        ImportElement{
            unset_index, std::move(module_name), std::move(func_name), FunctionImport{type_idx}});
    fix_references(m, {IndexSpace::function, idx, 1, 0});
    return true;
}

bool append_import_function(
    Module& m, std::string module_name, std::string func_name, ValTypes params, ValTypes results)
{
    return insert_import_function(m, m.imported_count(ExternalKind::function),
        std::move(module_name), std::move(func_name), std::move(params), std::move(results));
}

bool modify_import_function(Module& m, uint32_t idx, std::string module_name,
    std::string func_name, ValTypes params, ValTypes results)
{
    const auto pos = function_import_pos(m, idx);
    if (!pos)
        return false;
    const auto type_idx = find_or_add_type(m, params, results);
    auto& imp = m.import_sec[*pos];
    imp.module_name = std::move(module_name);
    imp.name = std::move(func_name);
    imp.desc = FunctionImport{type_idx};
    m.touch();
    return true;
}

bool delete_import_function(Module& m, uint32_t idx)
{
    const auto pos = function_import_pos(m, idx);
    if (!pos)
        return false;
    const RewriteDelta delta{IndexSpace::function, idx, -1, 0};
    require_no_broken(m, delta, "imported function " + std::to_string(idx));
    remove(m, element_selection(m, SectionKind::import, *pos));
    fix_references(m, delta);
    return true;
}

bool insert_export_function(Module& m, uint32_t idx, std::string name, uint32_t func_idx)
{
    if (idx > m.export_sec.size())
        throw IndexError{"export position " + std::to_string(idx) + " is past the end of the " +
                         std::to_string(m.export_sec.size()) + " exports"};
    check_function_index(m, func_idx);
    check_export_name(m, name, std::nullopt);
    insert_at(m, idx, ExportElement{unset_index, std::move(name), ExternalKind::function, func_idx});
    fix_references(m, {IndexSpace::export_, idx, 1, 0});
    return true;
}

bool append_export_function(Module& m, std::string name, uint32_t func_idx)
{
    return insert_export_function(
        m, static_cast<uint32_t>(m.export_sec.size()), std::move(name), func_idx);
}

bool modify_export_function(Module& m, uint32_t idx, std::string name, uint32_t func_idx)
{
    if (!is_function_export(m, idx))
        return false;
    check_function_index(m, func_idx);
    check_export_name(m, name, idx);
    auto& e = m.export_sec[idx];
    e.name = std::move(name);
    e.target_idx = func_idx;
    m.touch();
    return true;
}

bool delete_export_function(Module& m, uint32_t idx)
{
    if (!is_function_export(m, idx))
        return false;
    remove(m, element_selection(m, SectionKind::export_, idx));
    fix_references(m, {IndexSpace::export_, idx, -1, 0});
    return true;
}

// Linear memory.

bool append_linear_memory(Module& m, uint32_t page_num)
{
    if (page_num == 0)
        return false;
    if (auto limits = m.memory_limits())
    {
        const uint64_t min = uint64_t{limits->min} + page_num;
        if (min > max_pages)
            throw LimitError{"memory would grow to " + std::to_string(min) +
                             " pages, above the 65536 page limit"};
        limits->min = static_cast<uint32_t>(min);
        if (limits->max && *limits->max < limits->min)
            limits->max = limits->min;
        m.touch();
        return true;
    }
    if (page_num > max_pages)
        throw LimitError{"memory above the 65536 page limit"};
    insert_at(m, 0, MemoryElement{page_num, std::nullopt});
    return true;
}

bool modify_linear_memory(Module& m, uint32_t offset, const Bytes& bytes)
{
    if (bytes.empty())
        return false;
    const auto [begin, size] = write_range(offset, bytes.size());
    const uint64_t end = uint64_t{begin} + size;

    for (const auto& seg : m.data_sec)
        if (!seg.offset.literal_i32())
            throw UnresolvableOffsetError{
                "data segment " + std::to_string(seg.idx) +
                " has a non-constant offset; cannot tell whether the write overlaps it"};

    // Patch every overlapping segment and remember which bytes are covered.
    std::vector<bool> covered(size, false);
    auto data = m.data_sec;
    for (auto& seg : data)
    {
        const uint64_t seg_begin = static_cast<uint32_t>(*seg.offset.literal_i32());
        const uint64_t seg_end = seg_begin + seg.init.size();
        const auto lo = std::max<uint64_t>(seg_begin, begin);
        const auto hi = std::min<uint64_t>(seg_end, end);
        for (auto a = lo; a < hi; ++a)
        {
            seg.init[a - seg_begin] = bytes[a - begin];
            covered[a - begin] = true;
        }
    }

    // Each uncovered run becomes a new segment.
    std::vector<DataElement> added;
    for (uint32_t i = 0; i < size;)
    {
        if (covered[i])
        {
            ++i;
            continue;
        }
        uint32_t j = i;
        while (j < size && !covered[j])
            ++j;
        added.push_back(DataElement{unset_index, 0,
            ConstExpr::i32(static_cast<int32_t>(begin + i)),
            Bytes(bytes.begin() + i, bytes.begin() + j)});
        i = j;
    }

    for (size_t pos = 0; pos < data.size(); ++pos)
        m.data_sec[pos].init = std::move(data[pos].init);
    m.touch();
    for (auto& seg : added)
        insert_at(m, m.data_sec.size(), std::move(seg));
    fix_section_indices(m, SectionKind::data);
    return true;
}

// Functions.

bool insert_internal_function(Module& m, uint32_t func_idx, ValTypes params, ValTypes results,
    std::vector<Local> locals, Body body)
{
    const auto imported = m.imported_count(ExternalKind::function);
    if (func_idx < imported || func_idx > m.total_function_count())
        throw IndexError{"internal functions occupy function indices [" +
                         std::to_string(imported) + ", " +
                         std::to_string(m.total_function_count()) + "]; cannot insert at " +
                         std::to_string(func_idx)};
    body = close_body(std::move(body));
    if (!is_well_structured(body))
        throw StructureError{"function body has unbalanced block structure"};
    const auto type_idx = find_or_add_type(m, params, results);
    const auto pos = func_idx - imported;
    insert_at(m, pos, FunctionElement{unset_index, type_idx});
    insert_at(m, pos, CodeElement{unset_index, std::move(locals), std::move(body)});
    fix_references(m, {IndexSpace::function, func_idx, 1, 0});
    return true;
}

bool append_internal_function(
    Module& m, ValTypes params, ValTypes results, std::vector<Local> locals, Body body)
{
    return insert_internal_function(m, m.total_function_count(), std::move(params),
        std::move(results), std::move(locals), std::move(body));
}

bool insert_indirect_function(Module& m, uint32_t func_idx, ValTypes params, ValTypes results,
    std::vector<Local> locals, Body body)
{
    insert_internal_function(
        m, func_idx, std::move(params), std::move(results), std::move(locals), std::move(body));
    if (m.elem_sec.empty())
    {
        insert_at(m, 0, ElemElement{unset_index, ConstExpr::i32(0), {func_idx}});
        return true;
    }
    auto entries = m.elem_sec.front().func_idxs;
    entries.push_back(func_idx);
    update(m, element_selection(m, SectionKind::elem, 0), "funcIdxs", std::move(entries));
    return true;
}

bool insert_hook_function(Module& m, uint32_t func_idx, uint32_t hooked_func_idx, Body body,
    ValTypes params, ValTypes results, std::vector<Local> locals)
{
    const auto& hooked_type = m.function_type(hooked_func_idx);
    if (hooked_type.params != params || hooked_type.results != results)
        throw TypeMismatchError{"hook signature differs from function " +
                                std::to_string(hooked_func_idx) + "'s signature"};
    insert_internal_function(
        m, func_idx, std::move(params), std::move(results), std::move(locals), std::move(body));

    const auto hooked = hooked_func_idx >= func_idx ? hooked_func_idx + 1 : hooked_func_idx;
    const auto hook_pos = func_idx - m.imported_count(ExternalKind::function);
    for_each_reference(m, IndexSpace::function, [&](uint32_t& index, const RefSite& site) {
        if (site.is_name || index != hooked)
            return;
        if (site.section == SectionId::code && site.element == hook_pos)
            return;
        index = func_idx;
    });
    m.touch();
    return true;
}

bool delete_func_instr(Module& m, uint32_t func_idx, uint32_t offset)
{
    const auto pos = code_pos(m, func_idx);
    if (!pos)
        return false;
    auto body = m.code_sec[*pos].body;
    if (offset >= body.size())
        throw IndexError{"instruction offset " + std::to_string(offset) + " is past the body of " +
                         std::to_string(body.size()) + " instructions"};
    if (offset + 1 == body.size())
        throw StructureError{"cannot delete the terminating end"};
    body.erase(body.begin() + offset);
    replace_body(m, *pos, std::move(body));
    return true;
}

bool append_func_instrs(Module& m, uint32_t func_idx, Body instrs)
{
    const auto pos = code_pos(m, func_idx);
    if (!pos)
        return false;
    auto body = m.code_sec[*pos].body;
    const auto at = body.empty() ? body.end() : body.end() - 1;
    body.insert(at, instrs.begin(), instrs.end());
    replace_body(m, *pos, std::move(body));
    return true;
}

bool insert_func_instrs(Module& m, uint32_t func_idx, uint32_t offset, Body instrs)
{
    const auto pos = code_pos(m, func_idx);
    if (!pos)
        return false;
    auto body = m.code_sec[*pos].body;
    if (offset >= body.size())
        throw IndexError{"instruction offset " + std::to_string(offset) + " is past the body of " +
                         std::to_string(body.size()) + " instructions"};
    body.insert(body.begin() + offset, instrs.begin(), instrs.end());
    replace_body(m, *pos, std::move(body));
    return true;
}

bool modify_func_instr(Module& m, uint32_t func_idx, uint32_t offset, Body instrs)
{
    const auto pos = code_pos(m, func_idx);
    if (!pos)
        return false;
    auto body = m.code_sec[*pos].body;
    if (offset >= body.size())
        throw IndexError{"instruction offset " + std::to_string(offset) + " is past the body of " +
                         std::to_string(body.size()) + " instructions"};
    if (offset + 1 == body.size())
        throw StructureError{"cannot replace the terminating end"};
    body.erase(body.begin() + offset);
    body.insert(body.begin() + offset, instrs.begin(), instrs.end());
    replace_body(m, *pos, std::move(body));
    return true;
}

bool modify_func_instr(Module& m, const Instruction& target, Body instrs)
{
    if (target.opcode == Opcode::end)
        throw StructureError{"cannot replace end markers"};
    std::vector<std::pair<size_t, Body>> edits;
    for (size_t pos = 0; pos < m.code_sec.size(); ++pos)
    {
        const auto& body = m.code_sec[pos].body;
        if (std::find(body.begin(), body.end(), target) == body.end())
            continue;
        Body out;
        out.reserve(body.size() + instrs.size());
        for (const auto& instr : body)
        {
            if (instr == target)
                out.insert(out.end(), instrs.begin(), instrs.end());
            else
                out.push_back(instr);
        }
        if (!is_well_structured(out))
            throw StructureError{"replacement leaves function body " + std::to_string(pos) +
                                 " with unbalanced block structure"};
        edits.emplace_back(pos, std::move(out));
    }
    if (edits.empty())
        return false;
    for (auto& [pos, body] : edits)
        m.code_sec[pos].body = std::move(body);
    m.touch();
    return true;
}

uint32_t append_func_local(Module& m, uint32_t func_idx, ValType type)
{
    const auto pos = code_pos(m, func_idx);
    if (!pos)
        throw IndexError{"function " + std::to_string(func_idx) + " is not an internal function"};
    const auto& code = m.code_sec[*pos];
    const uint64_t index = m.function_type(func_idx).params.size() + code.local_count();
    if (index >= 0xFFFFFFFFu)
        throw LimitError{"too many locals"};
    auto locals = code.locals;
    locals.push_back(Local{1, type});
    update(m, element_selection(m, SectionKind::code, *pos), "locals", std::move(locals));
    return static_cast<uint32_t>(index);
}

// Names.

bool modify_func_name(Module& m, uint32_t func_idx, std::string name)
{
    return modify_name(m, IndexSpace::function, func_idx, std::move(name));
}

bool delete_func_name(Module& m, uint32_t func_idx)
{
    return delete_name(m, IndexSpace::function, func_idx);
}

bool insert_func_name(Module& m, uint32_t func_idx, std::string name)
{
    return insert_name(m, IndexSpace::function, func_idx, std::move(name));
}

bool modify_global_name(Module& m, uint32_t global_idx, std::string name)
{
    return modify_name(m, IndexSpace::global, global_idx, std::move(name));
}

bool delete_global_name(Module& m, uint32_t global_idx)
{
    return delete_name(m, IndexSpace::global, global_idx);
}

bool insert_global_name(Module& m, uint32_t global_idx, std::string name)
{
    return insert_name(m, IndexSpace::global, global_idx, std::move(name));
}

bool insert_data_name(Module& m, uint32_t data_idx, std::string name)
{
    return insert_name(m, IndexSpace::data, data_idx, std::move(name));
}

bool modify_data_name(Module& m, uint32_t data_idx, std::string name)
{
    return modify_name(m, IndexSpace::data, data_idx, std::move(name));
}

bool delete_data_name(Module& m, uint32_t data_idx)
{
    return delete_name(m, IndexSpace::data, data_idx);
}
}  // namespace rewasm
