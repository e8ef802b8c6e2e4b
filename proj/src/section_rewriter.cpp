// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rewasm/section_rewriter.hpp"
#include "rewasm/binary.hpp"
#include "rewasm/leb128.hpp"
#include <algorithm>
#include <array>

namespace rewasm
{
namespace
{
constexpr std::array<std::string_view, 12> kind_names = {"type", "import", "function", "table",
    "memory", "global", "export", "start", "elem", "code", "data", "custom"};

template <typename T>
bool field_matches(const Pattern<T>& pattern, const T& value)
{
    return !pattern || *pattern == value;
}

bool matches_element(const TypePattern& p, const TypeElement& e)
{
    return field_matches(p.idx, e.idx) && field_matches(p.params, e.params) &&
           field_matches(p.results, e.results);
}

bool matches_element(const ImportPattern& p, const ImportElement& e)
{
    if (p.type_idx && e.type_idx() != p.type_idx)
        return false;
    return field_matches(p.idx, e.idx) && field_matches(p.module_name, e.module_name) &&
           field_matches(p.name, e.name) && field_matches(p.kind, e.kind());
}

bool matches_element(const FunctionPattern& p, const FunctionElement& e)
{
    return field_matches(p.func_idx, e.func_idx) && field_matches(p.type_idx, e.type_idx);
}

bool matches_element(const TablePattern& p, const TableElement& e)
{
    return field_matches(p.min, e.min) && field_matches(p.max, e.max);
}

bool matches_element(const MemoryPattern& p, const MemoryElement& e)
{
    return field_matches(p.min, e.min) && field_matches(p.max, e.max);
}

bool matches_element(const GlobalPattern& p, const GlobalElement& e)
{
    return field_matches(p.idx, e.idx) && field_matches(p.type, e.type) &&
           field_matches(p.mut, e.mut) && field_matches(p.init, e.init);
}

bool matches_element(const ExportPattern& p, const ExportElement& e)
{
    return field_matches(p.idx, e.idx) && field_matches(p.name, e.name) &&
           field_matches(p.kind, e.kind) && field_matches(p.target_idx, e.target_idx);
}

bool matches_element(const StartPattern& p, const StartElement& e)
{
    return field_matches(p.func_idx, e.func_idx);
}

bool matches_element(const ElemPattern& p, const ElemElement& e)
{
    return field_matches(p.idx, e.idx) && field_matches(p.offset, e.offset) &&
           field_matches(p.func_idxs, e.func_idxs);
}

bool matches_element(const CodePattern& p, const CodeElement& e)
{
    return field_matches(p.func_idx, e.func_idx) && field_matches(p.locals, e.locals) &&
           field_matches(p.body, e.body);
}

bool matches_element(const DataPattern& p, const DataElement& e)
{
    return field_matches(p.idx, e.idx) && field_matches(p.mem_idx, e.mem_idx) &&
           field_matches(p.offset, e.offset) && field_matches(p.init, e.init);
}

bool matches_element(const CustomPattern& p, const CustomElement& e)
{
    return field_matches(p.name, e.name);
}

/// Calls f with the element vector of a section. The start section is
/// handled by callers because it is optional rather than a vector.
template <typename F>
decltype(auto) visit_section(Module& m, SectionKind kind, F&& f)
{
    switch (kind)
    {
    case SectionKind::type:
        return f(m.type_sec);
    case SectionKind::import:
        return f(m.import_sec);
    case SectionKind::function:
        return f(m.func_sec);
    case SectionKind::table:
        return f(m.table_sec);
    case SectionKind::memory:
        return f(m.mem_sec);
    case SectionKind::global:
        return f(m.global_sec);
    case SectionKind::export_:
        return f(m.export_sec);
    case SectionKind::elem:
        return f(m.elem_sec);
    case SectionKind::code:
        return f(m.code_sec);
    case SectionKind::data:
        return f(m.data_sec);
    case SectionKind::custom:
        return f(m.custom_secs);
    case SectionKind::start:
        break;
    }
    throw Error{"start section has no element vector"};
}

void check_selection(const Module& module, const Selection& selection)
{
    if (!selection.belongs_to(module) || selection.is_stale())
        throw StaleSelectionError{"selection over the " + std::string{to_string(selection.kind())} +
                                  " section is stale: the module was edited after select()"};
}

/// Assigns base, base+1, ... to the referenced idx fields and derives the
/// index-space shifts implied by unset (inserted) entries and gaps (removed
/// entries).
std::vector<RewriteDelta> renumber(
    const std::vector<uint32_t*>& fields, uint32_t base, IndexSpace space)
{
    std::vector<RewriteDelta> deltas;
    uint64_t old_next = base;
    uint32_t pos = 0;
    for (size_t i = 0; i < fields.size();)
    {
        if (*fields[i] == unset_index)
        {
            uint32_t run = 0;
            while (i + run < fields.size() && *fields[i + run] == unset_index)
            {
                *fields[i + run] = base + pos + run;
                ++run;
            }
            deltas.push_back({space, base + pos, run, 0});
            pos += run;
            i += run;
            continue;
        }
        const uint64_t old = *fields[i];
        if (old > old_next)
        {
            deltas.push_back({space, base + pos, -static_cast<int64_t>(old - old_next), 0});
            old_next = old;
        }
        *fields[i] = base + pos;
        old_next = std::max(old_next, old + 1);
        ++pos;
        ++i;
    }
    return deltas;
}

template <typename E>
std::vector<uint32_t*> idx_fields(std::vector<E>& elems, uint32_t E::*field)
{
    std::vector<uint32_t*> out;
    out.reserve(elems.size());
    for (auto& e : elems)
        out.push_back(&(e.*field));
    return out;
}

void shift_owned(std::vector<uint32_t*> fields, const std::vector<RewriteDelta>& deltas)
{
    for (const auto& d : deltas)
        for (auto* f : fields)
            if (*f != unset_index)
                if (const auto moved = d.apply(*f))
                    *f = *moved;
}

IndexSpace space_of(ExternalKind kind)
{
    switch (kind)
    {
    case ExternalKind::function:
        return IndexSpace::function;
    case ExternalKind::table:
        return IndexSpace::table;
    case ExternalKind::memory:
        return IndexSpace::memory;
    case ExternalKind::global:
        return IndexSpace::global;
    }
    return IndexSpace::function;
}

std::vector<RewriteDelta> fix_imports(Module& m)
{
    std::vector<RewriteDelta> all;
    for (const auto kind :
        {ExternalKind::function, ExternalKind::table, ExternalKind::memory, ExternalKind::global})
    {
        std::vector<uint32_t*> fields;
        for (auto& imp : m.import_sec)
            if (imp.kind() == kind)
                fields.push_back(&imp.idx);
        auto deltas = renumber(fields, 0, space_of(kind));
        std::vector<std::vector<uint32_t*>> owned;
        if (kind == ExternalKind::function)
            owned = {idx_fields(m.func_sec, &FunctionElement::func_idx),
                idx_fields(m.code_sec, &CodeElement::func_idx)};
        else if (kind == ExternalKind::global)
            owned = {idx_fields(m.global_sec, &GlobalElement::idx)};
        for (auto& o : owned)
            shift_owned(o, deltas);

        // Imports removed from the end of their run leave no gap among the
        // imports themselves; the first internal entity still shows it.
        const auto count = static_cast<uint32_t>(fields.size());
        for (const auto& o : owned)
        {
            const auto first = std::find_if(
                o.begin(), o.end(), [](const uint32_t* f) { return *f != unset_index; });
            if (first == o.end())
                continue;
            const uint64_t expected = uint64_t{count} + static_cast<uint64_t>(first - o.begin());
            if (**first > expected)
            {
                const RewriteDelta gap{space_of(kind), count, -static_cast<int64_t>(**first - expected), 0};
                for (auto& other : owned)
                    shift_owned(other, {gap});
                deltas.push_back(gap);
            }
            break;
        }
        all.insert(all.end(), deltas.begin(), deltas.end());
    }
    return all;
}

void sort_names(NameMap& map)
{
    std::stable_sort(map.begin(), map.end(),
        [](const NameAssoc& a, const NameAssoc& b) { return a.idx < b.idx; });
    map.erase(std::unique(map.begin(), map.end(),
                  [](const NameAssoc& a, const NameAssoc& b) { return a.idx == b.idx; }),
        map.end());
}

void fix_names(Module& m)
{
    auto* names = m.name_section();
    if (names == nullptr)
        return;
    sort_names(names->functions);
    sort_names(names->globals);
    sort_names(names->data);
    auto& locals = names->locals;
    std::stable_sort(locals.begin(), locals.end(),
        [](const IndirectNameAssoc& a, const IndirectNameAssoc& b) { return a.idx < b.idx; });
    locals.erase(std::unique(locals.begin(), locals.end(),
                     [](const auto& a, const auto& b) { return a.idx == b.idx; }),
        locals.end());
    for (auto& entry : locals)
        sort_names(entry.names);
}

/// Keeps a preserved data count section (id 12) in step with the data section.
void sync_data_count(Module& m)
{
    for (auto& unknown : m.unknown_secs)
        if (unknown.id == 12)
            unknown.payload = encode_uleb128(static_cast<uint64_t>(m.data_sec.size()));
}

uint64_t pages_for(uint64_t bytes)
{
    return (bytes + page_size - 1) / page_size;
}

void grow(LimitsRef limits, uint64_t needed, std::string_view what)
{
    if (needed > max_pages && what == "memory")
        throw LimitError{"data segments need " + std::to_string(needed) +
                         " pages, above the 65536 page limit"};
    if (needed > 0xFFFFFFFFu)
        throw LimitError{"table size limit exceeded"};
    if (limits.min < needed)
        limits.min = static_cast<uint32_t>(needed);
    if (limits.max && *limits.max < limits.min)
        limits.max = limits.min;
}
}  // namespace

std::string_view to_string(SectionKind kind)
{
    return kind_names[static_cast<size_t>(kind)];
}

std::optional<SectionKind> section_kind_from_string(std::string_view name) noexcept
{
    for (size_t i = 0; i < kind_names.size(); ++i)
        if (kind_names[i] == name)
            return static_cast<SectionKind>(i);
    if (name == "mem")
        return SectionKind::memory;
    if (name == "element")
        return SectionKind::elem;
    return std::nullopt;
}

SectionId section_id(SectionKind kind) noexcept
{
    switch (kind)
    {
    case SectionKind::type:
        return SectionId::type;
    case SectionKind::import:
        return SectionId::import;
    case SectionKind::function:
        return SectionId::function;
    case SectionKind::table:
        return SectionId::table;
    case SectionKind::memory:
        return SectionId::memory;
    case SectionKind::global:
        return SectionId::global;
    case SectionKind::export_:
        return SectionId::export_;
    case SectionKind::start:
        return SectionId::start;
    case SectionKind::elem:
        return SectionId::element;
    case SectionKind::code:
        return SectionId::code;
    case SectionKind::data:
        return SectionId::data;
    case SectionKind::custom:
        return SectionId::custom;
    }
    return SectionId::custom;
}

bool matches(const ElementTemplate& pattern, const Element& element)
{
    if (pattern.index() != element.index())
        return false;
    return std::visit(
        [](const auto& p, const auto& e) {
            if constexpr (requires { matches_element(p, e); })
                return matches_element(p, e);
            else
                return false;
        },
        pattern, element);
}

bool Selection::is_stale() const noexcept
{
    return m_module == nullptr || m_module->generation() != m_generation;
}

Selection Selection::at(std::ptrdiff_t i) const
{
    Selection out = *this;
    out.m_positions.clear();
    const auto n = static_cast<std::ptrdiff_t>(m_positions.size());
    const auto k = i < 0 ? n + i : i;
    if (k >= 0 && k < n)
        out.m_positions.push_back(m_positions[static_cast<size_t>(k)]);
    return out;
}

Element Selection::element(size_t i) const
{
    if (m_module == nullptr || is_stale())
        throw StaleSelectionError{"selection is stale"};
    if (i >= m_positions.size())
        throw IndexError{"selection has " + std::to_string(m_positions.size()) + " elements"};
    return element_at(*m_module, m_kind, m_positions[i]);
}

size_t section_size(const Module& module, SectionKind kind) noexcept
{
    if (kind == SectionKind::start)
        return module.start_sec ? 1 : 0;
    return visit_section(const_cast<Module&>(module), kind, [](auto& vec) { return vec.size(); });
}

Element element_at(const Module& module, SectionKind kind, size_t position)
{
    if (position >= section_size(module, kind))
        throw IndexError{"position " + std::to_string(position) + " is outside the " +
                         std::string{to_string(kind)} + " section"};
    if (kind == SectionKind::start)
        return *module.start_sec;
    return visit_section(const_cast<Module&>(module), kind,
        [position](auto& vec) -> Element { return vec[position]; });
}

Selection select(const Module& module, const ElementTemplate& pattern)
{
    Selection out;
    out.m_module = &module;
    out.m_generation = module.generation();
    out.m_kind = kind_of(pattern);
    const auto n = section_size(module, out.m_kind);
    for (size_t pos = 0; pos < n; ++pos)
        if (matches(pattern, element_at(module, out.m_kind, pos)))
            out.m_positions.push_back(pos);
    return out;
}

Selection select_all(const Module& module, SectionKind kind)
{
    Selection out;
    out.m_module = &module;
    out.m_generation = module.generation();
    out.m_kind = kind;
    const auto n = section_size(module, kind);
    for (size_t pos = 0; pos < n; ++pos)
        out.m_positions.push_back(pos);
    return out;
}

bool insert_at(Module& module, size_t position, Element element)
{
    const auto kind = kind_of(element);
    const auto size = section_size(module, kind);
    if (position > size)
        throw IndexError{"cannot insert at position " + std::to_string(position) + " of the " +
                         std::string{to_string(kind)} + " section (size " +
                         std::to_string(size) + ")"};

    switch (kind)
    {
    case SectionKind::start:
        if (module.start_sec)
            throw StructureError{"a module has at most one start function"};
        module.start_sec = std::get<StartElement>(element);
        break;
    case SectionKind::table:
        if (module.total_table_count() != 0)
            throw StructureError{"a module has at most one table"};
        break;
    case SectionKind::memory:
        if (module.total_memory_count() != 0)
            throw StructureError{"a module has at most one memory"};
        break;
    case SectionKind::import:
    {
        const auto& imp = std::get<ImportElement>(element);
        if ((imp.kind() == ExternalKind::table && module.total_table_count() != 0) ||
            (imp.kind() == ExternalKind::memory && module.total_memory_count() != 0))
            throw StructureError{"a module has at most one table and one memory"};
        break;
    }
    default:
        break;
    }

    if (kind != SectionKind::start)
    {
        std::visit(
            [](auto& e) {
                using E = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<E, FunctionElement> || std::is_same_v<E, CodeElement>)
                    e.func_idx = unset_index;
                else if constexpr (requires { e.idx; })
                    e.idx = unset_index;
            },
            element);
        visit_section(module, kind, [&](auto& vec) {
            using E = typename std::decay_t<decltype(vec)>::value_type;
            vec.insert(vec.begin() + static_cast<std::ptrdiff_t>(position),
                std::move(std::get<E>(element)));
        });
    }
    module.touch();
    fix_section_indices(module, kind);
    return true;
}

bool insert(Module& module, const Selection& selection, Element element)
{
    check_selection(module, selection);
    if (kind_of(element) != selection.kind())
        throw TypeMismatchError{"cannot insert a " + std::string{to_string(kind_of(element))} +
                                " element into a selection of " +
                                std::string{to_string(selection.kind())} + " elements"};
    if (selection.empty())
        return false;
    return insert_at(module, selection.positions().back() + 1, std::move(element));
}

bool remove(Module& module, const Selection& selection)
{
    check_selection(module, selection);
    if (selection.empty())
        return false;
    const auto kind = selection.kind();
    if (kind == SectionKind::start)
        module.start_sec.reset();
    else
    {
        visit_section(module, kind, [&](auto& vec) {
            auto positions = selection.positions();
            std::sort(positions.rbegin(), positions.rend());
            for (const auto pos : positions)
                vec.erase(vec.begin() + static_cast<std::ptrdiff_t>(pos));
        });
    }
    module.touch();
    fix_section_indices(module, kind);
    return true;
}

namespace
{
template <typename T>
const T& expect(const FieldValue& value, std::string_view field)
{
    if (const auto* v = std::get_if<T>(&value))
        return *v;
    throw TypeMismatchError{"wrong value type for field '" + std::string{field} + "'"};
}

std::optional<uint32_t> expect_optional_u32(const FieldValue& value, std::string_view field)
{
    if (std::holds_alternative<std::monostate>(value))
        return std::nullopt;
    return expect<uint32_t>(value, field);
}

template <size_t I = 0>
Element element_for_kind(SectionKind kind)
{
    if constexpr (I + 1 < std::variant_size_v<Element>)
        if (static_cast<size_t>(kind) != I)
            return element_for_kind<I + 1>(kind);
    return Element{std::in_place_index<I>};
}

[[noreturn]] void unknown_field(SectionKind kind, std::string_view field)
{
    throw FieldError{"element kind '" + std::string{to_string(kind)} + "' has no field '" +
                     std::string{field} + "'"};
}

[[noreturn]] void immutable_field(std::string_view field)
{
    throw ImmutableFieldError{"field '" + std::string{field} +
                              "' is an index maintained by the fixer and cannot be updated"};
}

bool is_one_of(std::string_view field, std::initializer_list<std::string_view> names)
{
    return std::find(names.begin(), names.end(), field) != names.end();
}

void update_element(TypeElement& e, std::string_view f, const FieldValue& v)
{
    if (f == "idx" || f == "typeIdx")
        immutable_field(f);
    else if (is_one_of(f, {"paramsType", "params", "paramType"}))
        e.params = expect<std::vector<ValType>>(v, f);
    else if (is_one_of(f, {"resultsType", "results", "resultType"}))
        e.results = expect<std::vector<ValType>>(v, f);
    else
        unknown_field(SectionKind::type, f);
}

void update_element(ImportElement& e, std::string_view f, const FieldValue& v)
{
    if (f == "idx" || f == "funcIdx")
        immutable_field(f);
    else if (f == "moduleName")
        e.module_name = expect<std::string>(v, f);
    else if (f == "name")
        e.name = expect<std::string>(v, f);
    else if (f == "typeIdx")
    {
        auto* func = std::get_if<FunctionImport>(&e.desc);
        if (func == nullptr)
            throw FieldError{"typeIdx exists on function imports only"};
        func->type_idx = expect<uint32_t>(v, f);
    }
    else
        unknown_field(SectionKind::import, f);
}

void update_element(FunctionElement& e, std::string_view f, const FieldValue& v)
{
    if (f == "funcIdx" || f == "idx")
        immutable_field(f);
    else if (f == "typeIdx")
        e.type_idx = expect<uint32_t>(v, f);
    else
        unknown_field(SectionKind::function, f);
}

template <typename E>
void update_limits(E& e, SectionKind kind, std::string_view f, const FieldValue& v)
{
    if (f == "min")
        e.min = expect<uint32_t>(v, f);
    else if (f == "max")
        e.max = expect_optional_u32(v, f);
    else
        unknown_field(kind, f);
}

void update_element(TableElement& e, std::string_view f, const FieldValue& v)
{
    update_limits(e, SectionKind::table, f, v);
}

void update_element(MemoryElement& e, std::string_view f, const FieldValue& v)
{
    update_limits(e, SectionKind::memory, f, v);
}

void update_element(GlobalElement& e, std::string_view f, const FieldValue& v)
{
    if (f == "idx")
        immutable_field(f);
    else if (f == "valType")
        e.type = expect<ValType>(v, f);
    else if (f == "mut")
        e.mut = expect<Mutability>(v, f);
    else if (f == "initExpr")
        e.init = expect<ConstExpr>(v, f);
    else
        unknown_field(SectionKind::global, f);
}

void update_element(ExportElement& e, std::string_view f, const FieldValue& v)
{
    if (f == "idx")
        immutable_field(f);
    else if (f == "name")
        e.name = expect<std::string>(v, f);
    else if (f == "kind")
        e.kind = expect<ExternalKind>(v, f);
    else if (f == "targetIdx" || f == "funcIdx")
        e.target_idx = expect<uint32_t>(v, f);
    else
        unknown_field(SectionKind::export_, f);
}

void update_element(StartElement& e, std::string_view f, const FieldValue& v)
{
    if (f == "funcIdx")
        e.func_idx = expect<uint32_t>(v, f);
    else
        unknown_field(SectionKind::start, f);
}

void update_element(ElemElement& e, std::string_view f, const FieldValue& v)
{
    if (f == "idx")
        immutable_field(f);
    else if (f == "offsetExpr" || f == "offset")
        e.offset = expect<ConstExpr>(v, f);
    else if (f == "funcIdxs")
        e.func_idxs = expect<std::vector<uint32_t>>(v, f);
    else
        unknown_field(SectionKind::elem, f);
}

void update_element(CodeElement& e, std::string_view f, const FieldValue& v)
{
    if (f == "funcIdx" || f == "idx")
        immutable_field(f);
    else if (f == "locals")
        e.locals = expect<std::vector<Local>>(v, f);
    else if (f == "body" || f == "instructions")
        e.body = expect<std::vector<Instruction>>(v, f);
    else
        unknown_field(SectionKind::code, f);
}

void update_element(DataElement& e, std::string_view f, const FieldValue& v)
{
    if (f == "idx")
        immutable_field(f);
    else if (f == "memIdx")
        e.mem_idx = expect<uint32_t>(v, f);
    else if (f == "offsetExpr" || f == "offset")
        e.offset = expect<ConstExpr>(v, f);
    else if (f == "initData")
        e.init = expect<Bytes>(v, f);
    else
        unknown_field(SectionKind::data, f);
}

void update_element(CustomElement& e, std::string_view f, const FieldValue& v)
{
    if (f == "name")
        e.name = expect<std::string>(v, f);
    else if (f == "payload")
        e.payload = expect<Bytes>(v, f);
    else
        unknown_field(SectionKind::custom, f);
}
}  // namespace

std::vector<std::string_view> field_names(SectionKind kind)
{
    switch (kind)
    {
    case SectionKind::type:
        return {"idx", "paramsType", "resultsType"};
    case SectionKind::import:
        return {"funcIdx", "moduleName", "name", "typeIdx"};
    case SectionKind::function:
        return {"funcIdx", "typeIdx"};
    case SectionKind::table:
    case SectionKind::memory:
        return {"min", "max"};
    case SectionKind::global:
        return {"idx", "valType", "mut", "initExpr"};
    case SectionKind::export_:
        return {"idx", "name", "kind", "targetIdx"};
    case SectionKind::start:
        return {"funcIdx"};
    case SectionKind::elem:
        return {"idx", "offsetExpr", "funcIdxs"};
    case SectionKind::code:
        return {"funcIdx", "locals", "body"};
    case SectionKind::data:
        return {"idx", "memIdx", "offsetExpr", "initData"};
    case SectionKind::custom:
        return {"name", "payload"};
    }
    return {};
}

bool update(
    Module& module, const Selection& selection, std::string_view field, const FieldValue& value)
{
    check_selection(module, selection);
    if (selection.empty())
    {
        // Still reject names that do not exist for this kind.
        const auto names = field_names(selection.kind());
        if (std::find(names.begin(), names.end(), field) == names.end())
        {
            auto probe = element_for_kind(selection.kind());
            std::visit([&](auto& e) { update_element(e, field, value); }, probe);
        }
        return false;
    }

    // Validate against a copy first so a failure leaves the module untouched.
    std::vector<Element> updated;
    for (const auto pos : selection.positions())
    {
        auto e = element_at(module, selection.kind(), pos);
        std::visit([&](auto& typed) { update_element(typed, field, value); }, e);
        updated.push_back(std::move(e));
    }

    if (selection.kind() == SectionKind::start)
        module.start_sec = std::get<StartElement>(updated.front());
    else
    {
        visit_section(module, selection.kind(), [&](auto& vec) {
            using E = typename std::decay_t<decltype(vec)>::value_type;
            for (size_t i = 0; i < updated.size(); ++i)
                vec[selection.positions()[i]] = std::move(std::get<E>(updated[i]));
        });
    }
    module.touch();
    fix_section_indices(module, selection.kind());
    return true;
}

std::vector<RewriteDelta> fix_section_indices(Module& m, SectionKind kind)
{
    std::vector<RewriteDelta> deltas;
    switch (kind)
    {
    case SectionKind::type:
        deltas = renumber(idx_fields(m.type_sec, &TypeElement::idx), 0, IndexSpace::type);
        break;
    case SectionKind::import:
        deltas = fix_imports(m);
        break;
    case SectionKind::function:
        deltas = renumber(idx_fields(m.func_sec, &FunctionElement::func_idx),
            m.imported_count(ExternalKind::function), IndexSpace::function);
        break;
    case SectionKind::code:
        deltas = renumber(idx_fields(m.code_sec, &CodeElement::func_idx),
            m.imported_count(ExternalKind::function), IndexSpace::function);
        for (auto& code : m.code_sec)
            code.locals = normalize_locals(code.locals);
        break;
    case SectionKind::global:
        deltas = renumber(idx_fields(m.global_sec, &GlobalElement::idx),
            m.imported_count(ExternalKind::global), IndexSpace::global);
        break;
    case SectionKind::export_:
        deltas = renumber(idx_fields(m.export_sec, &ExportElement::idx), 0, IndexSpace::export_);
        break;
    case SectionKind::elem:
        deltas = renumber(idx_fields(m.elem_sec, &ElemElement::idx), 0, IndexSpace::elem);
        break;
    case SectionKind::data:
        deltas = renumber(idx_fields(m.data_sec, &DataElement::idx), 0, IndexSpace::data);
        sync_data_count(m);
        break;
    case SectionKind::custom:
        fix_names(m);
        break;
    case SectionKind::table:
    case SectionKind::memory:
    case SectionKind::start:
        break;
    }
    if (kind == SectionKind::memory || kind == SectionKind::data || kind == SectionKind::table ||
        kind == SectionKind::elem || kind == SectionKind::import)
        repair_limits(m);
    return deltas;
}

void repair_limits(Module& m)
{
    if (!m.data_sec.empty())
    {
        uint64_t needed = 0;
        for (const auto& d : m.data_sec)
            if (const auto offset = d.offset.literal_i32())
                needed = std::max(needed, pages_for(uint64_t{static_cast<uint32_t>(*offset)} +
                                                    d.init.size()));
        if (m.total_memory_count() == 0)
        {
            if (needed > max_pages)
                throw LimitError{"data segments exceed the 65536 page limit"};
            m.mem_sec.push_back({static_cast<uint32_t>(needed), std::nullopt});
        }
        else
            grow(*m.memory_limits(), needed, "memory");
    }
    if (!m.elem_sec.empty())
    {
        uint64_t needed = 0;
        for (const auto& e : m.elem_sec)
            if (const auto offset = e.offset.literal_i32())
                needed = std::max(
                    needed, uint64_t{static_cast<uint32_t>(*offset)} + e.func_idxs.size());
        if (m.total_table_count() == 0)
        {
            const auto size = static_cast<uint32_t>(needed);
            m.table_sec.push_back({size, size});
        }
        else
            grow(*m.table_limits(), needed, "table");
    }
}
}  // namespace rewasm
