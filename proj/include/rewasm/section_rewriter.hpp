// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "delta.hpp"
#include "errors.hpp"
#include "module.hpp"
#include <cstddef>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace rewasm
{
/// The twelve element kinds, in the order of the Element variant.
enum class SectionKind : uint8_t
{
    type,
    import,
    function,
    table,
    memory,
    global,
    export_,
    start,
    elem,
    code,
    data,
    custom,
};

std::string_view to_string(SectionKind kind);
std::optional<SectionKind> section_kind_from_string(std::string_view name) noexcept;
SectionId section_id(SectionKind kind) noexcept;

using Element = std::variant<TypeElement, ImportElement, FunctionElement, TableElement,
    MemoryElement, GlobalElement, ExportElement, StartElement, ElemElement, CodeElement,
    DataElement, CustomElement>;

inline SectionKind kind_of(const Element& element) noexcept
{
    return static_cast<SectionKind>(element.index());
}

/// A template field: a concrete value, or `any` to match everything.
template <typename T>
using Pattern = std::optional<T>;

inline constexpr std::nullopt_t any = std::nullopt;

struct TypePattern
{
    Pattern<uint32_t> idx;
    Pattern<std::vector<ValType>> params;
    Pattern<std::vector<ValType>> results;
};

/// `type_idx` only matches function imports; `kind` narrows the import kind.
struct ImportPattern
{
    Pattern<uint32_t> idx;
    Pattern<std::string> module_name;
    Pattern<std::string> name;
    Pattern<uint32_t> type_idx;
    Pattern<ExternalKind> kind;
};

struct FunctionPattern
{
    Pattern<uint32_t> func_idx;
    Pattern<uint32_t> type_idx;
};

struct TablePattern
{
    Pattern<uint32_t> min;
    Pattern<std::optional<uint32_t>> max;
};

struct MemoryPattern
{
    Pattern<uint32_t> min;
    Pattern<std::optional<uint32_t>> max;
};

struct GlobalPattern
{
    Pattern<uint32_t> idx;
    Pattern<ValType> type;
    Pattern<Mutability> mut;
    Pattern<ConstExpr> init;
};

struct ExportPattern
{
    Pattern<uint32_t> idx;
    Pattern<std::string> name;
    Pattern<ExternalKind> kind;
    Pattern<uint32_t> target_idx;
};

struct StartPattern
{
    Pattern<uint32_t> func_idx;
};

struct ElemPattern
{
    Pattern<uint32_t> idx;
    Pattern<ConstExpr> offset;
    Pattern<std::vector<uint32_t>> func_idxs;
};

struct CodePattern
{
    Pattern<uint32_t> func_idx;
    Pattern<std::vector<Local>> locals;
    Pattern<std::vector<Instruction>> body;
};

struct DataPattern
{
    Pattern<uint32_t> idx;
    Pattern<uint32_t> mem_idx;
    Pattern<ConstExpr> offset;
    Pattern<Bytes> init;
};

struct CustomPattern
{
    Pattern<std::string> name;
};

/// Element template; alternatives follow SectionKind order.
using ElementTemplate = std::variant<TypePattern, ImportPattern, FunctionPattern, TablePattern,
    MemoryPattern, GlobalPattern, ExportPattern, StartPattern, ElemPattern, CodePattern,
    DataPattern, CustomPattern>;

inline SectionKind kind_of(const ElementTemplate& pattern) noexcept
{
    return static_cast<SectionKind>(pattern.index());
}

bool matches(const ElementTemplate& pattern, const Element& element);

/// Positions of the elements of one section that matched a template. A
/// selection is tied to the module it was taken from and goes stale as soon
/// as that module is edited.
class Selection
{
public:
    SectionKind kind() const noexcept { return m_kind; }
    const std::vector<size_t>& positions() const noexcept { return m_positions; }
    bool empty() const noexcept { return m_positions.empty(); }
    size_t size() const noexcept { return m_positions.size(); }

    bool belongs_to(const Module& module) const noexcept { return m_module == &module; }
    bool is_stale() const noexcept;

    /// Sub-selection of the i-th match; negative i counts from the end. Out
    /// of range yields an empty selection.
    Selection at(std::ptrdiff_t i) const;
    Selection last() const { return at(-1); }
    Selection first() const { return at(0); }

    /// Copy of the i-th selected element. Throws StaleSelectionError or
    /// IndexError.
    Element element(size_t i = 0) const;

    template <typename E>
    E get(size_t i = 0) const
    {
        auto e = element(i);
        if (auto* typed = std::get_if<E>(&e))
            return std::move(*typed);
        throw TypeMismatchError{"selection holds " + std::string{to_string(m_kind)} + " elements"};
    }

private:
    friend Selection select(const Module& module, const ElementTemplate& pattern);
    friend Selection select_all(const Module& module, SectionKind kind);

    const Module* m_module = nullptr;
    uint64_t m_generation = 0;
    SectionKind m_kind = SectionKind::type;
    std::vector<size_t> m_positions;
};

/// All elements whose concrete template fields equal the element's fields.
/// Never mutates the module.
Selection select(const Module& module, const ElementTemplate& pattern);
Selection select_all(const Module& module, SectionKind kind);

size_t section_size(const Module& module, SectionKind kind) noexcept;
Element element_at(const Module& module, SectionKind kind, size_t position);

/// Inserts `element` right after the last selected element and runs the
/// section fixer. Returns false for an empty selection.
bool insert(Module& module, const Selection& selection, Element element);

/// Inserts `element` so that it ends up at `position` of its section.
/// Throws IndexError when position > section size and StructureError when a
/// second start, table or memory would be created.
bool insert_at(Module& module, size_t position, Element element);

/// Removes every selected element and runs the section fixer. Returns false
/// for an empty selection.
bool remove(Module& module, const Selection& selection);

using FieldValue = std::variant<std::monostate, uint32_t, ValType, Mutability, ExternalKind,
    std::string, std::vector<ValType>, std::vector<uint32_t>, Bytes, ConstExpr,
    std::vector<Local>, std::vector<Instruction>>;

/// Replaces `field` of every selected element. Field names follow the
/// element layout (e.g. "paramsType", "resultsType", "typeIdx", "min",
/// "max", "initData"); std::monostate clears an optional field. idx fields
/// belong to the fixer and are rejected with ImmutableFieldError.
bool update(Module& module, const Selection& selection, std::string_view field,
    const FieldValue& value);

/// Field names accepted by update() for one element kind.
std::vector<std::string_view> field_names(SectionKind kind);

/// Renumbers the idx fields of a section to a gap-free sequence starting at
/// the section's base (the number of imports of that kind for the function,
/// code and global sections, zero otherwise) and repairs memory/table limits
/// that segments outgrew. Returns the shifts needed to re-point references,
/// in application order; an empty result means nothing moved.
std::vector<RewriteDelta> fix_section_indices(Module& module, SectionKind kind);

/// Grows memory 0 / table 0 so every literal-offset data / elem segment
/// fits, creating them when segments exist without one.
void repair_limits(Module& module);
}  // namespace rewasm
