// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "instruction.hpp"
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace rewasm
{
using Bytes = std::vector<uint8_t>;

/// Placeholder for idx fields that the section fixer has not assigned yet.
inline constexpr uint32_t unset_index = std::numeric_limits<uint32_t>::max();

inline constexpr uint32_t page_size = 65536;
inline constexpr uint32_t max_pages = 65536;

enum class SectionId : uint8_t
{
    custom = 0,
    type = 1,
    import = 2,
    function = 3,
    table = 4,
    memory = 5,
    global = 6,
    export_ = 7,
    start = 8,
    element = 9,
    code = 10,
    data = 11,
};

enum class ExternalKind : uint8_t
{
    function = 0,
    table = 1,
    memory = 2,
    global = 3,
};

std::string_view to_string(ExternalKind kind);

enum class Mutability : uint8_t
{
    immutable = 0x00,
    mutable_ = 0x01,
};

struct Limits
{
    uint32_t min = 0;
    std::optional<uint32_t> max;

    friend bool operator==(const Limits&, const Limits&) = default;
};

struct TypeElement
{
    uint32_t idx = unset_index;
    std::vector<ValType> params;
    std::vector<ValType> results;

    friend bool operator==(const TypeElement&, const TypeElement&) = default;
};

struct FunctionImport
{
    uint32_t type_idx = 0;
    friend bool operator==(const FunctionImport&, const FunctionImport&) = default;
};

struct TableImport
{
    Limits limits;
    friend bool operator==(const TableImport&, const TableImport&) = default;
};

struct MemoryImport
{
    Limits limits;
    friend bool operator==(const MemoryImport&, const MemoryImport&) = default;
};

struct GlobalImport
{
    ValType type = ValType::i32;
    Mutability mut = Mutability::immutable;
    friend bool operator==(const GlobalImport&, const GlobalImport&) = default;
};

using ImportDesc = std::variant<FunctionImport, TableImport, MemoryImport, GlobalImport>;

/// `idx` is the position in the index space of the import's kind, so the
/// function imports carry the function indices that precede all internal
/// functions.
struct ImportElement
{
    uint32_t idx = unset_index;
    std::string module_name;
    std::string name;
    ImportDesc desc;

    ExternalKind kind() const noexcept { return static_cast<ExternalKind>(desc.index()); }
    bool is_function() const noexcept { return desc.index() == 0; }
    /// Type index of a function import; nullopt for other kinds.
    std::optional<uint32_t> type_idx() const noexcept;

    friend bool operator==(const ImportElement&, const ImportElement&) = default;
};

/// Absolute function index (imports first) and its signature.
struct FunctionElement
{
    uint32_t func_idx = unset_index;
    uint32_t type_idx = 0;

    friend bool operator==(const FunctionElement&, const FunctionElement&) = default;
};

struct TableElement
{
    uint32_t min = 0;
    std::optional<uint32_t> max;

    friend bool operator==(const TableElement&, const TableElement&) = default;
};

struct MemoryElement
{
    uint32_t min = 0;
    std::optional<uint32_t> max;

    friend bool operator==(const MemoryElement&, const MemoryElement&) = default;
};

struct GlobalElement
{
    uint32_t idx = unset_index;
    ValType type = ValType::i32;
    Mutability mut = Mutability::immutable;
    ConstExpr init;

    friend bool operator==(const GlobalElement&, const GlobalElement&) = default;
};

struct ExportElement
{
    uint32_t idx = unset_index;
    std::string name;
    ExternalKind kind = ExternalKind::function;
    uint32_t target_idx = 0;

    friend bool operator==(const ExportElement&, const ExportElement&) = default;
};

struct StartElement
{
    uint32_t func_idx = 0;
    friend bool operator==(const StartElement&, const StartElement&) = default;
};

/// Active segment for table 0.
struct ElemElement
{
    uint32_t idx = unset_index;
    ConstExpr offset;
    std::vector<uint32_t> func_idxs;

    friend bool operator==(const ElemElement&, const ElemElement&) = default;
};

struct Local
{
    uint32_t count = 1;
    ValType type = ValType::i32;

    friend bool operator==(const Local&, const Local&) = default;
};

struct CodeElement
{
    uint32_t func_idx = unset_index;
    std::vector<Local> locals;
    std::vector<Instruction> body;

    /// Sum of all local counts (parameters excluded).
    uint64_t local_count() const noexcept;

    friend bool operator==(const CodeElement&, const CodeElement&) = default;
};

struct DataElement
{
    uint32_t idx = unset_index;
    uint32_t mem_idx = 0;
    ConstExpr offset;
    Bytes init;

    friend bool operator==(const DataElement&, const DataElement&) = default;
};

struct NameAssoc
{
    uint32_t idx = 0;
    std::string name;
    friend bool operator==(const NameAssoc&, const NameAssoc&) = default;
};

using NameMap = std::vector<NameAssoc>;

struct IndirectNameAssoc
{
    uint32_t idx = 0;
    NameMap names;
    friend bool operator==(const IndirectNameAssoc&, const IndirectNameAssoc&) = default;
};

struct RawSubsection
{
    uint8_t id = 0;
    Bytes payload;
    friend bool operator==(const RawSubsection&, const RawSubsection&) = default;
};

/// Decoded payload of the "name" custom section.
struct NameSection
{
    static constexpr uint8_t module_subsection = 0;
    static constexpr uint8_t function_subsection = 1;
    static constexpr uint8_t local_subsection = 2;
    static constexpr uint8_t global_subsection = 7;
    static constexpr uint8_t data_subsection = 9;

    std::optional<std::string> module_name;
    NameMap functions;
    std::vector<IndirectNameAssoc> locals;
    NameMap globals;
    NameMap data;
    /// Subsections with other ids, kept verbatim.
    std::vector<RawSubsection> others;

    friend bool operator==(const NameSection&, const NameSection&) = default;
};

/// Where a custom or unknown section sits: after the known section with id
/// `after` (0 means directly after the header), ordered by `order` among
/// sections sharing the same slot.
struct Placement
{
    uint8_t after = 0;
    uint32_t order = 0;

    friend bool operator==(const Placement&, const Placement&) = default;
};

struct CustomElement
{
    std::string name;
    std::variant<Bytes, NameSection> payload;
    Placement placement;

    bool is_name_section() const noexcept { return payload.index() == 1; }

    friend bool operator==(const CustomElement&, const CustomElement&) = default;
};

struct UnknownSection
{
    uint8_t id = 0;
    Bytes payload;
    Placement placement;

    friend bool operator==(const UnknownSection&, const UnknownSection&) = default;
};

/// Mutable view of the limits of a table or memory, imported or internal.
struct LimitsRef
{
    uint32_t& min;
    std::optional<uint32_t>& max;
};

enum class FunctionKind : uint8_t
{
    imported,
    internal,
};

struct ResolvedFunction
{
    FunctionKind kind;
    uint32_t type_idx;
    /// Position in code_sec (and func_sec) for internal functions.
    std::optional<uint32_t> code_pos;
    /// Position in import_sec for imported functions.
    std::optional<uint32_t> import_pos;
};

/// In-memory form of a WebAssembly binary. Sections are plain vectors of
/// elements; every other component of the library operates on this type.
struct Module
{
    std::vector<TypeElement> type_sec;
    std::vector<ImportElement> import_sec;
    std::vector<FunctionElement> func_sec;
    std::vector<TableElement> table_sec;
    std::vector<MemoryElement> mem_sec;
    std::vector<GlobalElement> global_sec;
    std::vector<ExportElement> export_sec;
    std::optional<StartElement> start_sec;
    std::vector<ElemElement> elem_sec;
    std::vector<CodeElement> code_sec;
    std::vector<DataElement> data_sec;
    std::vector<CustomElement> custom_secs;
    std::vector<UnknownSection> unknown_secs;

    /// Bumped by every rewriter mutation; selections remember it.
    uint64_t generation() const noexcept { return m_generation; }
    void touch() noexcept { ++m_generation; }

    uint32_t imported_count(ExternalKind kind) const noexcept;
    uint32_t total_function_count() const noexcept;
    uint32_t total_global_count() const noexcept;
    uint32_t total_table_count() const noexcept;
    uint32_t total_memory_count() const noexcept;

    /// Throws IndexError naming the function index space when out of range.
    ResolvedFunction resolve_function(uint32_t func_idx) const;
    const TypeElement& function_type(uint32_t func_idx) const;
    /// Type and mutability of a global, imported or internal.
    GlobalImport global_type(uint32_t global_idx) const;

    /// Limits of memory 0 / table 0, wherever they are declared.
    std::optional<LimitsRef> memory_limits() noexcept;
    std::optional<LimitsRef> table_limits() noexcept;

    NameSection* name_section() noexcept;
    const NameSection* name_section() const noexcept;
    NameSection& ensure_name_section();

    /// Object-level equality; the edit generation is not part of it.
    friend bool operator==(const Module& a, const Module& b);

private:
    uint64_t m_generation = 0;
};

inline uint32_t total_function_count(const Module& module)
{
    return module.total_function_count();
}

inline ResolvedFunction resolve_function(const Module& module, uint32_t func_idx)
{
    return module.resolve_function(func_idx);
}
}  // namespace rewasm
