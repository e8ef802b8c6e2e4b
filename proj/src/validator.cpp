// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rewasm/validator.hpp"
#include "rewasm/errors.hpp"
#include "rewasm/leb128.hpp"
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sys/wait.h>
#include <unistd.h>

namespace rewasm
{
namespace
{
class Checker
{
public:
    explicit Checker(const Module& m) : m{m} {}

    std::vector<Diagnostic> run()
    {
        check_continuity();
        check_types();
        check_imports();
        check_functions();
        check_tables_and_memories();
        check_globals();
        check_exports();
        check_start();
        check_elems();
        check_code();
        check_data();
        return std::move(out);
    }

private:
    const Module& m;
    std::vector<Diagnostic> out;

    void error(SectionId section, std::optional<uint32_t> element, std::string code,
        std::string message)
    {
        out.push_back({Severity::error, section, element, std::move(code), std::move(message)});
    }

    void warning(SectionId section, std::optional<uint32_t> element, std::string code,
        std::string message)
    {
        out.push_back({Severity::warning, section, element, std::move(code), std::move(message)});
    }

    template <typename E>
    void continuity(const std::vector<E>& elems, uint32_t E::*field, uint32_t base, SectionId id)
    {
        for (uint32_t pos = 0; pos < elems.size(); ++pos)
            if (elems[pos].*field != base + pos)
            {
                error(id, pos, "idx-continuity",
                    "element at position " + std::to_string(pos) + " has idx " +
                        std::to_string(elems[pos].*field) + ", expected " +
                        std::to_string(base + pos));
                return;
            }
    }

    void check_continuity()
    {
        continuity(m.type_sec, &TypeElement::idx, 0, SectionId::type);
        uint32_t next[4] = {0, 0, 0, 0};
        for (uint32_t pos = 0; pos < m.import_sec.size(); ++pos)
        {
            const auto& imp = m.import_sec[pos];
            auto& expected = next[static_cast<size_t>(imp.kind())];
            if (imp.idx != expected)
            {
                error(SectionId::import, pos, "idx-continuity",
                    "import at position " + std::to_string(pos) + " has idx " +
                        std::to_string(imp.idx) + ", expected " + std::to_string(expected));
                break;
            }
            ++expected;
        }
        const auto funcs = m.imported_count(ExternalKind::function);
        continuity(m.func_sec, &FunctionElement::func_idx, funcs, SectionId::function);
        continuity(m.code_sec, &CodeElement::func_idx, funcs, SectionId::code);
        continuity(m.global_sec, &GlobalElement::idx, m.imported_count(ExternalKind::global),
            SectionId::global);
        continuity(m.export_sec, &ExportElement::idx, 0, SectionId::export_);
        continuity(m.elem_sec, &ElemElement::idx, 0, SectionId::element);
        continuity(m.data_sec, &DataElement::idx, 0, SectionId::data);
    }

    void check_type_index(uint32_t type_idx, SectionId section, uint32_t element,
        const std::string& where)
    {
        if (type_idx >= m.type_sec.size())
            error(section, element, "type-index",
                where + " uses type " + std::to_string(type_idx) + " but the type index space has " +
                    std::to_string(m.type_sec.size()) + " entries");
    }

    void check_function_index(uint32_t func_idx, SectionId section, uint32_t element,
        const std::string& where)
    {
        if (func_idx >= m.total_function_count())
            error(section, element, "function-index",
                where + " refers to function " + std::to_string(func_idx) +
                    " outside the function index space (size " +
                    std::to_string(m.total_function_count()) + ")");
    }

    void check_types()
    {
        // Multi-value results are outside core v1.
        for (uint32_t pos = 0; pos < m.type_sec.size(); ++pos)
            if (m.type_sec[pos].results.size() > 1)
                warning(SectionId::type, pos, "multi-value",
                    "type declares more than one result");
    }

    void check_limits(uint32_t min, std::optional<uint32_t> max, SectionId section, uint32_t pos,
        bool memory)
    {
        if (max && *max < min)
            error(section, pos, "limits-order",
                "max " + std::to_string(*max) + " is below min " + std::to_string(min));
        if (memory && (min > max_pages || (max && *max > max_pages)))
            error(section, pos, "memory-pages", "memory limits exceed 65536 pages");
    }

    void check_imports()
    {
        for (uint32_t pos = 0; pos < m.import_sec.size(); ++pos)
        {
            const auto& imp = m.import_sec[pos];
            if (const auto* f = std::get_if<FunctionImport>(&imp.desc))
                check_type_index(f->type_idx, SectionId::import, pos, "import");
            else if (const auto* t = std::get_if<TableImport>(&imp.desc))
                check_limits(t->limits.min, t->limits.max, SectionId::import, pos, false);
            else if (const auto* mem = std::get_if<MemoryImport>(&imp.desc))
                check_limits(mem->limits.min, mem->limits.max, SectionId::import, pos, true);
        }
    }

    void check_functions()
    {
        for (uint32_t pos = 0; pos < m.func_sec.size(); ++pos)
            check_type_index(m.func_sec[pos].type_idx, SectionId::function, pos, "function");
        if (m.func_sec.size() != m.code_sec.size())
            error(SectionId::code, std::nullopt, "func-code-count",
                "function section declares " + std::to_string(m.func_sec.size()) +
                    " functions but the code section has " + std::to_string(m.code_sec.size()) +
                    " bodies");
    }

    void check_tables_and_memories()
    {
        for (uint32_t pos = 0; pos < m.table_sec.size(); ++pos)
            check_limits(m.table_sec[pos].min, m.table_sec[pos].max, SectionId::table, pos, false);
        for (uint32_t pos = 0; pos < m.mem_sec.size(); ++pos)
            check_limits(m.mem_sec[pos].min, m.mem_sec[pos].max, SectionId::memory, pos, true);
        if (m.total_table_count() > 1)
            error(SectionId::table, std::nullopt, "table-count", "more than one table");
        if (m.total_memory_count() > 1)
            error(SectionId::memory, std::nullopt, "memory-count", "more than one memory");
    }

    void check_const(const ConstExpr& expr, ValType expected, SectionId section, uint32_t pos,
        const std::string& what)
    {
        const auto& in = expr.instrs;
        if (in.size() != 2 || in[1].opcode != Opcode::end)
        {
            error(section, pos, "const-expr", what + " is not a single constant instruction");
            return;
        }
        std::optional<ValType> type;
        switch (in[0].opcode)
        {
        case Opcode::i32_const:
            type = ValType::i32;
            break;
        case Opcode::i64_const:
            type = ValType::i64;
            break;
        case Opcode::f32_const:
            type = ValType::f32;
            break;
        case Opcode::f64_const:
            type = ValType::f64;
            break;
        case Opcode::global_get:
        {
            const auto g = std::get<GlobalIdx>(in[0].immediates.at(0)).value;
            if (g >= m.imported_count(ExternalKind::global))
            {
                error(section, pos, "const-expr",
                    what + " reads global " + std::to_string(g) + ", which is not imported");
                return;
            }
            const auto gt = m.global_type(g);
            if (gt.mut == Mutability::mutable_)
                error(section, pos, "const-expr", what + " reads a mutable global");
            type = gt.type;
            break;
        }
        default:
            error(section, pos, "const-expr",
                what + " uses " + std::string{mnemonic(in[0].opcode)} + ", not a constant");
            return;
        }
        if (*type != expected)
            error(section, pos, "const-type",
                what + " produces " + std::string{to_string(*type)} + ", expected " +
                    std::string{to_string(expected)});
    }

    void check_globals()
    {
        for (uint32_t pos = 0; pos < m.global_sec.size(); ++pos)
            check_const(m.global_sec[pos].init, m.global_sec[pos].type, SectionId::global, pos,
                "global initializer");
    }

    void check_exports()
    {
        std::set<std::string> names;
        for (uint32_t pos = 0; pos < m.export_sec.size(); ++pos)
        {
            const auto& e = m.export_sec[pos];
            if (!names.insert(e.name).second)
                error(SectionId::export_, pos, "export-duplicate",
                    "export name '" + e.name + "' is used twice");
            uint32_t limit = 0;
            switch (e.kind)
            {
            case ExternalKind::function:
                limit = m.total_function_count();
                break;
            case ExternalKind::table:
                limit = m.total_table_count();
                break;
            case ExternalKind::memory:
                limit = m.total_memory_count();
                break;
            case ExternalKind::global:
                limit = m.total_global_count();
                break;
            }
            if (e.target_idx >= limit)
                error(SectionId::export_, pos, "export-target",
                    "export '" + e.name + "' refers to " + std::string{to_string(e.kind)} + " " +
                        std::to_string(e.target_idx) + ", which does not exist");
        }
    }

    void check_start()
    {
        if (!m.start_sec)
            return;
        const auto f = m.start_sec->func_idx;
        check_function_index(f, SectionId::start, 0, "start");
        if (f >= m.total_function_count())
            return;
        const auto type_idx = m.resolve_function(f).type_idx;
        if (type_idx < m.type_sec.size() &&
            (!m.type_sec[type_idx].params.empty() || !m.type_sec[type_idx].results.empty()))
            error(SectionId::start, 0, "start-signature",
                "start function " + std::to_string(f) + " must have type [] -> []");
    }

    void check_elems()
    {
        const auto table = m.total_table_count() > 0;
        // An imported table may be larger than declared; only the host knows.
        const auto imported_table = m.imported_count(ExternalKind::table) > 0;
        std::optional<uint32_t> table_min;
        if (table)
            table_min = const_cast<Module&>(m).table_limits()->min;
        for (uint32_t pos = 0; pos < m.elem_sec.size(); ++pos)
        {
            const auto& e = m.elem_sec[pos];
            if (!table)
                error(SectionId::element, pos, "no-table", "elem segment without a table");
            check_const(e.offset, ValType::i32, SectionId::element, pos, "elem offset");
            for (const auto f : e.func_idxs)
                check_function_index(f, SectionId::element, pos, "elem entry");
            if (const auto off = e.offset.literal_i32(); off && table_min &&
                uint64_t{static_cast<uint32_t>(*off)} + e.func_idxs.size() > *table_min)
                (this->*(imported_table ? &Checker::warning : &Checker::error))(SectionId::element,
                    pos, "elem-bounds",
                    "elem segment ends past the table's minimum size " +
                        std::to_string(*table_min));
        }
    }

    void check_data()
    {
        const auto memory = m.total_memory_count() > 0;
        const auto imported_memory = m.imported_count(ExternalKind::memory) > 0;
        std::optional<uint64_t> bytes;
        if (memory)
            bytes = uint64_t{const_cast<Module&>(m).memory_limits()->min} * page_size;
        for (uint32_t pos = 0; pos < m.data_sec.size(); ++pos)
        {
            const auto& d = m.data_sec[pos];
            if (!memory)
                error(SectionId::data, pos, "no-memory", "data segment without a memory");
            if (d.mem_idx != 0)
                error(SectionId::data, pos, "memory-index", "data segment targets memory " +
                                                                std::to_string(d.mem_idx));
            check_const(d.offset, ValType::i32, SectionId::data, pos, "data offset");
            if (const auto off = d.offset.literal_i32();
                off && bytes && uint64_t{static_cast<uint32_t>(*off)} + d.init.size() > *bytes)
                (this->*(imported_memory ? &Checker::warning : &Checker::error))(SectionId::data,
                    pos, "data-bounds",
                    "data segment ends past the memory's minimum size of " +
                        std::to_string(*bytes) + " bytes");
        }
        for (const auto& unknown : m.unknown_secs)
            if (unknown.id == 12)
            {
                bool matches = false;
                try
                {
                    const auto count = decode_uleb128<uint32_t>(unknown.payload);
                    matches = count.consumed == unknown.payload.size() &&
                              count.value == m.data_sec.size();
                }
                catch (const FormatError&)
                {
                }
                if (!matches)
                    error(SectionId::data, std::nullopt, "data-count",
                        "data count section disagrees with the data section");
            }
    }

    void check_code()
    {
        const auto imported = m.imported_count(ExternalKind::function);
        for (uint32_t pos = 0; pos < m.code_sec.size(); ++pos)
        {
            const auto& code = m.code_sec[pos];
            uint64_t locals = code.local_count();
            if (pos < m.func_sec.size() && m.func_sec[pos].type_idx < m.type_sec.size())
                locals += m.type_sec[m.func_sec[pos].type_idx].params.size();
            if (!is_well_structured(code.body))
            {
                error(SectionId::code, pos, "block-structure",
                    "body of function " + std::to_string(imported + pos) +
                        " is not properly terminated or its block markers do not balance");
                continue;
            }
            check_body(code.body, pos, locals);
        }
    }

    void check_body(const std::vector<Instruction>& body, uint32_t pos, uint64_t locals)
    {
        const auto has_memory = m.total_memory_count() > 0;
        const auto has_table = m.total_table_count() > 0;
        const auto globals = m.total_global_count();
        uint32_t depth = 0;
        auto where = [&](size_t i) {
            return "instruction " + std::to_string(i) + " (" + std::string{mnemonic(body[i].opcode)} +
                   ")";
        };
        for (size_t i = 0; i < body.size(); ++i)
        {
            const auto& instr = body[i];
            if (opens_block(instr.opcode))
                ++depth;
            else if (instr.opcode == Opcode::end && depth > 0)
                --depth;
            for (const auto& imm : instr.immediates)
            {
                if (const auto* f = std::get_if<FuncIdx>(&imm))
                    check_function_index(f->value, SectionId::code, pos, where(i));
                else if (const auto* t = std::get_if<TypeIdx>(&imm))
                    check_type_index(t->value, SectionId::code, pos, where(i));
                else if (const auto* b = std::get_if<BlockType>(&imm);
                         b != nullptr && b->kind == BlockType::Kind::type_index)
                    check_type_index(b->type_index, SectionId::code, pos, where(i));
                else if (const auto* l = std::get_if<LocalIdx>(&imm); l && l->value >= locals)
                    error(SectionId::code, pos, "local-index",
                        where(i) + " uses local " + std::to_string(l->value) + " of " +
                            std::to_string(locals));
                else if (const auto* g = std::get_if<GlobalIdx>(&imm))
                {
                    if (g->value >= globals)
                        error(SectionId::code, pos, "global-index",
                            where(i) + " uses global " + std::to_string(g->value) +
                                " outside the global index space (size " +
                                std::to_string(globals) + ")");
                    else if (instr.opcode == Opcode::global_set &&
                             m.global_type(g->value).mut != Mutability::mutable_)
                        error(SectionId::code, pos, "global-immutable",
                            where(i) + " writes immutable global " + std::to_string(g->value));
                }
                else if (const auto* label = std::get_if<LabelIdx>(&imm); label &&
                         label->value > depth)
                    error(SectionId::code, pos, "label-depth",
                        where(i) + " branches to label " + std::to_string(label->value) +
                            " at nesting depth " + std::to_string(depth));
                else if (const auto* mem = std::get_if<MemArg>(&imm))
                {
                    if (!has_memory)
                        error(SectionId::code, pos, "no-memory", where(i) + " without a memory");
                    if (mem->align > opcode_info(instr.opcode).natural_alignment)
                        error(SectionId::code, pos, "memarg-align",
                            where(i) + " alignment exceeds the access width");
                }
                else if (std::holds_alternative<MemIdx>(imm) && !has_memory)
                    error(SectionId::code, pos, "no-memory", where(i) + " without a memory");
                else if (const auto* table = std::get_if<TableIdx>(&imm);
                         table && (!has_table || table->value != 0))
                    error(SectionId::code, pos, "no-table", where(i) + " without table 0");
            }
        }
    }
};

std::string quote(const std::string& s)
{
    std::string out = "'";
    for (const char c : s)
    {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    return out + "'";
}
}  // namespace

std::string to_string(const Diagnostic& d)
{
    static constexpr const char* sections[] = {"custom", "type", "import", "function", "table",
        "memory", "global", "export", "start", "elem", "code", "data"};
    std::string out = d.severity == Severity::error ? "error" : "warning";
    out += "[" + d.code + "] ";
    const auto id = static_cast<size_t>(d.section);
    out += id < std::size(sections) ? sections[id] : "?";
    out += " section";
    if (d.element)
        out += " element " + std::to_string(*d.element);
    return out + ": " + d.message;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) noexcept
{
    for (const auto& d : diagnostics)
        if (d.severity == Severity::error)
            return true;
    return false;
}

std::vector<Diagnostic> validate_structure(const Module& module)
{
    try
    {
        return Checker{module}.run();
    }
    catch (const std::exception& e)
    {
        return {Diagnostic{Severity::error, SectionId::custom, std::nullopt, "internal",
            std::string{"validation aborted: "} + e.what()}};
    }
}

std::optional<std::string> validator_command_from_env()
{
    const char* value = std::getenv(validator_env);
    if (value == nullptr || *value == '\0')
        return std::nullopt;
    return std::string{value};
}

ExternalResult validate_external(
    std::span<const uint8_t> bytes, const std::optional<std::string>& command)
{
    if (!command || command->empty())
        return {};

    auto path = std::filesystem::temp_directory_path() / "rewasm-XXXXXX.wasm";
    std::string path_str = path.string();
    const int fd = ::mkstemps(path_str.data(), 5);
    if (fd < 0)
        throw EnvironmentError{"cannot create a temporary file for the external validator"};
    ::close(fd);
    {
        std::ofstream file{path_str, std::ios::binary};
        file.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    }

    std::string cmd = *command;
    if (const auto at = cmd.find("{}"); at != std::string::npos)
        cmd.replace(at, 2, quote(path_str));
    else
        cmd += " " + quote(path_str);
    cmd += " 2>&1";

    ExternalResult result;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (pipe == nullptr)
    {
        std::filesystem::remove(path_str);
        throw EnvironmentError{"cannot run external validator: " + *command};
    }
    char buffer[4096];
    size_t n = 0;
    while ((n = std::fread(buffer, 1, sizeof buffer, pipe)) > 0)
        result.tool_output.append(buffer, n);
    const int status = ::pclose(pipe);
    std::filesystem::remove(path_str);

    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128;
    if (result.exit_code == 126 || result.exit_code == 127)
        throw EnvironmentError{"external validator could not be run (exit " +
                               std::to_string(result.exit_code) + "): " + *command + "\n" +
                               result.tool_output};
    result.status = result.exit_code == 0 ? ExternalStatus::accepted : ExternalStatus::rejected;
    return result;
}
}  // namespace rewasm
