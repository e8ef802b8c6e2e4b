#include "fixtures.hpp"

#include "rewasm/semantics.hpp"
#include <fstream>
#include <set>

namespace rewasm::testing
{
using namespace rewasm::ins;

Module listing_module()
{
    Module m;
    m.type_sec = {{0, {ValType::i32}, {ValType::i32}}, {1, {ValType::i32}, {}}};
    m.import_sec = {{0, "env", "sqrt", FunctionImport{0}}, {1, "env", "print", FunctionImport{0}}};
    m.func_sec = {{2, 0}};
    m.table_sec = {{5, 5}};
    m.elem_sec = {{0, ConstExpr::i32(1), {1}}};
    m.code_sec = {{2, {{1, ValType::i32}},
        {loop(), local_get(0), call(0), local_set(1), local_get(1), i32_const(10),
            op(Opcode::i32_lt_s), br_if(0), end(), local_get(1), call(1), end()}}};
    return m;
}

Module empty_module()
{
    return {};
}

Module canary_module()
{
    Module m;
    m.type_sec = {{0, {ValType::i32}, {ValType::i32}}, {1, {}, {ValType::i32}}};
    m.func_sec = {{0, 0}, {1, 1}};
    m.mem_sec = {{2, std::nullopt}};
    m.global_sec = {{0, ValType::i32, Mutability::mutable_, ConstExpr::i32(65536)}};
    m.export_sec = {{0, "callee", ExternalKind::function, 0}, {1, "caller", ExternalKind::function, 1}};
    m.code_sec = {
        {0, {}, {local_get(0), i32_const(1), op(Opcode::i32_add), end()}},
        {1, {}, {i32_const(5), call(0), end()}},
    };
    return m;
}

Module instrument_module()
{
    Module m;
    m.type_sec = {{0, {ValType::i32}, {ValType::i32}}, {1, {}, {ValType::i32}}, {2, {}, {}}};
    for (uint32_t i = 0; i < 5; ++i)
        m.import_sec.push_back({i, "env", "f" + std::to_string(i), FunctionImport{i % 2 == 0 ? 0u : 2u}});
    m.func_sec = {{5, 0}, {6, 1}};
    m.export_sec = {{0, "run", ExternalKind::function, 6}};
    m.code_sec = {
        {5, {}, {local_get(0), i32_const(2), op(Opcode::i32_mul), end()}},
        {6, {}, {i32_const(3), call(5), call(0), end()}},
    };
    return m;
}

namespace
{
constexpr ValType all_types[] = {ValType::i32, ValType::i64, ValType::f32, ValType::f64};

Instruction zero(ValType t)
{
    switch (t)
    {
    case ValType::i32:
        return i32_const(0);
    case ValType::i64:
        return i64_const(0);
    case ValType::f32:
        return f32_const(0);
    case ValType::f64:
        return f64_const(0);
    }
    return i32_const(0);
}

ConstExpr literal(ValType t, int32_t tag)
{
    switch (t)
    {
    case ValType::i32:
        return ConstExpr::i32(tag);
    case ValType::i64:
        return ConstExpr::i64(tag);
    case ValType::f32:
        return ConstExpr::f32(static_cast<float>(tag));
    case ValType::f64:
        return ConstExpr::f64(tag);
    }
    return ConstExpr::i32(tag);
}

struct BodyGen
{
    std::mt19937_64& rng;
    const Module& m;
    std::vector<ValType> locals;  // params then declared locals

    uint32_t pick(size_t n) { return static_cast<uint32_t>(std::uniform_int_distribution<size_t>{0, n - 1}(rng)); }

    void call_args(const TypeElement& t, std::vector<Instruction>& out)
    {
        for (const auto p : t.params)
            out.push_back(zero(p));
    }

    void drop_results(const TypeElement& t, std::vector<Instruction>& out)
    {
        for (size_t i = 0; i < t.results.size(); ++i)
            out.push_back(op(Opcode::drop));
    }

    void statement(int depth, std::vector<Instruction>& out)
    {
        switch (pick(9))
        {
        case 0:
        case 1:
        {
            const auto f = pick(m.total_function_count());
            const auto& t = m.function_type(f);
            call_args(t, out);
            out.push_back(call(f));
            drop_results(t, out);
            break;
        }
        case 2:
            if (m.total_table_count() > 0)
            {
                const auto type = pick(m.type_sec.size());
                call_args(m.type_sec[type], out);
                out.push_back(i32_const(0));
                out.push_back(call_indirect(type));
                drop_results(m.type_sec[type], out);
            }
            break;
        case 3:
            if (m.total_global_count() > 0)
            {
                const auto g = pick(m.total_global_count());
                out.push_back(global_get(g));
                out.push_back(op(Opcode::drop));
            }
            break;
        case 4:
            if (m.total_global_count() > 0)
            {
                const auto g = pick(m.total_global_count());
                const auto gt = m.global_type(g);
                if (gt.mut == Mutability::mutable_)
                {
                    out.push_back(zero(gt.type));
                    out.push_back(global_set(g));
                }
            }
            break;
        case 5:
            if (!locals.empty())
            {
                const auto l = pick(locals.size());
                out.push_back(local_get(l));
                out.push_back(local_set(l));
            }
            break;
        case 6:
            if (depth < 3)
            {
                const auto kind = pick(3);
                if (kind == 2)
                    out.push_back(i32_const(0));
                out.push_back(kind == 0 ? block() : kind == 1 ? loop() : if_());
                for (auto n = pick(3); n-- > 0;)
                    statement(depth + 1, out);
                out.push_back(end());
            }
            break;
        case 7:
            if (m.total_memory_count() > 0)
            {
                out.push_back(i32_const(static_cast<int32_t>(pick(16) * 4)));
                if (pick(2) == 0)
                {
                    out.push_back(memory(Opcode::i32_load));
                    out.push_back(op(Opcode::drop));
                }
                else
                {
                    out.push_back(i32_const(7));
                    out.push_back(memory(Opcode::i32_store));
                }
            }
            break;
        default:
            out.push_back(op(Opcode::nop));
        }
    }
};
}  // namespace

std::vector<Instruction> tagged_body(int32_t tag, const std::vector<ValType>& results)
{
    std::vector<Instruction> body{i32_const(tag), op(Opcode::drop)};
    for (const auto r : results)
        body.push_back(zero(r));
    body.push_back(end());
    return body;
}

int32_t fresh_tag(const Module& m)
{
    int32_t tag = 1000;
    for (const auto& c : m.code_sec)
        if (!c.body.empty() && c.body[0].opcode == Opcode::i32_const)
            tag = std::max(tag, std::get<I32>(c.body[0].immediates[0]).value + 1);
    return tag;
}

Module random_module(std::mt19937_64& rng, const RandomShape& shape)
{
    auto uniform = [&](uint32_t lo, uint32_t hi) {
        return std::uniform_int_distribution<uint32_t>{lo, hi}(rng);
    };
    auto any_type = [&] { return all_types[uniform(0, 3)]; };
    Module m;

    const auto n_types = uniform(1, 4);
    for (uint32_t i = 0; i < n_types; ++i)
    {
        TypeElement t{i, {}, {}};
        for (auto n = uniform(0, 3); n-- > 0;)
            t.params.push_back(any_type());
        if (uniform(0, 2) != 0)
            t.results.push_back(any_type());
        m.type_sec.push_back(std::move(t));
    }
    if (uniform(0, 1) == 0)
        m.type_sec.push_back({n_types, {}, {}});

    const auto total_funcs = uniform(1, shape.max_functions);
    const auto imported_funcs = std::min(uniform(0, 3), total_funcs - 1);
    const auto total_globals = uniform(0, shape.max_globals);
    const auto imported_globals = std::min(uniform(0, 2), total_globals);

    for (uint32_t i = 0; i < imported_funcs; ++i)
        m.import_sec.push_back({i, "env", "func" + std::to_string(i),
            FunctionImport{uniform(0, static_cast<uint32_t>(m.type_sec.size()) - 1)}});
    for (uint32_t i = 0; i < imported_globals; ++i)
        m.import_sec.push_back({i, "env", "glob" + std::to_string(i),
            GlobalImport{any_type(), uniform(0, 1) ? Mutability::mutable_ : Mutability::immutable}});

    for (uint32_t i = imported_funcs; i < total_funcs; ++i)
        m.func_sec.push_back({i, uniform(0, static_cast<uint32_t>(m.type_sec.size()) - 1)});
    for (uint32_t i = imported_globals; i < total_globals; ++i)
    {
        const auto t = any_type();
        m.global_sec.push_back({i, t, uniform(0, 1) ? Mutability::mutable_ : Mutability::immutable,
            literal(t, static_cast<int32_t>(500 + i))});
    }

    const auto elem_entries = uniform(0, shape.max_elem_entries);
    if (elem_entries > 0 || uniform(0, 3) == 0)
        m.table_sec.push_back({elem_entries + uniform(0, 2), std::nullopt});
    if (elem_entries > 0)
    {
        ElemElement e{0, ConstExpr::i32(static_cast<int32_t>(uniform(0, 1))), {}};
        for (uint32_t k = 0; k < elem_entries; ++k)
            e.func_idxs.push_back(uniform(0, total_funcs - 1));
        m.table_sec[0].min = std::max(m.table_sec[0].min, 1 + elem_entries);
        m.elem_sec.push_back(std::move(e));
    }
    if (uniform(0, 1) == 0)
    {
        m.mem_sec.push_back({uniform(1, 2), std::nullopt});
        for (uint32_t d = 0, n = uniform(0, 3); d < n; ++d)
        {
            Bytes init(uniform(1, 24));
            for (auto& b : init)
                b = static_cast<uint8_t>(uniform(0, 255));
            m.data_sec.push_back({d, 0, ConstExpr::i32(static_cast<int32_t>(uniform(0, 4096))), init});
        }
    }

    // Bodies see the final index spaces, so build them last.
    for (uint32_t pos = 0; pos < m.func_sec.size(); ++pos)
    {
        const auto func_idx = imported_funcs + pos;
        const auto& type = m.type_sec[m.func_sec[pos].type_idx];
        CodeElement code{func_idx, {}, {}};
        BodyGen gen{rng, m, type.params};
        for (auto n = uniform(0, 2); n-- > 0;)
        {
            code.locals.push_back({uniform(1, 2), any_type()});
            for (uint32_t k = 0; k < code.locals.back().count; ++k)
                gen.locals.push_back(code.locals.back().type);
        }
        code.body = {i32_const(static_cast<int32_t>(1000 + func_idx)), op(Opcode::drop)};
        for (auto n = uniform(0, 6); n-- > 0;)
            gen.statement(0, code.body);
        for (const auto r : type.results)
            code.body.push_back(zero(r));
        code.body.push_back(end());
        m.code_sec.push_back(std::move(code));
    }

    uint32_t export_idx = 0;
    for (uint32_t f = 0; f < total_funcs; ++f)
        if (uniform(0, 2) == 0)
            m.export_sec.push_back({export_idx++, "export" + std::to_string(f), ExternalKind::function, f});
    if (total_globals > 0 && uniform(0, 1) == 0)
        m.export_sec.push_back({export_idx++, "global0", ExternalKind::global, 0});

    for (uint32_t pos = 0; pos < m.func_sec.size(); ++pos)
    {
        const auto& t = m.type_sec[m.func_sec[pos].type_idx];
        if (t.params.empty() && t.results.empty() && uniform(0, 1) == 0)
        {
            m.start_sec = StartElement{imported_funcs + pos};
            break;
        }
    }

    if (shape.names)
    {
        auto& names = m.ensure_name_section();
        for (uint32_t f = 0; f < total_funcs; ++f)
            if (uniform(0, 3) != 0)
                names.functions.push_back({f, "func_" + std::to_string(f)});
        for (uint32_t g = 0; g < total_globals; ++g)
            if (uniform(0, 1) == 0)
                names.globals.push_back({g, "glob_" + std::to_string(g)});
        for (uint32_t d = 0; d < m.data_sec.size(); ++d)
            names.data.push_back({d, "data_" + std::to_string(d)});
        if (!m.code_sec.empty())
            names.locals.push_back({m.code_sec[0].func_idx, {{0, "first"}}});
        if (names.functions.empty() && names.globals.empty() && names.data.empty())
            names.module_name = "random";
        if (!m.code_sec.empty() && m.code_sec[0].locals.empty() &&
            m.function_type(m.code_sec[0].func_idx).params.empty())
            names.locals.clear();
    }
    return m;
}

std::vector<std::filesystem::path> corpus_files()
{
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator{REWASM_CORPUS_DIR})
        if (entry.path().extension() == ".wasm")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
}

Bytes read_bytes(const std::filesystem::path& path)
{
    std::ifstream in{path, std::ios::binary};
    return Bytes{std::istreambuf_iterator<char>{in}, {}};
}

ExternalResult check_external(const Bytes& bytes)
{
    return validate_external(bytes, validator_command_from_env());
}

ExternalResult check_external(const Module& m)
{
    return check_external(encode_module(m));
}

namespace
{
uint32_t pick_internal(Module& m)
{
    const auto imported = m.imported_count(ExternalKind::function);
    for (uint32_t pos = static_cast<uint32_t>(m.code_sec.size()) / 2; pos < m.code_sec.size(); ++pos)
        if (m.code_sec[pos].body.size() > 1)
            return imported + pos;
    append_internal_function(m, {}, {}, {}, {op(Opcode::nop)});
    return m.total_function_count() - 1;
}

std::optional<uint32_t> function_export(const Module& m)
{
    for (uint32_t i = 0; i < m.export_sec.size(); ++i)
        if (m.export_sec[i].kind == ExternalKind::function)
            return i;
    return std::nullopt;
}

uint32_t ensure_function_export(Module& m)
{
    if (const auto e = function_export(m))
        return *e;
    append_export_function(m, "rewasm_export", pick_internal(m));
    return static_cast<uint32_t>(m.export_sec.size() - 1);
}

uint32_t ensure_internal_global(Module& m)
{
    if (m.global_sec.empty())
        append_global_variable(m, ValType::i32, Mutability::mutable_, ConstExpr::i32(0));
    return m.imported_count(ExternalKind::global);
}

uint32_t ensure_global(Module& m)
{
    if (m.total_global_count() == 0)
        append_global_variable(m, ValType::i32, Mutability::mutable_, ConstExpr::i32(0));
    return 0;
}

uint32_t ensure_function_import(Module& m)
{
    if (m.imported_count(ExternalKind::function) == 0)
        append_import_function(m, "rewasm", "host", {ValType::i32}, {});
    return 0;
}

void ensure_memory(Module& m)
{
    if (m.total_memory_count() == 0)
        append_linear_memory(m, 1);
}

uint32_t ensure_data(Module& m)
{
    if (m.data_sec.empty())
    {
        ensure_memory(m);
        modify_linear_memory(m, 64, Bytes{'r', 'e', 'w', 'a', 's', 'm'});
    }
    return 0;
}
}  // namespace

std::vector<ApiCase> api_cases()
{
    return {
        {"appendGlobalVariable",
            [](Module& m) { return append_global_variable(m, ValType::i32, Mutability::mutable_, ConstExpr::i32(7)); }},
        {"insertGlobalVariable",
            [](Module& m) {
                return insert_global_variable(m, m.imported_count(ExternalKind::global), ValType::i64,
                    Mutability::immutable, ConstExpr::i64(42));
            }},
        {"modifyGlobalVariable",
            [](Module& m) {
                const auto g = ensure_internal_global(m);
                const auto& old = m.global_sec.front();
                return modify_global_variable(m, g, old.type, old.mut, ConstExpr{{zero(old.type), end()}});
            }},
        {"deleteGlobalVariable",
            [](Module& m) {
                append_global_variable(m, ValType::f64, Mutability::immutable, ConstExpr::f64(1.5));
                return delete_global_variable(m, m.total_global_count() - 1);
            }},
        {"insertImportFunction",
            [](Module& m) { return insert_import_function(m, 0, "rewasm", "inserted", {ValType::i32}, {ValType::i32}); }},
        {"appendImportFunction",
            [](Module& m) { return append_import_function(m, "rewasm", "appended", {}, {}); }},
        {"modifyImportFunction",
            [](Module& m) {
                const auto f = ensure_function_import(m);
                const auto type = m.function_type(f);
                return modify_import_function(m, f, "rewasm", "renamed", type.params, type.results);
            }},
        {"deleteImportFunction",
            [](Module& m) {
                append_import_function(m, "rewasm", "doomed", {ValType::f32}, {});
                return delete_import_function(m, m.imported_count(ExternalKind::function) - 1);
            }},
        {"insertExportFunction",
            [](Module& m) { return insert_export_function(m, 0, "rewasm_inserted", pick_internal(m)); }},
        {"appendExportFunction",
            [](Module& m) { return append_export_function(m, "rewasm_appended", pick_internal(m)); }},
        {"modifyExportFunction",
            [](Module& m) {
                const auto e = ensure_function_export(m);
                return modify_export_function(m, e, m.export_sec[e].name + "_renamed", pick_internal(m));
            }},
        {"deleteExportFunction",
            [](Module& m) { return delete_export_function(m, ensure_function_export(m)); }},
        {"appendLinearMemory", [](Module& m) { return append_linear_memory(m, 1); }},
        {"modifyLinearMemory",
            [](Module& m) {
                ensure_memory(m);
                return modify_linear_memory(m, 8, Bytes{'p', 'a', 't', 'c', 'h', 'e', 'd'});
            }},
        {"insertInternalFunction",
            [](Module& m) {
                return insert_internal_function(m, m.imported_count(ExternalKind::function), {ValType::i32},
                    {ValType::i32}, {{1, ValType::i64}}, {local_get(0)});
            }},
        {"insertIndirectFunction",
            [](Module& m) {
                return insert_indirect_function(m, m.total_function_count(), {}, {ValType::i32}, {}, {i32_const(1)});
            }},
        {"insertHookFunction",
            [](Module& m) {
                const auto hooked = pick_internal(m);
                const auto type = m.function_type(hooked);
                std::vector<Instruction> body;
                for (uint32_t i = 0; i < type.params.size(); ++i)
                    body.push_back(local_get(i));
                body.push_back(call(hooked));
                return insert_hook_function(m, m.total_function_count(), hooked, body, type.params, type.results, {});
            }},
        {"deleteFuncInstr",
            [](Module& m) {
                const auto f = pick_internal(m);
                insert_func_instrs(m, f, 0, {op(Opcode::nop)});
                return delete_func_instr(m, f, 0);
            }},
        {"appendFuncInstrs",
            [](Module& m) { return append_func_instrs(m, pick_internal(m), {i32_const(1), op(Opcode::drop)}); }},
        {"insertFuncInstrs",
            [](Module& m) { return insert_func_instrs(m, pick_internal(m), 0, {i32_const(7), op(Opcode::drop)}); }},
        {"modifyFuncInstr",
            [](Module& m) {
                const auto f = pick_internal(m);
                const auto first = m.code_sec[f - m.imported_count(ExternalKind::function)].body[0];
                return modify_func_instr(m, f, 0, {first, op(Opcode::nop)});
            }},
        {"appendFuncLocal",
            [](Module& m) {
                const auto f = pick_internal(m);
                const auto before = m.code_sec[f - m.imported_count(ExternalKind::function)].local_count();
                return append_func_local(m, f, ValType::i64) >= before;
            }},
        {"modifyFuncName",
            [](Module& m) {
                const auto f = pick_internal(m);
                insert_func_name(m, f, "named");
                return modify_func_name(m, f, "renamed");
            }},
        {"deleteFuncName",
            [](Module& m) {
                const auto f = pick_internal(m);
                insert_func_name(m, f, "named");
                return delete_func_name(m, f);
            }},
        {"insertFuncName",
            [](Module& m) {
                const auto f = pick_internal(m);
                delete_func_name(m, f);
                return insert_func_name(m, f, "inserted");
            }},
        {"modifyGlobalName",
            [](Module& m) {
                const auto g = ensure_global(m);
                insert_global_name(m, g, "named");
                return modify_global_name(m, g, "renamed");
            }},
        {"deleteGlobalName",
            [](Module& m) {
                const auto g = ensure_global(m);
                insert_global_name(m, g, "named");
                return delete_global_name(m, g);
            }},
        {"insertGlobalName",
            [](Module& m) {
                const auto g = ensure_global(m);
                delete_global_name(m, g);
                return insert_global_name(m, g, "inserted");
            }},
        {"insertDataName",
            [](Module& m) {
                const auto d = ensure_data(m);
                delete_data_name(m, d);
                return insert_data_name(m, d, "inserted");
            }},
        {"modifyDataName",
            [](Module& m) {
                const auto d = ensure_data(m);
                insert_data_name(m, d, "named");
                return modify_data_name(m, d, "renamed");
            }},
        {"deleteDataName",
            [](Module& m) {
                const auto d = ensure_data(m);
                insert_data_name(m, d, "named");
                return delete_data_name(m, d);
            }},
    };
}
}  // namespace rewasm::testing
