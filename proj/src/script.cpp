// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rewasm/script.hpp"
#include "rewasm/errors.hpp"
#include "rewasm/recipes.hpp"
#include "rewasm/references.hpp"
#include "rewasm/semantics.hpp"
#include "rewasm/text.hpp"
#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <optional>
#include <random>

namespace rewasm
{
namespace
{
std::string normalize(std::string_view name)
{
    std::string out;
    for (const char c : name)
        if (c != '-' && c != '_')
            out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Tokenizing.

std::vector<std::string> tokenize(std::string_view line, uint32_t line_no)
{
    std::vector<std::string> tokens;
    std::string current;
    bool in_token = false;
    int brackets = 0;
    auto fail = [&](const std::string& why) {
        throw SyntaxError{"line " + std::to_string(line_no) + ": " + why};
    };
    for (size_t i = 0; i < line.size(); ++i)
    {
        const char c = line[i];
        if (c == '"')
        {
            in_token = true;
            for (++i;; ++i)
            {
                if (i >= line.size())
                    fail("unterminated string");
                const char q = line[i];
                if (q == '"')
                    break;
                if (q != '\\')
                {
                    current += q;
                    continue;
                }
                if (++i >= line.size())
                    fail("unterminated escape");
                switch (line[i])
                {
                case 'n':
                    current += '\n';
                    break;
                case 't':
                    current += '\t';
                    break;
                case 'x':
                {
                    if (i + 2 >= line.size())
                        fail("bad \\x escape");
                    uint8_t b = 0;
                    std::from_chars(line.data() + i + 1, line.data() + i + 3, b, 16);
                    current += static_cast<char>(b);
                    i += 2;
                    break;
                }
                default:
                    current += line[i];
                }
            }
            continue;
        }
        if (c == '#' && brackets == 0)
            break;
        if (c == '[')
            ++brackets;
        else if (c == ']')
            --brackets;
        if (std::isspace(static_cast<unsigned char>(c)) && brackets == 0)
        {
            if (in_token)
                tokens.push_back(std::move(current));
            current.clear();
            in_token = false;
            continue;
        }
        current += c;
        in_token = true;
    }
    if (brackets != 0)
        fail("unbalanced brackets");
    if (in_token)
        tokens.push_back(std::move(current));
    return tokens;
}

bool is_key(std::string_view s)
{
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    }) && std::isalpha(static_cast<unsigned char>(s[0]));
}

// Argument binding.

const std::multimap<std::string, std::string>& key_aliases()
{
    static const std::multimap<std::string, std::string> aliases = {
        {"init", "initvalue"},
        {"value", "initvalue"},
        {"type", "valtype"},
        {"mutable", "mut"},
        {"params", "paramstype"},
        {"results", "resultstype"},
        {"body", "funcbody"},
        {"body", "instrs"},
        {"instrs", "funcbody"},
        {"instructions", "instrs"},
        {"instructions", "funcbody"},
        {"module", "modulename"},
        {"module", "hooksmodulename"},
        {"name", "funcname"},
        {"func", "funcidx"},
        {"function", "funcidx"},
        {"callee", "calleefuncidx"},
        {"hooked", "hookedfuncidx"},
        {"pages", "pagenum"},
        {"data", "bytes"},
        {"sp", "stackpointerglobalidx"},
        {"stackpointer", "stackpointerglobalidx"},
        {"frame", "framesize"},
        {"pos", "idx"},
        {"position", "idx"},
        {"index", "idx"},
        {"global", "globalidx"},
        {"instr", "target"},
    };
    return aliases;
}

class Args
{
public:
    Args(const ScriptStep& step, const std::vector<std::string>& params)
      : m_step{step}, m_params{params}
    {
        if (step.positional.size() > params.size())
            fail("takes at most " + std::to_string(params.size()) + " argument(s)");
        for (size_t i = 0; i < step.positional.size(); ++i)
            bind(normalize(params[i]), step.positional[i]);
        for (const auto& [key, value] : step.named)
            bind(resolve_key(key), value);
    }

    bool has(std::string_view name) const { return m_values.contains(normalize(name)); }

    const std::string& str(std::string_view name) const
    {
        const auto it = m_values.find(normalize(name));
        if (it == m_values.end())
            fail("missing argument '" + std::string{name} + "'");
        return it->second;
    }

    uint32_t u32(std::string_view name) const { return integer<uint32_t>(name); }
    int64_t i64(std::string_view name) const { return integer<int64_t>(name); }
    uint64_t u64(std::string_view name) const { return integer<uint64_t>(name); }

    template <typename T>
    T integer(std::string_view name) const
    {
        const auto& text = str(name);
        std::string_view digits = text;
        bool negative = false;
        if (!digits.empty() && digits[0] == '-')
        {
            negative = true;
            digits.remove_prefix(1);
        }
        int base = 10;
        if (digits.starts_with("0x") || digits.starts_with("0X"))
        {
            base = 16;
            digits.remove_prefix(2);
        }
        uint64_t magnitude = 0;
        const auto r = std::from_chars(digits.data(), digits.data() + digits.size(), magnitude, base);
        if (digits.empty() || r.ec != std::errc{} || r.ptr != digits.data() + digits.size())
            fail("argument '" + std::string{name} + "' is not an integer: " + text);
        if constexpr (std::is_signed_v<T>)
        {
            if (magnitude > static_cast<uint64_t>(std::numeric_limits<T>::max()) + negative)
                fail("argument '" + std::string{name} + "' is out of range");
            return negative ? static_cast<T>(0 - magnitude) : static_cast<T>(magnitude);
        }
        else
        {
            if (negative || magnitude > std::numeric_limits<T>::max())
                fail("argument '" + std::string{name} + "' is out of range");
            return static_cast<T>(magnitude);
        }
    }

    ValType valtype(std::string_view name) const
    {
        const auto t = valtype_from_string(str(name));
        if (!t)
            fail("argument '" + std::string{name} + "' is not a value type: " + str(name));
        return *t;
    }

    ValTypes valtypes(std::string_view name) const
    {
        if (!has(name))
            return {};
        ValTypes out;
        for (const auto& item : list_items(str(name)))
        {
            if (item == "none")
                continue;
            const auto t = valtype_from_string(item);
            if (!t)
                fail("'" + item + "' in argument '" + std::string{name} + "' is not a value type");
            out.push_back(*t);
        }
        return out;
    }

    Mutability mut(std::string_view name) const
    {
        if (!has(name))
            return Mutability::immutable;
        const auto v = normalize(str(name));
        if (v == "1" || v == "0x01" || v == "var" || v == "mut" || v == "mutable" || v == "true")
            return Mutability::mutable_;
        if (v == "0" || v == "0x00" || v == "const" || v == "immutable" || v == "false")
            return Mutability::immutable;
        fail("argument '" + std::string{name} + "' is not a mutability flag: " + str(name));
    }

    ConstExpr init(std::string_view name, ValType type) const
    {
        if (!has(name))
            return zero(type);
        const auto& text = str(name);
        if (text.starts_with("global.get"))
        {
            const auto instrs = parse_instructions(text);
            return ConstExpr{{instrs.at(0), ins::end()}};
        }
        switch (type)
        {
        case ValType::i32:
        {
            const auto v = integer<int64_t>(name);
            if (v < std::numeric_limits<int32_t>::min() || v > 0xFFFFFFFFLL)
                fail("argument '" + std::string{name} + "' does not fit i32");
            return ConstExpr::i32(static_cast<int32_t>(static_cast<uint32_t>(v)));
        }
        case ValType::i64:
            return ConstExpr::i64(integer<int64_t>(name));
        case ValType::f32:
            return {{parse_instruction("f32.const " + text), ins::end()}};
        case ValType::f64:
            return {{parse_instruction("f64.const " + text), ins::end()}};
        }
        return zero(type);
    }

    std::vector<Local> locals(std::string_view name) const
    {
        std::vector<Local> out;
        if (!has(name))
            return out;
        for (const auto& item : list_items(str(name)))
        {
            uint32_t count = 1;
            std::string type = item;
            if (const auto colon = item.find(':'); colon != std::string::npos)
            {
                count = parse_count(item.substr(0, colon));
                type = item.substr(colon + 1);
            }
            else if (const auto star = item.find('*'); star != std::string::npos)
            {
                count = parse_count(item.substr(star + 1));
                type = item.substr(0, star);
            }
            const auto t = valtype_from_string(type);
            if (!t)
                fail("'" + item + "' is not a local declaration");
            out.push_back(Local{count, *t});
        }
        return out;
    }

    Body body(std::string_view name) const
    {
        if (!has(name))
            return {};
        return parse_instructions(str(name));
    }

    Bytes bytes(std::string_view name) const
    {
        const auto& text = str(name);
        if (text.starts_with("utf8:"))
            return Bytes(text.begin() + 5, text.end());
        return from_hex(text);
    }

    [[noreturn]] void fail(const std::string& why) const
    {
        throw SyntaxError{"line " + std::to_string(m_step.line) + ": " + m_step.api + ": " + why};
    }

private:
    const ScriptStep& m_step;
    const std::vector<std::string>& m_params;
    std::map<std::string, std::string> m_values;

    static ConstExpr zero(ValType type)
    {
        switch (type)
        {
        case ValType::i32:
            return ConstExpr::i32(0);
        case ValType::i64:
            return ConstExpr::i64(0);
        case ValType::f32:
            return ConstExpr::f32(0);
        case ValType::f64:
            return ConstExpr::f64(0);
        }
        return ConstExpr::i32(0);
    }

    uint32_t parse_count(std::string_view text) const
    {
        uint32_t v = 0;
        const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
        if (r.ec != std::errc{} || r.ptr != text.data() + text.size() || v == 0)
            fail("bad local count '" + std::string{text} + "'");
        return v;
    }

    static std::vector<std::string> list_items(std::string_view text)
    {
        std::vector<std::string> items;
        std::string current;
        for (const char c : text)
        {
            if (c == '[' || c == ']' || c == '"' || c == '\'')
                continue;
            if (c == ',' || std::isspace(static_cast<unsigned char>(c)))
            {
                if (!current.empty())
                    items.push_back(std::move(current));
                current.clear();
                continue;
            }
            current += c;
        }
        if (!current.empty())
            items.push_back(std::move(current));
        return items;
    }

    bool is_param(const std::string& key) const
    {
        return std::any_of(m_params.begin(), m_params.end(),
            [&](const std::string& p) { return normalize(p) == key; });
    }

    std::string resolve_key(const std::string& raw) const
    {
        const auto key = normalize(raw);
        if (is_param(key))
            return key;
        const auto [lo, hi] = key_aliases().equal_range(key);
        for (auto it = lo; it != hi; ++it)
            if (is_param(it->second))
                return it->second;
        fail("unknown argument '" + raw + "'");
    }

    void bind(const std::string& key, const std::string& value)
    {
        if (!m_values.emplace(key, value).second)
            fail("argument '" + key + "' given twice");
    }
};

struct Command
{
    std::string name;
    std::vector<std::string> params;
    std::function<StepOutcome(Module&, const Args&, const ScriptOptions&)> run;
};

StepOutcome done(bool ok, std::string message = {})
{
    if (!ok && message.empty())
        message = "target not found; nothing changed";
    return {ok, std::move(message), {}};
}

const std::vector<Command>& commands()
{
    static const std::vector<Command> table = {
        // Globals.
        {"appendGlobalVariable", {"valType", "mut", "initValue"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                const auto t = a.valtype("valType");
                const auto idx = m.total_global_count();
                append_global_variable(m, t, a.mut("mut"), a.init("initValue", t));
                return done(true, "global " + std::to_string(idx));
            }},
        {"insertGlobalVariable", {"idx", "valType", "mut", "initValue"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                const auto t = a.valtype("valType");
                const auto idx = a.u32("idx");
                insert_global_variable(m, idx, t, a.mut("mut"), a.init("initValue", t));
                return done(true, "global " + std::to_string(idx));
            }},
        {"insertGlobal", {"valType", "mut", "initValue", "idx"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                const auto t = a.valtype("valType");
                const auto idx = a.has("idx") ? a.u32("idx") : m.total_global_count();
                insert_global_variable(m, idx, t, a.mut("mut"), a.init("initValue", t));
                return done(true, "global " + std::to_string(idx));
            }},
        {"modifyGlobalVariable", {"idx", "valType", "mut", "initValue"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                const auto t = a.valtype("valType");
                return done(
                    modify_global_variable(m, a.u32("idx"), t, a.mut("mut"), a.init("initValue", t)));
            }},
        {"deleteGlobalVariable", {"idx"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                return done(delete_global_variable(m, a.u32("idx")));
            }},

        // Imports and exports.
        {"insertImportFunction", {"idx", "moduleName", "funcName", "paramsType", "resultsType"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                return done(insert_import_function(m, a.u32("idx"), a.str("moduleName"),
                    a.str("funcName"), a.valtypes("paramsType"), a.valtypes("resultsType")));
            }},
        {"appendImportFunction", {"moduleName", "funcName", "paramsType", "resultsType"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                const auto idx = m.imported_count(ExternalKind::function);
                append_import_function(m, a.str("moduleName"), a.str("funcName"),
                    a.valtypes("paramsType"), a.valtypes("resultsType"));
                return done(true, "function " + std::to_string(idx));
            }},
        {"modifyImportFunction", {"idx", "moduleName", "funcName", "paramsType", "resultsType"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                return done(modify_import_function(m, a.u32("idx"), a.str("moduleName"),
                    a.str("funcName"), a.valtypes("paramsType"), a.valtypes("resultsType")));
            }},
        {"deleteImportFunction", {"idx"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                return done(delete_import_function(m, a.u32("idx")));
            }},
        {"insertExportFunction", {"idx", "funcName", "funcIdx"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                return done(
                    insert_export_function(m, a.u32("idx"), a.str("funcName"), a.u32("funcIdx")));
            }},
        {"appendExportFunction", {"funcName", "funcIdx"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                return done(append_export_function(m, a.str("funcName"), a.u32("funcIdx")));
            }},
        {"modifyExportFunction", {"idx", "funcName", "funcIdx"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                return done(
                    modify_export_function(m, a.u32("idx"), a.str("funcName"), a.u32("funcIdx")));
            }},
        {"deleteExportFunction", {"idx"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                return done(delete_export_function(m, a.u32("idx")));
            }},

        // Memory.
        {"appendLinearMemory", {"pageNum"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                return done(append_linear_memory(m, a.u32("pageNum")));
            }},
        {"modifyLinearMemory", {"offset", "bytes"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                return done(modify_linear_memory(m, a.u32("offset"), a.bytes("bytes")));
            }},

        // Functions.
        {"insertInternalFunction", {"funcIdx", "paramsType", "resultsType", "locals", "funcBody"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                return done(insert_internal_function(m, a.u32("funcIdx"), a.valtypes("paramsType"),
                    a.valtypes("resultsType"), a.locals("locals"), a.body("funcBody")));
            }},
        {"appendInternalFunction", {"paramsType", "resultsType", "locals", "funcBody"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                const auto idx = m.total_function_count();
                append_internal_function(m, a.valtypes("paramsType"), a.valtypes("resultsType"),
                    a.locals("locals"), a.body("funcBody"));
                return done(true, "function " + std::to_string(idx));
            }},
        {"insertIndirectFunction", {"funcIdx", "paramsType", "resultsType", "locals", "funcBody"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                return done(insert_indirect_function(m, a.u32("funcIdx"), a.valtypes("paramsType"),
                    a.valtypes("resultsType"), a.locals("locals"), a.body("funcBody")));
            }},
        {"insertHookFunction",
            {"funcIdx", "hookedFuncIdx", "funcBody", "paramsType", "resultsType", "locals"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                return done(insert_hook_function(m, a.u32("funcIdx"), a.u32("hookedFuncIdx"),
                    a.body("funcBody"), a.valtypes("paramsType"), a.valtypes("resultsType"),
                    a.locals("locals")));
            }},
        {"deleteFuncInstr", {"funcIdx", "offset"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                return done(delete_func_instr(m, a.u32("funcIdx"), a.u32("offset")));
            }},
        {"appendFuncInstrs", {"funcIdx", "instrs"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                return done(append_func_instrs(m, a.u32("funcIdx"), a.body("instrs")));
            }},
        {"insertFuncInstrs", {"funcIdx", "offset", "instrs"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                return done(
                    insert_func_instrs(m, a.u32("funcIdx"), a.u32("offset"), a.body("instrs")));
            }},
        {"modifyFuncInstr", {"funcIdx", "offset", "instrs", "target"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                if (a.has("target"))
                    return done(
                        modify_func_instr(m, parse_instruction(a.str("target")), a.body("instrs")));
                return done(
                    modify_func_instr(m, a.u32("funcIdx"), a.u32("offset"), a.body("instrs")));
            }},
        {"appendFuncLocal", {"funcIdx", "valType"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                const auto idx = append_func_local(m, a.u32("funcIdx"), a.valtype("valType"));
                return done(true, "local " + std::to_string(idx));
            }},

        // Names.
        {"modifyFuncName", {"funcIdx", "name"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                return done(modify_func_name(m, a.u32("funcIdx"), a.str("name")));
            }},
        {"deleteFuncName", {"funcIdx"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                return done(delete_func_name(m, a.u32("funcIdx")));
            }},
        {"insertFuncName", {"funcIdx", "name"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                return done(insert_func_name(m, a.u32("funcIdx"), a.str("name")), "name exists");
            }},
        {"modifyGlobalName", {"globalIdx", "name"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                return done(modify_global_name(m, a.u32("globalIdx"), a.str("name")));
            }},
        {"deleteGlobalName", {"globalIdx"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                return done(delete_global_name(m, a.u32("globalIdx")));
            }},
        {"insertGlobalName", {"globalIdx", "name"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                return done(insert_global_name(m, a.u32("globalIdx"), a.str("name")), "name exists");
            }},
        {"insertDataName", {"dataIdx", "name"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                return done(insert_data_name(m, a.u32("dataIdx"), a.str("name")), "name exists");
            }},
        {"modifyDataName", {"dataIdx", "name"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                return done(modify_data_name(m, a.u32("dataIdx"), a.str("name")));
            }},
        {"deleteDataName", {"dataIdx"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                return done(delete_data_name(m, a.u32("dataIdx")));
            }},

        // Case-study recipes.
        {"instrumentCall", {"calleeFuncIdx", "hooksModuleName"},
            [](Module& m, const Args& a, const ScriptOptions&) {
                const auto hooks = a.has("hooksModuleName") ? a.str("hooksModuleName") : "hooks";
                return done(instrument_call(m, a.u32("calleeFuncIdx"), hooks));
            }},
        {"hardenStackCanary", {"calleeFuncIdx", "canary", "frameSize", "stackPointerGlobalIdx"},
            [](Module& m, const Args& a, const ScriptOptions& o) {
                int64_t canary = 0;
                if (a.has("canary"))
                    canary = a.i64("canary");
                else
                {
                    std::mt19937_64 rng{o.seed};
                    canary = std::uniform_int_distribution<int64_t>{1, 10000}(rng);
                }
                const auto frame = a.has("frameSize") ? a.u32("frameSize") : 16;
                const auto sp = a.has("stackPointerGlobalIdx") ? a.u32("stackPointerGlobalIdx") : 0;
                const auto hook = m.total_function_count();
                harden_stack_canary(m, a.u32("calleeFuncIdx"), canary, frame, sp);
                return done(true, "hook function " + std::to_string(hook) + ", canary " +
                                      std::to_string(canary));
            }},
        {"mutateInsertFunction", {"seed"},
            [](Module& m, const Args& a, const ScriptOptions& o) {
                const auto r = mutate_insert_function(m, a.has("seed") ? a.u64("seed") : o.seed);
                return done(r.success, "inserted function " + std::to_string(r.inserted_func_idx));
            }},
    };
    return table;
}

const std::map<std::string, std::string>& name_aliases()
{
    static const std::map<std::string, std::string> aliases = {
        {"modifyfunctioninstr", "modifyfuncinstr"},
        {"appendfunctionlocal", "appendfunclocal"},
        {"modifyfunctionname", "modifyfuncname"},
    };
    return aliases;
}

const Command* find_command(std::string_view name)
{
    auto key = normalize(name);
    if (const auto it = name_aliases().find(key); it != name_aliases().end())
        key = it->second;
    for (const auto& c : commands())
        if (normalize(c.name) == key)
            return &c;
    return nullptr;
}
}  // namespace

std::vector<ScriptStep> parse_script(std::string_view text)
{
    std::vector<ScriptStep> steps;
    uint32_t line_no = 0;
    size_t start = 0;
    while (start < text.size())
    {
        auto stop = text.find('\n', start);
        if (stop == std::string_view::npos)
            stop = text.size();
        ++line_no;
        auto tokens = tokenize(text.substr(start, stop - start), line_no);
        start = stop + 1;
        if (tokens.empty())
            continue;
        ScriptStep step;
        step.line = line_no;
        step.api = tokens[0];
        if (find_command(step.api) == nullptr)
            throw SyntaxError{"line " + std::to_string(line_no) + ": unknown step '" + step.api + "'"};
        for (size_t i = 1; i < tokens.size(); ++i)
        {
            const auto& t = tokens[i];
            const auto eq = t.find('=');
            if (eq != std::string::npos && is_key(std::string_view{t}.substr(0, eq)))
                step.named.emplace_back(t.substr(0, eq), t.substr(eq + 1));
            else if (!step.named.empty())
                throw SyntaxError{"line " + std::to_string(line_no) +
                                  ": positional argument after key=value"};
            else
                step.positional.push_back(t);
        }
        steps.push_back(std::move(step));
    }
    return steps;
}

StepOutcome run_step(Module& module, const ScriptStep& step, const ScriptOptions& options)
{
    const auto* command = find_command(step.api);
    if (command == nullptr)
        throw SyntaxError{"line " + std::to_string(step.line) + ": unknown step '" + step.api + "'"};
    const Args args{step, command->params};
    DeltaRecorder recorder;
    auto outcome = command->run(module, args, options);
    outcome.deltas = recorder.deltas();
    return outcome;
}

std::vector<std::string> script_api_names()
{
    std::vector<std::string> names;
    for (const auto& c : commands())
        names.push_back(c.name);
    return names;
}
}  // namespace rewasm
