// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

// Command-line front end.
//
//   rewasm inspect  <in.wasm> [--section <name>] [--json]
//   rewasm validate <in.wasm> [--external] [--validator <cmd>] [--config <file>]
//   rewasm apply    <in.wasm> <recipe> <out.wasm> [--seed <n>] [--dry-run]
//   rewasm stats    <in.wasm> [--json]
//
// Exit codes: 0 ok, 1 invalid module or failed step, 2 unreadable or
// unparseable input, 3 external validator missing.

#include "rewasm/binary.hpp"
#include "rewasm/errors.hpp"
#include "rewasm/script.hpp"
#include "rewasm/section_rewriter.hpp"
#include "rewasm/text.hpp"
#include "rewasm/validator.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace rewasm;

namespace
{
enum Exit : int
{
    exit_ok = 0,
    exit_invalid = 1,
    exit_unreadable = 2,
    exit_no_tool = 3,
};

struct Failure
{
    int code;
    std::string message;
};

Bytes read_file(const std::string& path)
{
    std::ifstream in{path, std::ios::binary};
    if (!in)
        throw Failure{exit_unreadable, "cannot read " + path};
    return Bytes{std::istreambuf_iterator<char>{in}, {}};
}

std::string read_text(const std::string& path)
{
    const auto bytes = read_file(path);
    return {bytes.begin(), bytes.end()};
}

ParseResult load(const std::string& path)
{
    const auto bytes = read_file(path);
    try
    {
        return parse_module(bytes);
    }
    catch (const FormatError& e)
    {
        throw Failure{exit_unreadable, path + ": " + e.what()};
    }
}

json to_json(const std::vector<ValType>& types)
{
    auto out = json::array();
    for (const auto t : types)
        out.push_back(to_string(t));
    return out;
}

json to_json(const std::optional<uint32_t>& v)
{
    return v ? json(*v) : json(nullptr);
}

json to_json(const NameMap& names)
{
    auto out = json::array();
    for (const auto& n : names)
        out.push_back({{"idx", n.idx}, {"name", n.name}});
    return out;
}

json to_json(const Element& element)
{
    return std::visit(
        [](const auto& e) -> json {
            using E = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<E, TypeElement>)
                return {{"idx", e.idx}, {"paramsType", to_json(e.params)},
                    {"resultsType", to_json(e.results)}};
            else if constexpr (std::is_same_v<E, ImportElement>)
            {
                json j{{"idx", e.idx}, {"moduleName", e.module_name}, {"name", e.name},
                    {"kind", to_string(e.kind())}};
                std::visit(
                    [&](const auto& d) {
                        using D = std::decay_t<decltype(d)>;
                        if constexpr (std::is_same_v<D, FunctionImport>)
                            j["typeIdx"] = d.type_idx;
                        else if constexpr (std::is_same_v<D, GlobalImport>)
                        {
                            j["valType"] = to_string(d.type);
                            j["mut"] = d.mut == Mutability::mutable_;
                        }
                        else
                        {
                            j["min"] = d.limits.min;
                            j["max"] = to_json(d.limits.max);
                        }
                    },
                    e.desc);
                return j;
            }
            else if constexpr (std::is_same_v<E, FunctionElement>)
                return {{"funcIdx", e.func_idx}, {"typeIdx", e.type_idx}};
            else if constexpr (std::is_same_v<E, TableElement> || std::is_same_v<E, MemoryElement>)
                return {{"min", e.min}, {"max", to_json(e.max)}};
            else if constexpr (std::is_same_v<E, GlobalElement>)
                return {{"idx", e.idx}, {"valType", to_string(e.type)},
                    {"mut", e.mut == Mutability::mutable_},
                    {"initExpr", format_instructions(e.init.instrs)}};
            else if constexpr (std::is_same_v<E, ExportElement>)
                return {{"idx", e.idx}, {"name", e.name}, {"kind", to_string(e.kind)},
                    {"targetIdx", e.target_idx}};
            else if constexpr (std::is_same_v<E, StartElement>)
                return {{"funcIdx", e.func_idx}};
            else if constexpr (std::is_same_v<E, ElemElement>)
                return {{"idx", e.idx}, {"offsetExpr", format_instructions(e.offset.instrs)},
                    {"funcIdxs", e.func_idxs}};
            else if constexpr (std::is_same_v<E, CodeElement>)
            {
                auto locals = json::array();
                for (const auto& l : e.locals)
                    locals.push_back({{"count", l.count}, {"valType", to_string(l.type)}});
                auto body = json::array();
                for (const auto& i : e.body)
                    body.push_back(format_instruction(i));
                return {{"funcIdx", e.func_idx}, {"locals", locals}, {"body", body}};
            }
            else if constexpr (std::is_same_v<E, DataElement>)
                return {{"idx", e.idx}, {"memIdx", e.mem_idx},
                    {"offsetExpr", format_instructions(e.offset.instrs)},
                    {"initData", to_hex(e.init)}};
            else
            {
                json j{{"name", e.name}};
                if (const auto* names = std::get_if<NameSection>(&e.payload))
                {
                    if (names->module_name)
                        j["module"] = *names->module_name;
                    j["functions"] = to_json(names->functions);
                    auto locals = json::array();
                    for (const auto& l : names->locals)
                        locals.push_back({{"funcIdx", l.idx}, {"names", to_json(l.names)}});
                    j["locals"] = locals;
                    j["globals"] = to_json(names->globals);
                    j["data"] = to_json(names->data);
                }
                else
                    j["size"] = std::get<Bytes>(e.payload).size();
                return j;
            }
        },
        element);
}

std::optional<SectionKind> parse_section(const std::string& name)
{
    if (name.empty())
        return std::nullopt;
    const auto kind = section_kind_from_string(name);
    if (!kind)
        throw Failure{exit_unreadable, "unknown section '" + name + "'"};
    return kind;
}

int cmd_inspect(const std::string& input, const std::string& section, bool as_json)
{
    const auto only = parse_section(section);
    const auto bytes = read_file(input);
    ParseResult parsed;
    try
    {
        parsed = parse_module(bytes);
    }
    catch (const FormatError& e)
    {
        throw Failure{exit_unreadable, input + ": " + e.what()};
    }
    const auto& m = parsed.module;
    if (as_json)
    {
        json j{{"file", input}, {"size", bytes.size()}, {"version", 1}};
        json sections = json::object();
        for (uint8_t k = 0; k <= static_cast<uint8_t>(SectionKind::custom); ++k)
        {
            const auto kind = static_cast<SectionKind>(k);
            if ((only && *only != kind) || section_size(m, kind) == 0)
                continue;
            auto items = json::array();
            for (size_t pos = 0; pos < section_size(m, kind); ++pos)
                items.push_back(to_json(element_at(m, kind, pos)));
            sections[std::string{to_string(kind)}] = items;
        }
        j["sections"] = sections;
        auto warnings = json::array();
        for (const auto& w : parsed.diagnostics.warnings)
            warnings.push_back({{"offset", w.offset}, {"message", w.message}});
        j["warnings"] = warnings;
        std::cout << j.dump(2) << '\n';
        return exit_ok;
    }
    if (!only)
        std::cout << "; " << input << ": wasm version 1, " << bytes.size() << " bytes\n";
    for (const auto& line : format_module(m, only))
        std::cout << line << '\n';
    for (const auto& w : parsed.diagnostics.warnings)
        std::cerr << "warning at 0x" << std::hex << w.offset << std::dec << ": " << w.message << '\n';
    return exit_ok;
}

std::optional<std::string> configured_validator(
    const std::string& flag, const std::string& config_path)
{
    if (!flag.empty())
        return flag;
    if (const auto env = validator_command_from_env())
        return env;
    if (!config_path.empty())
    {
        json config;
        try
        {
            config = json::parse(read_text(config_path));
        }
        catch (const json::exception& e)
        {
            throw Failure{exit_unreadable, config_path + ": " + e.what()};
        }
        if (config.contains("validator") && config["validator"].is_string())
            return config["validator"].get<std::string>();
    }
    return std::nullopt;
}

int cmd_validate(const std::string& input, bool external, const std::string& validator,
    const std::string& config_path)
{
    const auto bytes = read_file(input);
    ParseResult parsed;
    try
    {
        parsed = parse_module(bytes);
    }
    catch (const FormatError& e)
    {
        throw Failure{exit_unreadable, input + ": " + e.what()};
    }
    const auto diagnostics = validate_structure(parsed.module);
    for (const auto& d : diagnostics)
        std::cout << to_string(d) << '\n';
    int code = has_errors(diagnostics) ? exit_invalid : exit_ok;
    if (external)
    {
        const auto command = configured_validator(validator, config_path);
        if (!command)
            throw Failure{exit_no_tool,
                std::string{"no external validator configured (set "} + validator_env + ")"};
        ExternalResult result;
        try
        {
            result = validate_external(bytes, command);
        }
        catch (const EnvironmentError& e)
        {
            throw Failure{exit_no_tool, e.what()};
        }
        if (!result.tool_output.empty())
            std::cout << result.tool_output;
        if (!result.accepted())
        {
            std::cout << "external validator rejected the module (exit " << result.exit_code
                      << ")\n";
            code = exit_invalid;
        }
    }
    if (code == exit_ok)
        std::cout << input << ": valid\n";
    return code;
}

void write_atomically(const std::string& path, const Bytes& bytes)
{
    const fs::path target{path};
    auto tmp = target;
    tmp += ".tmp-" + std::to_string(
        std::chrono::steady_clock::now().time_since_epoch().count());
    {
        std::ofstream out{tmp, std::ios::binary | std::ios::trunc};
        if (!out)
            throw Failure{exit_invalid, "cannot write " + tmp.string()};
        out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
        if (!out)
        {
            out.close();
            fs::remove(tmp);
            throw Failure{exit_invalid, "cannot write " + tmp.string()};
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec)
    {
        fs::remove(tmp);
        throw Failure{exit_invalid, "cannot write " + path + ": " + ec.message()};
    }
}

int cmd_apply(const std::string& input, const std::string& recipe, const std::string& output,
    uint64_t seed, bool dry_run)
{
    auto parsed = load(input);
    auto& m = parsed.module;
    std::vector<ScriptStep> steps;
    try
    {
        steps = parse_script(read_text(recipe));
    }
    catch (const SyntaxError& e)
    {
        throw Failure{exit_unreadable, recipe + ": " + e.what()};
    }
    const ScriptOptions options{seed};
    for (size_t i = 0; i < steps.size(); ++i)
    {
        const auto& step = steps[i];
        const auto where = "step " + std::to_string(i + 1) + " (line " +
                           std::to_string(step.line) + ", " + step.api + ")";
        StepOutcome outcome;
        try
        {
            outcome = run_step(m, step, options);
        }
        catch (const Error& e)
        {
            throw Failure{exit_invalid, where + ": " + e.what()};
        }
        if (!outcome.success)
            throw Failure{exit_invalid, where + ": " + outcome.message};
        if (dry_run)
        {
            std::cout << where << ": ok";
            if (!outcome.message.empty())
                std::cout << ", " << outcome.message;
            std::cout << '\n';
            for (const auto& d : outcome.deltas)
                std::cout << "  delta " << to_string(d) << '\n';
        }
    }
    const auto diagnostics = validate_structure(m);
    if (dry_run)
    {
        for (const auto& d : diagnostics)
            std::cout << to_string(d) << '\n';
        std::cout << steps.size() << " step(s) planned; nothing written\n";
        return has_errors(diagnostics) ? exit_invalid : exit_ok;
    }
    if (has_errors(diagnostics))
    {
        for (const auto& d : diagnostics)
            std::cerr << to_string(d) << '\n';
        throw Failure{exit_invalid, "rewritten module is invalid; nothing written"};
    }
    Bytes bytes;
    try
    {
        bytes = encode_module(m);
    }
    catch (const Error& e)
    {
        throw Failure{exit_invalid, e.what()};
    }
    write_atomically(output, bytes);
    std::cout << output << ": " << steps.size() << " step(s) applied, " << bytes.size()
              << " bytes\n";
    return exit_ok;
}

int cmd_stats(const std::string& input, bool as_json)
{
    const auto bytes = read_file(input);
    ParseResult parsed;
    const auto t0 = std::chrono::steady_clock::now();
    try
    {
        parsed = parse_module(bytes);
    }
    catch (const FormatError& e)
    {
        throw Failure{exit_unreadable, input + ": " + e.what()};
    }
    const auto t1 = std::chrono::steady_clock::now();
    const auto encoded = encode_module(parsed.module);
    const auto t2 = std::chrono::steady_clock::now();
    const auto& m = parsed.module;

    size_t instructions = 0;
    for (const auto& c : m.code_sec)
        instructions += c.body.size();
    const auto ms = [](auto d) { return std::chrono::duration<double, std::milli>(d).count(); };

    json j{{"file", input}, {"size", bytes.size()}, {"encodedSize", encoded.size()},
        {"identicalBytes", encoded == bytes}};
    json counts = json::object();
    for (uint8_t k = 0; k <= static_cast<uint8_t>(SectionKind::custom); ++k)
    {
        const auto kind = static_cast<SectionKind>(k);
        counts[std::string{to_string(kind)}] = section_size(m, kind);
    }
    j["elements"] = counts;
    j["functions"] = {{"imported", m.imported_count(ExternalKind::function)},
        {"total", m.total_function_count()}};
    j["globals"] = m.total_global_count();
    j["instructions"] = instructions;
    j["nonMinimalLeb128"] = parsed.diagnostics.non_minimal_leb_count;
    j["parseMs"] = ms(t1 - t0);
    j["encodeMs"] = ms(t2 - t1);
    if (as_json)
    {
        std::cout << j.dump(2) << '\n';
        return exit_ok;
    }
    std::cout << input << '\n';
    std::cout << "  size            " << bytes.size() << " bytes (re-encoded " << encoded.size()
              << (encoded == bytes ? ", identical" : "") << ")\n";
    for (const auto& [name, n] : counts.items())
        std::cout << "  " << name << std::string(16 - name.size(), ' ') << n.get<size_t>() << '\n';
    std::cout << "  functions       " << m.total_function_count() << " ("
              << m.imported_count(ExternalKind::function) << " imported)\n";
    std::cout << "  instructions    " << instructions << '\n';
    std::cout << "  parse/encode    " << ms(t1 - t0) << " ms / " << ms(t2 - t1) << " ms\n";
    return exit_ok;
}
}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Static rewriting toolkit for WebAssembly binaries"};
    app.require_subcommand(1);

    std::string input, recipe, output, section, validator, config;
    bool as_json = false, external = false, dry_run = false;
    uint64_t seed = 0;

    auto* inspect = app.add_subcommand("inspect", "Print the elements of every section");
    inspect->add_option("input", input, "Wasm binary")->required();
    inspect->add_option("--section", section, "Only this section (type, import, ...)");
    inspect->add_flag("--json", as_json, "Structured output");

    auto* validate = app.add_subcommand("validate", "Check a binary");
    validate->add_option("input", input, "Wasm binary")->required();
    validate->add_flag("--external", external, "Also run the external validator");
    validate->add_option("--validator", validator,
        "External validator command; {} stands for the file path");
    validate->add_option("--config", config, "JSON file with a \"validator\" entry");

    auto* apply = app.add_subcommand("apply", "Run a recipe over a binary");
    apply->add_option("input", input, "Wasm binary")->required();
    apply->add_option("recipe", recipe, "Recipe file")->required();
    apply->add_option("output", output, "Output binary");
    apply->add_option("--seed", seed, "Seed for steps with random choices");
    apply->add_flag("--dry-run", dry_run, "Print the planned deltas, write nothing");

    auto* stats = app.add_subcommand("stats", "Print section sizes and codec timings");
    stats->add_option("input", input, "Wasm binary")->required();
    stats->add_flag("--json", as_json, "Structured output");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const auto code = app.exit(e);
        return code == 0 ? exit_ok : exit_unreadable;
    }

    try
    {
        if (inspect->parsed())
            return cmd_inspect(input, section, as_json);
        if (validate->parsed())
            return cmd_validate(input, external, validator, config);
        if (apply->parsed())
        {
            if (output.empty() && !dry_run)
                throw Failure{exit_unreadable, "apply: missing output path"};
            return cmd_apply(input, recipe, output, seed, dry_run);
        }
        return cmd_stats(input, as_json);
    }
    catch (const Failure& f)
    {
        std::cerr << "rewasm: " << f.message << '\n';
        return f.code;
    }
    catch (const Error& e)
    {
        std::cerr << "rewasm: " << e.what() << '\n';
        return exit_invalid;
    }
}
