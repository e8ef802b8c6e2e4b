// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rewasm/binary.hpp"
#include "rewasm/errors.hpp"
#include "rewasm/leb128.hpp"
#include <algorithm>

namespace rewasm
{
namespace
{
class Writer
{
public:
    void u8(uint8_t byte) { m_out.push_back(byte); }
    void u32(uint64_t value) { encode_uleb128(value, m_out); }
    void s64(int64_t value) { encode_sleb128(value, m_out); }

    void fixed32(uint32_t value)
    {
        for (int i = 0; i < 4; ++i)
            u8(static_cast<uint8_t>(value >> (8 * i)));
    }

    void fixed64(uint64_t value)
    {
        fixed32(static_cast<uint32_t>(value));
        fixed32(static_cast<uint32_t>(value >> 32));
    }

    void bytes(std::span<const uint8_t> data) { m_out.insert(m_out.end(), data.begin(), data.end()); }

    void name(std::string_view text)
    {
        u32(text.size());
        m_out.insert(m_out.end(), text.begin(), text.end());
    }

    void valtype(ValType t) { u8(static_cast<uint8_t>(t)); }

    void limits(uint32_t min, const std::optional<uint32_t>& max)
    {
        u8(max ? 0x01 : 0x00);
        u32(min);
        if (max)
            u32(*max);
    }

    /// Emits `payload` prefixed by its size.
    void sized(const Bytes& payload)
    {
        u32(payload.size());
        bytes(payload);
    }

    Bytes& data() noexcept { return m_out; }

private:
    Bytes m_out;
};

void write_instruction(Writer& out, const Instruction& instr)
{
    const auto code = static_cast<uint16_t>(instr.opcode);
    if (code > 0xFF)
    {
        out.u8(static_cast<uint8_t>(code >> 8));
        out.u32(code & 0xFF);
    }
    else
        out.u8(static_cast<uint8_t>(code));

    if (instr.opcode == Opcode::br_table)
    {
        if (instr.immediates.empty())
            throw EncodeError{"br_table without a default label"};
        out.u32(instr.immediates.size() - 1);
    }

    for (const auto& imm : instr.immediates)
    {
        std::visit(
            [&out](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, BlockType>)
                {
                    switch (v.kind)
                    {
                    case BlockType::Kind::empty:
                        out.u8(0x40);
                        break;
                    case BlockType::Kind::value:
                        out.valtype(v.value);
                        break;
                    case BlockType::Kind::type_index:
                        out.s64(v.type_index);
                        break;
                    }
                }
                else if constexpr (std::is_same_v<T, MemArg>)
                {
                    out.u32(v.align);
                    out.u32(v.offset);
                }
                else if constexpr (std::is_same_v<T, MemIdx>)
                    out.u8(static_cast<uint8_t>(v.value));
                else if constexpr (std::is_same_v<T, I32>)
                    out.s64(v.value);
                else if constexpr (std::is_same_v<T, I64>)
                    out.s64(v.value);
                else if constexpr (std::is_same_v<T, F32>)
                    out.fixed32(v.bits);
                else if constexpr (std::is_same_v<T, F64>)
                    out.fixed64(v.bits);
                else
                    out.u32(v.value);  // every index immediate
            },
            imm);
    }
}

void write_expression(Writer& out, const std::vector<Instruction>& instrs)
{
    for (const auto& instr : instrs)
        write_instruction(out, instr);
}

void write_name_map(Writer& out, const NameMap& map)
{
    out.u32(map.size());
    for (const auto& [idx, name] : map)
    {
        out.u32(idx);
        out.name(name);
    }
}

void check_encodable(const Module& m)
{
    if (m.func_sec.size() != m.code_sec.size())
        throw EncodeError{"function section has " + std::to_string(m.func_sec.size()) +
                          " entries but code section has " + std::to_string(m.code_sec.size()) +
                          " (every internal function needs exactly one body)"};
    for (size_t i = 0; i < m.code_sec.size(); ++i)
    {
        const auto& body = m.code_sec[i].body;
        if (body.empty() || body.back().opcode != Opcode::end)
            throw EncodeError{"code entry " + std::to_string(i) +
                              " is not terminated by an end instruction"};
    }
    for (const auto& g : m.global_sec)
        if (g.init.instrs.empty() || g.init.instrs.back().opcode != Opcode::end)
            throw EncodeError{"global initializer is not terminated by end"};
}

Bytes encode_section(const Module& m, SectionId id)
{
    Writer out;
    switch (id)
    {
    case SectionId::type:
        out.u32(m.type_sec.size());
        for (const auto& t : m.type_sec)
        {
            out.u8(0x60);
            out.u32(t.params.size());
            for (const auto p : t.params)
                out.valtype(p);
            out.u32(t.results.size());
            for (const auto r : t.results)
                out.valtype(r);
        }
        break;
    case SectionId::import:
        out.u32(m.import_sec.size());
        for (const auto& imp : m.import_sec)
        {
            out.name(imp.module_name);
            out.name(imp.name);
            out.u8(static_cast<uint8_t>(imp.kind()));
            std::visit(
                [&out](const auto& d) {
                    using T = std::decay_t<decltype(d)>;
                    if constexpr (std::is_same_v<T, FunctionImport>)
                        out.u32(d.type_idx);
                    else if constexpr (std::is_same_v<T, TableImport>)
                    {
                        out.u8(0x70);
                        out.limits(d.limits.min, d.limits.max);
                    }
                    else if constexpr (std::is_same_v<T, MemoryImport>)
                        out.limits(d.limits.min, d.limits.max);
                    else
                    {
                        out.valtype(d.type);
                        out.u8(static_cast<uint8_t>(d.mut));
                    }
                },
                imp.desc);
        }
        break;
    case SectionId::function:
        out.u32(m.func_sec.size());
        for (const auto& f : m.func_sec)
            out.u32(f.type_idx);
        break;
    case SectionId::table:
        out.u32(m.table_sec.size());
        for (const auto& t : m.table_sec)
        {
            out.u8(0x70);
            out.limits(t.min, t.max);
        }
        break;
    case SectionId::memory:
        out.u32(m.mem_sec.size());
        for (const auto& mem : m.mem_sec)
            out.limits(mem.min, mem.max);
        break;
    case SectionId::global:
        out.u32(m.global_sec.size());
        for (const auto& g : m.global_sec)
        {
            out.valtype(g.type);
            out.u8(static_cast<uint8_t>(g.mut));
            write_expression(out, g.init.instrs);
        }
        break;
    case SectionId::export_:
        out.u32(m.export_sec.size());
        for (const auto& e : m.export_sec)
        {
            out.name(e.name);
            out.u8(static_cast<uint8_t>(e.kind));
            out.u32(e.target_idx);
        }
        break;
    case SectionId::start:
        out.u32(m.start_sec->func_idx);
        break;
    case SectionId::element:
        out.u32(m.elem_sec.size());
        for (const auto& e : m.elem_sec)
        {
            out.u32(0);
            write_expression(out, e.offset.instrs);
            out.u32(e.func_idxs.size());
            for (const auto f : e.func_idxs)
                out.u32(f);
        }
        break;
    case SectionId::code:
        out.u32(m.code_sec.size());
        for (const auto& c : m.code_sec)
        {
            Writer body;
            const auto locals = normalize_locals(c.locals);
            body.u32(locals.size());
            for (const auto& l : locals)
            {
                body.u32(l.count);
                body.valtype(l.type);
            }
            write_expression(body, c.body);
            out.sized(body.data());
        }
        break;
    case SectionId::data:
        out.u32(m.data_sec.size());
        for (const auto& d : m.data_sec)
        {
            if (d.mem_idx == 0)
                out.u32(0);
            else
            {
                out.u32(2);
                out.u32(d.mem_idx);
            }
            write_expression(out, d.offset.instrs);
            out.u32(d.init.size());
            out.bytes(d.init);
        }
        break;
    case SectionId::custom:
        break;
    }
    return std::move(out.data());
}

bool section_present(const Module& m, SectionId id)
{
    switch (id)
    {
    case SectionId::type:
        return !m.type_sec.empty();
    case SectionId::import:
        return !m.import_sec.empty();
    case SectionId::function:
        return !m.func_sec.empty();
    case SectionId::table:
        return !m.table_sec.empty();
    case SectionId::memory:
        return !m.mem_sec.empty();
    case SectionId::global:
        return !m.global_sec.empty();
    case SectionId::export_:
        return !m.export_sec.empty();
    case SectionId::start:
        return m.start_sec.has_value();
    case SectionId::element:
        return !m.elem_sec.empty();
    case SectionId::code:
        return !m.code_sec.empty();
    case SectionId::data:
        return !m.data_sec.empty();
    case SectionId::custom:
        return false;
    }
    return false;
}

struct Extra
{
    Placement placement;
    uint8_t id;
    const CustomElement* custom;
    const UnknownSection* unknown;
};
}  // namespace

Bytes encode_name_section(const NameSection& names)
{
    std::vector<std::pair<uint8_t, Bytes>> subsections;
    if (names.module_name)
    {
        Writer w;
        w.name(*names.module_name);
        subsections.emplace_back(NameSection::module_subsection, std::move(w.data()));
    }
    if (!names.functions.empty())
    {
        Writer w;
        write_name_map(w, names.functions);
        subsections.emplace_back(NameSection::function_subsection, std::move(w.data()));
    }
    if (!names.locals.empty())
    {
        Writer w;
        w.u32(names.locals.size());
        for (const auto& entry : names.locals)
        {
            w.u32(entry.idx);
            write_name_map(w, entry.names);
        }
        subsections.emplace_back(NameSection::local_subsection, std::move(w.data()));
    }
    if (!names.globals.empty())
    {
        Writer w;
        write_name_map(w, names.globals);
        subsections.emplace_back(NameSection::global_subsection, std::move(w.data()));
    }
    if (!names.data.empty())
    {
        Writer w;
        write_name_map(w, names.data);
        subsections.emplace_back(NameSection::data_subsection, std::move(w.data()));
    }
    for (const auto& raw : names.others)
        subsections.emplace_back(raw.id, raw.payload);
    std::stable_sort(subsections.begin(), subsections.end(),
        [](const auto& a, const auto& b) { return a.first < b.first; });

    Writer out;
    for (const auto& [id, payload] : subsections)
    {
        out.u8(id);
        out.sized(payload);
    }
    return std::move(out.data());
}

Bytes encode_module(const Module& m)
{
    check_encodable(m);

    std::vector<Extra> extras;
    for (const auto& c : m.custom_secs)
        extras.push_back({c.placement, 0, &c, nullptr});
    for (const auto& u : m.unknown_secs)
        extras.push_back({u.placement, u.id, nullptr, &u});
    // The data count section belongs between the element and code sections
    // no matter which known sections the input had around it.
    for (auto& e : extras)
        if (e.unknown != nullptr && e.id == 12)
            e.placement.after = static_cast<uint8_t>(SectionId::element);
    std::stable_sort(extras.begin(), extras.end(), [](const Extra& a, const Extra& b) {
        if (a.placement.after != b.placement.after)
            return a.placement.after < b.placement.after;
        return a.placement.order < b.placement.order;
    });

    Writer out;
    out.bytes(wasm_magic);
    out.bytes(wasm_version);

    auto next_extra = extras.begin();
    const auto emit_extras_up_to = [&](uint8_t slot) {
        for (; next_extra != extras.end() && next_extra->placement.after <= slot; ++next_extra)
        {
            out.u8(next_extra->id);
            if (next_extra->custom != nullptr)
            {
                Writer payload;
                payload.name(next_extra->custom->name);
                if (const auto* names = std::get_if<NameSection>(&next_extra->custom->payload))
                    payload.bytes(encode_name_section(*names));
                else
                    payload.bytes(std::get<Bytes>(next_extra->custom->payload));
                out.sized(payload.data());
            }
            else
                out.sized(next_extra->unknown->payload);
        }
    };

    emit_extras_up_to(0);
    for (uint8_t id = 1; id <= static_cast<uint8_t>(SectionId::data); ++id)
    {
        const auto section = static_cast<SectionId>(id);
        if (section_present(m, section))
        {
            out.u8(id);
            out.sized(encode_section(m, section));
        }
        emit_extras_up_to(id);
    }
    emit_extras_up_to(0xFF);
    return std::move(out.data());
}
}  // namespace rewasm
