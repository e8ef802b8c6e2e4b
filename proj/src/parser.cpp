// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rewasm/binary.hpp"
#include "rewasm/errors.hpp"
#include "rewasm/leb128.hpp"
#include <algorithm>
#include <cstring>

namespace rewasm
{
namespace
{
class Reader
{
public:
    Reader(std::span<const uint8_t> data, uint64_t base, ParseDiagnostics* diagnostics)
      : m_data{data}, m_base{base}, m_diagnostics{diagnostics}
    {}

    bool at_end() const noexcept { return m_pos == m_data.size(); }
    size_t remaining() const noexcept { return m_data.size() - m_pos; }
    uint64_t offset() const noexcept { return m_base + m_pos; }

    uint8_t u8()
    {
        if (at_end())
            throw TruncatedError{"unexpected end of input", offset()};
        return m_data[m_pos++];
    }

    uint8_t peek() const
    {
        if (at_end())
            throw TruncatedError{"unexpected end of input", offset()};
        return m_data[m_pos];
    }

    uint32_t u32() { return leb(decode_uleb128<uint32_t>(rest(), offset())); }
    int32_t s32() { return leb(decode_sleb128<int32_t>(rest(), offset())); }
    int64_t s64() { return leb(decode_sleb128<int64_t>(rest(), offset())); }

    uint32_t fixed32()
    {
        const auto raw = bytes(4);
        return uint32_t{raw[0]} | uint32_t{raw[1]} << 8 | uint32_t{raw[2]} << 16 |
               uint32_t{raw[3]} << 24;
    }

    uint64_t fixed64()
    {
        const uint64_t lo = fixed32();
        const uint64_t hi = fixed32();
        return lo | hi << 32;
    }

    std::span<const uint8_t> bytes(size_t n)
    {
        if (n > remaining())
            throw TruncatedError{"unexpected end of input: need " + std::to_string(n) +
                                     " bytes, have " + std::to_string(remaining()),
                offset()};
        const auto out = m_data.subspan(m_pos, n);
        m_pos += n;
        return out;
    }

    std::string name()
    {
        const auto size = u32();
        const auto raw = bytes(size);
        return {raw.begin(), raw.end()};
    }

    /// Reads a vector length and rejects counts that cannot possibly fit in
    /// the remaining input (each entry takes at least one byte).
    uint32_t count()
    {
        const auto at = offset();
        const auto n = u32();
        if (n > remaining())
            throw TruncatedError{"vector length " + std::to_string(n) + " exceeds input", at};
        return n;
    }

    ValType valtype()
    {
        const auto at = offset();
        const auto byte = u8();
        if (const auto t = valtype_from_byte(byte))
            return *t;
        throw FormatError{"invalid value type 0x" + hex(byte), at};
    }

    Limits limits()
    {
        const auto at = offset();
        const auto flags = u8();
        Limits out;
        if (flags == 0x00)
            out.min = u32();
        else if (flags == 0x01)
        {
            out.min = u32();
            out.max = u32();
        }
        else
            throw FormatError{"unsupported limits flags 0x" + hex(flags), at};
        return out;
    }

    Reader sub(size_t n)
    {
        const auto at = offset();
        return Reader{bytes(n), at, m_diagnostics};
    }

    ParseDiagnostics* diagnostics() const noexcept { return m_diagnostics; }

    static std::string hex(unsigned value)
    {
        static constexpr char digits[] = "0123456789abcdef";
        std::string out;
        do
        {
            out.insert(out.begin(), digits[value & 0xF]);
            value >>= 4;
        } while (value != 0);
        if (out.size() == 1)
            out.insert(out.begin(), '0');
        return out;
    }

private:
    std::span<const uint8_t> rest() const noexcept { return m_data.subspan(m_pos); }

    template <typename T>
    T leb(const LebDecoded<T>& decoded)
    {
        if (!decoded.minimal && m_diagnostics != nullptr)
        {
            if (m_diagnostics->non_minimal_leb_count == 0)
                m_diagnostics->warnings.push_back(
                    {offset(), "non-minimal LEB128 encoding (normalized on output)"});
            ++m_diagnostics->non_minimal_leb_count;
        }
        m_pos += decoded.consumed;
        return decoded.value;
    }

    std::span<const uint8_t> m_data;
    size_t m_pos = 0;
    uint64_t m_base = 0;
    ParseDiagnostics* m_diagnostics = nullptr;
};

BlockType read_block_type(Reader& in)
{
    const auto at = in.offset();
    const auto first = in.peek();
    if (first == 0x40)
    {
        in.u8();
        return BlockType::empty();
    }
    if (const auto t = valtype_from_byte(first))
    {
        in.u8();
        return BlockType::of(*t);
    }
    // Otherwise a non-negative s33 type index.
    const auto index = in.s64();
    if (index < 0 || index > 0xFFFFFFFF)
        throw FormatError{"invalid block type", at};
    return BlockType::of_type(static_cast<uint32_t>(index));
}

Instruction read_instruction(Reader& in)
{
    const auto at = in.offset();
    uint16_t code = in.u8();
    if (code == prefix_fc)
    {
        const auto sub = in.u32();
        if (sub > 0xFF)
            throw FormatError{"unsupported 0xFC sub-opcode " + std::to_string(sub), at};
        code = static_cast<uint16_t>(0xFC00 | sub);
    }
    const auto* info = find_opcode(code);
    if (info == nullptr)
        throw FormatError{"unsupported opcode 0x" + Reader::hex(code), at};

    Instruction instr{info->opcode, {}};
    auto& imm = instr.immediates;
    switch (info->layout)
    {
    case ImmediateLayout::none:
        break;
    case ImmediateLayout::block_type:
        imm.emplace_back(read_block_type(in));
        break;
    case ImmediateLayout::label:
        imm.emplace_back(LabelIdx{in.u32()});
        break;
    case ImmediateLayout::label_table:
    {
        const auto n = in.count();
        for (uint32_t i = 0; i <= n; ++i)
            imm.emplace_back(LabelIdx{in.u32()});
        break;
    }
    case ImmediateLayout::function:
        imm.emplace_back(FuncIdx{in.u32()});
        break;
    case ImmediateLayout::call_indirect:
        imm.emplace_back(TypeIdx{in.u32()});
        imm.emplace_back(TableIdx{in.u32()});
        break;
    case ImmediateLayout::local:
        imm.emplace_back(LocalIdx{in.u32()});
        break;
    case ImmediateLayout::global:
        imm.emplace_back(GlobalIdx{in.u32()});
        break;
    case ImmediateLayout::memarg:
    {
        const auto align = in.u32();
        const auto offset = in.u32();
        imm.emplace_back(MemArg{align, offset});
        break;
    }
    case ImmediateLayout::memory:
    {
        const auto mem_at = in.offset();
        const auto reserved = in.u8();
        if (reserved != 0)
            throw FormatError{"memory index must be zero", mem_at};
        imm.emplace_back(MemIdx{0});
        break;
    }
    case ImmediateLayout::i32:
        imm.emplace_back(I32{in.s32()});
        break;
    case ImmediateLayout::i64:
        imm.emplace_back(I64{in.s64()});
        break;
    case ImmediateLayout::f32:
        imm.emplace_back(F32{in.fixed32()});
        break;
    case ImmediateLayout::f64:
        imm.emplace_back(F64{in.fixed64()});
        break;
    }
    return instr;
}

/// Reads instructions up to and including the `end` that closes depth 0.
std::vector<Instruction> read_expression(Reader& in)
{
    std::vector<Instruction> out;
    uint32_t depth = 0;
    while (true)
    {
        auto instr = read_instruction(in);
        const auto op = instr.opcode;
        out.push_back(std::move(instr));
        if (opens_block(op))
            ++depth;
        else if (op == Opcode::end)
        {
            if (depth == 0)
                return out;
            --depth;
        }
    }
}

ConstExpr read_const_expr(Reader& in)
{
    return ConstExpr{read_expression(in)};
}

NameMap read_name_map(Reader& in)
{
    NameMap map;
    const auto n = in.count();
    map.reserve(n);
    for (uint32_t i = 0; i < n; ++i)
    {
        const auto at = in.offset();
        const auto idx = in.u32();
        if (!map.empty() && idx <= map.back().idx)
            throw FormatError{"name map indices must be strictly increasing", at};
        map.push_back({idx, in.name()});
    }
    return map;
}

class ModuleParser
{
public:
    explicit ModuleParser(std::span<const uint8_t> bytes) : m_in{bytes, 0, &m_result.diagnostics}
    {}

    ParseResult run()
    {
        read_header();
        uint8_t last_known = 0;
        uint32_t extra_order = 0;
        uint32_t seen_mask = 0;
        while (!m_in.at_end())
        {
            const auto section_at = m_in.offset();
            const auto id = m_in.u8();
            const auto size = m_in.u32();
            if (size > m_in.remaining())
                throw TruncatedError{"section " + std::to_string(id) + " declares " +
                                      std::to_string(size) + " bytes but only " +
                                      std::to_string(m_in.remaining()) + " remain",
                    section_at};
            auto payload = m_in.sub(size);

            if (id == 0)
            {
                read_custom(payload, Placement{last_known, extra_order++});
                continue;
            }
            if (id > static_cast<uint8_t>(SectionId::data))
            {
                const auto raw = payload.bytes(payload.remaining());
                // Data count always sits right after the element slot.
                const auto after = id == 12 ? static_cast<uint8_t>(SectionId::element) : last_known;
                m_result.module.unknown_secs.push_back(
                    {id, Bytes{raw.begin(), raw.end()}, Placement{after, extra_order++}});
                m_result.diagnostics.warnings.push_back(
                    {section_at, "unknown section id " + std::to_string(id) + " kept verbatim"});
                continue;
            }
            if ((seen_mask & (1u << id)) != 0)
                throw FormatError{"duplicate section id " + std::to_string(id), section_at};
            seen_mask |= 1u << id;
            if (id < last_known)
                m_result.diagnostics.warnings.push_back(
                    {section_at, "section " + std::to_string(id) +
                                     " is out of order; output uses canonical order"});
            last_known = std::max(last_known, id);

            read_known(static_cast<SectionId>(id), payload);
            if (!payload.at_end())
                throw FormatError{"section " + std::to_string(id) + " size mismatch: " +
                                      std::to_string(payload.remaining()) + " bytes unread",
                    payload.offset()};
        }
        assign_indices();
        check_pairing();
        return std::move(m_result);
    }

private:
    void read_header()
    {
        const auto magic = m_in.bytes(std::min<size_t>(4, m_in.remaining()));
        if (magic.size() < 4 || !std::equal(magic.begin(), magic.end(), wasm_magic.begin()))
            throw FormatError{"invalid magic number", 0};
        if (m_in.remaining() < 4)
            throw TruncatedError{"missing version field", 4};
        const auto version = m_in.bytes(4);
        if (!std::equal(version.begin(), version.end(), wasm_version.begin()))
            throw FormatError{"unsupported version", 4};
    }

    void read_custom(Reader& payload, Placement placement)
    {
        const auto at = payload.offset();
        auto name = payload.name();
        const auto content_at = payload.offset();
        const auto raw = payload.bytes(payload.remaining());
        CustomElement custom{std::move(name), Bytes{raw.begin(), raw.end()}, placement};
        if (custom.name == "name" && m_result.module.name_section() == nullptr)
        {
            try
            {
                custom.payload = parse_name_section(raw, content_at);
            }
            catch (const FormatError& e)
            {
                m_result.diagnostics.warnings.push_back(
                    {at, std::string{"name section kept verbatim: "} + e.what()});
            }
        }
        m_result.module.custom_secs.push_back(std::move(custom));
    }

    void read_known(SectionId id, Reader& in)
    {
        auto& m = m_result.module;
        switch (id)
        {
        case SectionId::type:
            for (uint32_t i = 0, n = in.count(); i < n; ++i)
            {
                const auto at = in.offset();
                if (in.u8() != 0x60)
                    throw FormatError{"expected 0x60 for function type", at};
                TypeElement t;
                for (uint32_t k = 0, np = in.count(); k < np; ++k)
                    t.params.push_back(in.valtype());
                for (uint32_t k = 0, nr = in.count(); k < nr; ++k)
                    t.results.push_back(in.valtype());
                m.type_sec.push_back(std::move(t));
            }
            break;
        case SectionId::import:
            for (uint32_t i = 0, n = in.count(); i < n; ++i)
            {
                ImportElement imp;
                imp.module_name = in.name();
                imp.name = in.name();
                const auto at = in.offset();
                switch (in.u8())
                {
                case 0x00:
                    imp.desc = FunctionImport{in.u32()};
                    break;
                case 0x01:
                    read_funcref(in);
                    imp.desc = TableImport{in.limits()};
                    break;
                case 0x02:
                    imp.desc = MemoryImport{in.limits()};
                    break;
                case 0x03:
                {
                    const auto type = in.valtype();
                    imp.desc = GlobalImport{type, read_mut(in)};
                    break;
                }
                default:
                    throw FormatError{"invalid import kind", at};
                }
                m.import_sec.push_back(std::move(imp));
            }
            break;
        case SectionId::function:
            for (uint32_t i = 0, n = in.count(); i < n; ++i)
                m.func_sec.push_back({unset_index, in.u32()});
            break;
        case SectionId::table:
            for (uint32_t i = 0, n = in.count(); i < n; ++i)
            {
                read_funcref(in);
                const auto l = in.limits();
                m.table_sec.push_back({l.min, l.max});
            }
            break;
        case SectionId::memory:
            for (uint32_t i = 0, n = in.count(); i < n; ++i)
            {
                const auto l = in.limits();
                m.mem_sec.push_back({l.min, l.max});
            }
            break;
        case SectionId::global:
            for (uint32_t i = 0, n = in.count(); i < n; ++i)
            {
                GlobalElement g;
                g.type = in.valtype();
                g.mut = read_mut(in);
                g.init = read_const_expr(in);
                m.global_sec.push_back(std::move(g));
            }
            break;
        case SectionId::export_:
            for (uint32_t i = 0, n = in.count(); i < n; ++i)
            {
                ExportElement e;
                e.name = in.name();
                const auto at = in.offset();
                const auto kind = in.u8();
                if (kind > 3)
                    throw FormatError{"invalid export kind", at};
                e.kind = static_cast<ExternalKind>(kind);
                e.target_idx = in.u32();
                m.export_sec.push_back(std::move(e));
            }
            break;
        case SectionId::start:
            m.start_sec = StartElement{in.u32()};
            break;
        case SectionId::element:
            for (uint32_t i = 0, n = in.count(); i < n; ++i)
            {
                const auto at = in.offset();
                const auto flags = in.u32();
                if (flags != 0)
                    throw FormatError{"unsupported element segment flags " +
                                          std::to_string(flags),
                        at};
                ElemElement e;
                e.offset = read_const_expr(in);
                for (uint32_t k = 0, nf = in.count(); k < nf; ++k)
                    e.func_idxs.push_back(in.u32());
                m.elem_sec.push_back(std::move(e));
            }
            break;
        case SectionId::code:
            for (uint32_t i = 0, n = in.count(); i < n; ++i)
            {
                const auto size = in.u32();
                auto body = in.sub(size);
                m.code_sec.push_back(read_code(body));
                if (!body.at_end())
                    throw FormatError{"function body size mismatch", body.offset()};
            }
            break;
        case SectionId::data:
            for (uint32_t i = 0, n = in.count(); i < n; ++i)
            {
                const auto at = in.offset();
                const auto flags = in.u32();
                DataElement d;
                if (flags == 2)
                    d.mem_idx = in.u32();
                else if (flags != 0)
                    throw FormatError{"unsupported data segment flags " + std::to_string(flags),
                        at};
                d.offset = read_const_expr(in);
                const auto size = in.u32();
                const auto raw = in.bytes(size);
                d.init.assign(raw.begin(), raw.end());
                m.data_sec.push_back(std::move(d));
            }
            break;
        case SectionId::custom:
            break;
        }
    }

    CodeElement read_code(Reader& in)
    {
        CodeElement code;
        const auto at = in.offset();
        uint64_t total = 0;
        const auto groups = in.count();
        for (uint32_t i = 0; i < groups; ++i)
        {
            const auto count = in.u32();
            const auto type = in.valtype();
            total += count;
            code.locals.push_back({count, type});
        }
        if (total > 0xFFFFFFFFu)
            throw FormatError{"too many locals", at};
        auto normalized = normalize_locals(code.locals);
        if (normalized != code.locals)
        {
            m_result.diagnostics.warnings.push_back(
                {at, "local declarations normalized (merged or empty runs)"});
            code.locals = std::move(normalized);
        }
        code.body = read_expression(in);
        return code;
    }

    static void read_funcref(Reader& in)
    {
        const auto at = in.offset();
        if (in.u8() != 0x70)
            throw FormatError{"only funcref tables are supported", at};
    }

    static Mutability read_mut(Reader& in)
    {
        const auto at = in.offset();
        const auto byte = in.u8();
        if (byte > 1)
            throw FormatError{"invalid mutability flag", at};
        return static_cast<Mutability>(byte);
    }

    void assign_indices()
    {
        auto& m = m_result.module;
        uint32_t per_kind[4] = {0, 0, 0, 0};
        for (auto& imp : m.import_sec)
            imp.idx = per_kind[static_cast<size_t>(imp.kind())]++;
        for (uint32_t i = 0; i < m.type_sec.size(); ++i)
            m.type_sec[i].idx = i;
        for (uint32_t i = 0; i < m.func_sec.size(); ++i)
            m.func_sec[i].func_idx = per_kind[0] + i;
        for (uint32_t i = 0; i < m.code_sec.size(); ++i)
            m.code_sec[i].func_idx = per_kind[0] + i;
        for (uint32_t i = 0; i < m.global_sec.size(); ++i)
            m.global_sec[i].idx = per_kind[3] + i;
        for (uint32_t i = 0; i < m.export_sec.size(); ++i)
            m.export_sec[i].idx = i;
        for (uint32_t i = 0; i < m.elem_sec.size(); ++i)
            m.elem_sec[i].idx = i;
        for (uint32_t i = 0; i < m.data_sec.size(); ++i)
            m.data_sec[i].idx = i;
    }

    void check_pairing()
    {
        const auto& m = m_result.module;
        if (m.func_sec.size() != m.code_sec.size())
            m_result.diagnostics.warnings.push_back(
                {0, "function section declares " + std::to_string(m.func_sec.size()) +
                        " functions but code section has " + std::to_string(m.code_sec.size()) +
                        " bodies"});
    }

    ParseResult m_result;
    Reader m_in;
};
}  // namespace

std::vector<Local> normalize_locals(const std::vector<Local>& locals)
{
    std::vector<Local> out;
    for (const auto& l : locals)
    {
        if (l.count == 0)
            continue;
        if (!out.empty() && out.back().type == l.type)
            out.back().count += l.count;
        else
            out.push_back(l);
    }
    return out;
}

NameSection parse_name_section(std::span<const uint8_t> payload, uint64_t offset)
{
    Reader in{payload, offset, nullptr};
    NameSection names;
    uint32_t seen_mask = 0;
    while (!in.at_end())
    {
        const auto at = in.offset();
        const auto id = in.u8();
        const auto size = in.u32();
        auto sub = in.sub(size);
        const bool known = id == NameSection::module_subsection ||
                           id == NameSection::function_subsection ||
                           id == NameSection::local_subsection ||
                           id == NameSection::global_subsection ||
                           id == NameSection::data_subsection;
        if (!known)
        {
            const auto raw = sub.bytes(sub.remaining());
            names.others.push_back({id, Bytes{raw.begin(), raw.end()}});
            continue;
        }
        if ((seen_mask & (1u << id)) != 0)
            throw FormatError{"duplicate name subsection " + std::to_string(id), at};
        seen_mask |= 1u << id;

        switch (id)
        {
        case NameSection::module_subsection:
            names.module_name = sub.name();
            break;
        case NameSection::function_subsection:
            names.functions = read_name_map(sub);
            break;
        case NameSection::local_subsection:
            for (uint32_t i = 0, n = sub.count(); i < n; ++i)
            {
                const auto entry_at = sub.offset();
                const auto idx = sub.u32();
                if (!names.locals.empty() && idx <= names.locals.back().idx)
                    throw FormatError{"local name map indices must be strictly increasing",
                        entry_at};
                names.locals.push_back({idx, read_name_map(sub)});
            }
            break;
        case NameSection::global_subsection:
            names.globals = read_name_map(sub);
            break;
        case NameSection::data_subsection:
            names.data = read_name_map(sub);
            break;
        default:
            break;
        }
        if (!sub.at_end())
            throw FormatError{"name subsection size mismatch", sub.offset()};
    }
    return names;
}

ParseResult parse_module(std::span<const uint8_t> bytes)
{
    return ModuleParser{bytes}.run();
}
}  // namespace rewasm
