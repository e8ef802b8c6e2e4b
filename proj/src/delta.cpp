// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rewasm/delta.hpp"

namespace rewasm
{
std::string_view to_string(IndexSpace space)
{
    switch (space)
    {
    case IndexSpace::type:
        return "type";
    case IndexSpace::function:
        return "function";
    case IndexSpace::global:
        return "global";
    case IndexSpace::table:
        return "table";
    case IndexSpace::memory:
        return "memory";
    case IndexSpace::elem:
        return "elem";
    case IndexSpace::data:
        return "data";
    case IndexSpace::export_:
        return "export";
    case IndexSpace::local:
        return "local";
    }
    return "?";
}

std::string to_string(const RewriteDelta& delta)
{
    std::string out{to_string(delta.space)};
    if (delta.space == IndexSpace::local)
        out += "[func " + std::to_string(delta.function) + "]";
    out += " pivot=" + std::to_string(delta.pivot) + " offset=";
    if (delta.offset > 0)
        out += '+';
    out += std::to_string(delta.offset);
    return out;
}
}  // namespace rewasm
