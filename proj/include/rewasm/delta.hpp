// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace rewasm
{
enum class IndexSpace : uint8_t
{
    type,
    function,
    global,
    table,
    memory,
    elem,
    data,
    export_,
    local,  ///< scoped to RewriteDelta::function
};

std::string_view to_string(IndexSpace space);

/// A shift of one index space produced by a structural edit.
///
/// offset > 0: `offset` entries were inserted at `pivot`; stored indices
/// >= pivot move up by offset.
/// offset < 0: entries [pivot, pivot - offset) were removed; indices past the
/// removed range move down, indices inside it are broken.
struct RewriteDelta
{
    IndexSpace space = IndexSpace::type;
    uint32_t pivot = 0;
    int64_t offset = 0;
    /// Owning function of a local-space delta.
    uint32_t function = 0;

    bool is_identity() const noexcept { return offset == 0; }
    RewriteDelta inverse() const noexcept { return {space, pivot, -offset, function}; }

    /// Maps one index through the delta; nullopt when the index was removed.
    std::optional<uint32_t> apply(uint32_t index) const noexcept
    {
        if (index < pivot || offset == 0)
            return index;
        if (offset > 0)
            return static_cast<uint32_t>(index + offset);
        const auto removed = static_cast<uint64_t>(-offset);
        if (index - uint64_t{pivot} < removed)
            return std::nullopt;
        return static_cast<uint32_t>(index - removed);
    }

    friend bool operator==(const RewriteDelta&, const RewriteDelta&) = default;
};

std::string to_string(const RewriteDelta& delta);
}  // namespace rewasm
