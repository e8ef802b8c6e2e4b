// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "errors.hpp"
#include <concepts>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace rewasm
{
template <typename T>
struct LebDecoded
{
    T value;
    uint32_t consumed;
    /// False when a shorter encoding of the same value exists.
    bool minimal;
};

/// Number of bytes of the minimal unsigned encoding.
constexpr uint32_t uleb128_size(uint64_t value) noexcept
{
    uint32_t n = 1;
    while (value >= 0x80)
    {
        value >>= 7;
        ++n;
    }
    return n;
}

/// Number of bytes of the minimal signed encoding.
constexpr uint32_t sleb128_size(int64_t value) noexcept
{
    uint32_t n = 1;
    while (!((value >= -64 && value < 64)))
    {
        value >>= 7;
        ++n;
    }
    return n;
}

/// Decodes an unsigned LEB128 value of width T. `offset` is only used to
/// locate errors in the enclosing input.
template <std::unsigned_integral T>
LebDecoded<T> decode_uleb128(std::span<const uint8_t> input, uint64_t offset = 0)
{
    constexpr unsigned width = std::numeric_limits<T>::digits;
    constexpr unsigned max_bytes = (width + 6) / 7;

    uint64_t result = 0;
    for (unsigned i = 0; i < max_bytes; ++i)
    {
        if (i >= input.size())
            throw TruncatedError{"unexpected end of input in LEB128", offset + i};
        const uint8_t byte = input[i];
        const unsigned shift = 7 * i;

        if (i == max_bytes - 1)
        {
            const unsigned remaining = width - shift;
            if ((byte & 0x80) != 0 || (byte >> remaining) != 0)
                throw OverflowError{"LEB128 value exceeds " + std::to_string(width) + " bits",
                    offset + i};
        }
        result |= uint64_t{byte & 0x7Fu} << shift;
        if ((byte & 0x80) == 0)
        {
            const auto consumed = i + 1;
            return {static_cast<T>(result), consumed, consumed == uleb128_size(result)};
        }
    }
    // Unreachable: the last-byte check above always returns or throws.
    throw OverflowError{"LEB128 value too long", offset + max_bytes};
}

/// Decodes a signed LEB128 value of width T with sign extension.
template <std::signed_integral T>
LebDecoded<T> decode_sleb128(std::span<const uint8_t> input, uint64_t offset = 0)
{
    constexpr unsigned width = std::numeric_limits<T>::digits + 1;
    constexpr unsigned max_bytes = (width + 6) / 7;

    uint64_t result = 0;
    for (unsigned i = 0; i < max_bytes; ++i)
    {
        if (i >= input.size())
            throw TruncatedError{"unexpected end of input in LEB128", offset + i};
        const uint8_t byte = input[i];
        const unsigned shift = 7 * i;

        if (i == max_bytes - 1)
        {
            // Bits above the value width must replicate the sign bit.
            const unsigned remaining = width - shift;
            const uint8_t upper = (byte & 0x7F) >> (remaining - 1);
            const uint8_t all_ones = 0x7F >> (remaining - 1);
            if ((byte & 0x80) != 0 || (upper != 0 && upper != all_ones))
                throw OverflowError{"LEB128 value exceeds " + std::to_string(width) + " bits",
                    offset + i};
        }
        result |= uint64_t{byte & 0x7Fu} << shift;
        if ((byte & 0x80) == 0)
        {
            const unsigned used = shift + 7;
            if (used < 64 && (byte & 0x40) != 0)
                result |= ~uint64_t{0} << used;
            const auto value = static_cast<T>(static_cast<int64_t>(result));
            const auto consumed = i + 1;
            return {value, consumed, consumed == sleb128_size(value)};
        }
    }
    throw OverflowError{"LEB128 value too long", offset + max_bytes};
}

inline void encode_uleb128(uint64_t value, std::vector<uint8_t>& out)
{
    do
    {
        uint8_t byte = value & 0x7F;
        value >>= 7;
        if (value != 0)
            byte |= 0x80;
        out.push_back(byte);
    } while (value != 0);
}

inline void encode_sleb128(int64_t value, std::vector<uint8_t>& out)
{
    bool more = true;
    while (more)
    {
        uint8_t byte = value & 0x7F;
        value >>= 7;  // arithmetic shift
        const bool sign_bit = (byte & 0x40) != 0;
        if ((value == 0 && !sign_bit) || (value == -1 && sign_bit))
            more = false;
        else
            byte |= 0x80;
        out.push_back(byte);
    }
}

inline std::vector<uint8_t> encode_uleb128(uint64_t value)
{
    std::vector<uint8_t> out;
    encode_uleb128(value, out);
    return out;
}

inline std::vector<uint8_t> encode_sleb128(int64_t value)
{
    std::vector<uint8_t> out;
    encode_sleb128(value, out);
    return out;
}
}  // namespace rewasm
