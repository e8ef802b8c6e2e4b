// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rewasm
{
/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed binary input. Carries the byte offset where decoding failed.
class FormatError : public Error
{
public:
    FormatError(const std::string& message, uint64_t offset)
      : Error{message + " (at offset " + std::to_string(offset) + ")"}, m_offset{offset}
    {}

    uint64_t offset() const noexcept { return m_offset; }

private:
    uint64_t m_offset;
};

/// Input ended in the middle of a value or section.
class TruncatedError : public FormatError
{
public:
    using FormatError::FormatError;
};

/// An LEB128 value does not fit its declared width.
class OverflowError : public FormatError
{
public:
    using FormatError::FormatError;
};

/// The module violates an invariant required to produce a binary.
class EncodeError : public Error
{
public:
    using Error::Error;
};

class IndexError : public Error
{
public:
    using Error::Error;
};

class TypeMismatchError : public Error
{
public:
    using Error::Error;
};

class StaleSelectionError : public Error
{
public:
    using Error::Error;
};

class FieldError : public Error
{
public:
    using Error::Error;
};

class ImmutableFieldError : public FieldError
{
public:
    using FieldError::FieldError;
};

/// A stored index would be left pointing at a removed entity.
class BrokenReferenceError : public Error
{
public:
    using Error::Error;
};

class DuplicateExportError : public Error
{
public:
    using Error::Error;
};

class LimitError : public Error
{
public:
    using Error::Error;
};

class UnresolvableOffsetError : public Error
{
public:
    using Error::Error;
};

/// An edit would break block structure or a per-module singleton constraint.
class StructureError : public Error
{
public:
    using Error::Error;
};

class PreconditionError : public Error
{
public:
    using Error::Error;
};

/// Malformed instruction text or recipe script.
class SyntaxError : public Error
{
public:
    using Error::Error;
};

/// The configured external tool could not be run at all.
class EnvironmentError : public Error
{
public:
    using Error::Error;
};
}  // namespace rewasm
