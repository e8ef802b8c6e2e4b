// rewasm: static rewriting toolkit for WebAssembly binaries
// Copyright 2026 The rewasm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "delta.hpp"
#include "module.hpp"
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rewasm
{
/// Where a stored index lives.
struct RefSite
{
    SectionId section = SectionId::custom;
    /// Position of the element inside its section (for code and data this
    /// is also the position in code_sec / data_sec).
    uint32_t element = 0;
    /// Short description, e.g. "call", "export target", "function name".
    const char* what = "";
    /// Instruction position inside a body or constant expression.
    std::optional<uint32_t> instr;
    /// Entries of the name section are dropped rather than reported when
    /// their target is removed.
    bool is_name = false;
};

std::string describe(const RefSite& site);

using RefVisitor = std::function<void(uint32_t& index, const RefSite& site)>;

/// Visits every stored index of one index space. For IndexSpace::local only
/// the body and local names of `function` (an absolute function index) are
/// visited. Element idx fields are not references and are never visited.
void for_each_reference(Module& module, IndexSpace space, const RefVisitor& visit,
    uint32_t function = 0);

/// References that `delta` would leave pointing at a removed entity. Name
/// entries are not included.
std::vector<RefSite> broken_references(const Module& module, const RewriteDelta& delta);

/// Shifts every stored index of the delta's space. Throws
/// BrokenReferenceError, before changing anything, when a reference points
/// into a removed range. Name entries inside a removed range are dropped.
/// Returns the number of indices that changed.
uint32_t fix_references(Module& module, const RewriteDelta& delta);

/// Collects every delta passed to fix_references on this thread while alive.
class DeltaRecorder
{
public:
    DeltaRecorder();
    ~DeltaRecorder();
    DeltaRecorder(const DeltaRecorder&) = delete;
    DeltaRecorder& operator=(const DeltaRecorder&) = delete;

    const std::vector<RewriteDelta>& deltas() const noexcept { return m_deltas; }

private:
    friend uint32_t fix_references(Module& module, const RewriteDelta& delta);
    std::vector<RewriteDelta> m_deltas;
    DeltaRecorder* m_previous;
};
}  // namespace rewasm
