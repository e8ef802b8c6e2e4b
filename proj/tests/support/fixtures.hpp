// Shared test fixtures: the two-import loop module, seeded random modules,
// corpus access and the external validator.

#pragma once

#include "rewasm/binary.hpp"
#include "rewasm/validator.hpp"
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace rewasm::testing
{
/// types (i32)->(i32), (i32)->(); imports env.sqrt, env.print; function 2
/// looping over sqrt; table (5, 5); one elem entry at offset 1.
Module listing_module();

/// Module with no sections at all.
Module empty_module();

/// Two internal functions, the second calling the first, a mutable i32
/// stack pointer global and one memory page.
Module canary_module();

/// Function 5 is an internal (i32) -> (i32) function called once from
/// function 6; functions 0..4 are imported.
Module instrument_module();

struct RandomShape
{
    uint32_t max_functions = 20;
    uint32_t max_globals = 10;
    uint32_t max_elem_entries = 3;
    bool names = true;
};

/// A valid module drawn from `rng`. Every internal function body starts with
/// `i32.const <tag>; drop` and every internal global has a distinct literal
/// initializer, so entities can be told apart by content.
Module random_module(std::mt19937_64& rng, const RandomShape& shape = {});

/// Next unused function tag for bodies built by tests.
int32_t fresh_tag(const Module& m);

/// Body `i32.const tag; drop; <zero results>; end` for a signature.
std::vector<Instruction> tagged_body(int32_t tag, const std::vector<ValType>& results);

std::vector<std::filesystem::path> corpus_files();
Bytes read_bytes(const std::filesystem::path& path);

/// Encodes and runs the configured external validator.
ExternalResult check_external(const Module& m);
ExternalResult check_external(const Bytes& bytes);

struct ApiCase
{
    std::string name;
    /// Sets up whatever the call needs, then makes the call.
    std::function<bool(Module&)> run;
};

/// One valid invocation of each of the 31 semantic APIs, chosen for `m`.
std::vector<ApiCase> api_cases();
}  // namespace rewasm::testing
