#include "fixtures.hpp"
#include "rewasm/errors.hpp"
#include "rewasm/validator.hpp"

#include <gtest/gtest.h>
#include <algorithm>

using namespace rewasm;
using namespace rewasm::testing;

namespace
{
bool has_code(const std::vector<Diagnostic>& ds, const std::string& code)
{
    return std::any_of(ds.begin(), ds.end(), [&](const Diagnostic& d) { return d.code == code; });
}

std::vector<Diagnostic> errors_of(const std::vector<Diagnostic>& ds)
{
    std::vector<Diagnostic> out;
    std::copy_if(ds.begin(), ds.end(), std::back_inserter(out),
        [](const Diagnostic& d) { return d.severity == Severity::error; });
    return out;
}
}  // namespace

TEST(Structure, ListingIsClean)
{
    EXPECT_TRUE(validate_structure(listing_module()).empty());
    EXPECT_TRUE(validate_structure(empty_module()).empty());
    EXPECT_TRUE(validate_structure(canary_module()).empty());
}

TEST(Structure, FunctionWithoutCode)
{
    auto m = listing_module();
    m.func_sec.push_back({3, 1});
    const auto errors = errors_of(validate_structure(m));
    ASSERT_EQ(errors.size(), 1u);
    EXPECT_EQ(errors[0].section, SectionId::code);
    EXPECT_EQ(errors[0].code, "func-code-count");
}

TEST(Structure, CallPastLastFunction)
{
    auto m = listing_module();
    m.code_sec[0].body[2] = ins::call(3);
    const auto errors = errors_of(validate_structure(m));
    ASSERT_EQ(errors.size(), 1u);
    EXPECT_EQ(errors[0].code, "function-index");
    EXPECT_NE(to_string(errors[0]).find("function index space"), std::string::npos);
}

TEST(Structure, Continuity)
{
    auto m = listing_module();
    m.type_sec[1].idx = 5;
    EXPECT_TRUE(has_code(validate_structure(m), "idx-continuity"));
}

TEST(Structure, RangesAndLimits)
{
    auto m = canary_module();
    m.code_sec[0].body.insert(m.code_sec[0].body.begin(), {ins::global_get(1), ins::op(Opcode::drop)});
    m.code_sec[1].body.insert(m.code_sec[1].body.begin(), {ins::local_get(0), ins::op(Opcode::drop)});
    m.mem_sec[0].max = 1;
    const auto ds = validate_structure(m);
    EXPECT_TRUE(has_code(ds, "global-index"));
    EXPECT_TRUE(has_code(ds, "local-index"));
    EXPECT_TRUE(has_code(ds, "limits-order"));
}

TEST(Structure, SegmentBounds)
{
    auto m = listing_module();
    m.elem_sec[0].func_idxs = {0, 1, 2, 0, 1};
    EXPECT_TRUE(has_code(errors_of(validate_structure(m)), "elem-bounds"));

    auto d = canary_module();
    d.data_sec = {{0, 0, ConstExpr::i32(2 * 65536 - 1), {1, 2}}};
    EXPECT_TRUE(has_code(errors_of(validate_structure(d)), "data-bounds"));
}

TEST(Structure, ImportedTableBoundsAreWarnings)
{
    auto m = listing_module();
    m.table_sec.clear();
    m.import_sec.push_back({0, "env", "table", TableImport{{1, std::nullopt}}});
    const auto ds = validate_structure(m);
    EXPECT_TRUE(has_code(ds, "elem-bounds"));
    EXPECT_FALSE(has_errors(ds));
}

TEST(Structure, ExportsAndStart)
{
    auto m = listing_module();
    m.export_sec = {{0, "a", ExternalKind::function, 2}, {1, "a", ExternalKind::function, 1}};
    m.start_sec = StartElement{2};
    const auto ds = validate_structure(m);
    EXPECT_TRUE(has_code(ds, "export-duplicate"));
    EXPECT_TRUE(has_code(ds, "start-signature"));
}

TEST(Structure, BlockStructure)
{
    auto m = listing_module();
    m.code_sec[0].body.erase(m.code_sec[0].body.begin() + 8);
    EXPECT_TRUE(has_code(validate_structure(m), "block-structure"));
}

TEST(Structure, CorpusIsClean)
{
    for (const auto& f : corpus_files())
    {
        const auto ds = validate_structure(parse_module(read_bytes(f)).module);
        EXPECT_FALSE(has_errors(ds)) << f << ": " << to_string(errors_of(ds).front());
    }
}

TEST(External, AcceptsListing)
{
    const auto r = check_external(listing_module());
    if (r.status == ExternalStatus::skipped)
        GTEST_SKIP();
    EXPECT_TRUE(r.accepted()) << r.tool_output;
}

TEST(External, RejectsTruncated)
{
    auto bytes = encode_module(listing_module());
    bytes.resize(bytes.size() - 3);
    const auto r = check_external(bytes);
    if (r.status == ExternalStatus::skipped)
        GTEST_SKIP();
    EXPECT_EQ(r.status, ExternalStatus::rejected);
    EXPECT_NE(r.exit_code, 0);
}

TEST(External, UnsetCommandIsSkipped)
{
    const auto bytes = encode_module(listing_module());
    const auto r = validate_external(bytes, std::nullopt);
    EXPECT_EQ(r.status, ExternalStatus::skipped);
}

TEST(External, MissingToolIsEnvironmentError)
{
    const auto bytes = encode_module(listing_module());
    EXPECT_THROW(validate_external(bytes, std::string{"/nonexistent/wasm-validate-tool"}), EnvironmentError);
}

TEST(External, PlaceholderAndExitCode)
{
    const auto bytes = encode_module(listing_module());
    EXPECT_TRUE(validate_external(bytes, std::string{"test -s {}"}).accepted());
    const auto r = validate_external(bytes, std::string{"false"});
    EXPECT_EQ(r.status, ExternalStatus::rejected);
    EXPECT_EQ(r.exit_code, 1);
}

TEST(Structure, RandomModulesAreValid)
{
    std::mt19937_64 rng{2};
    for (int i = 0; i < 200; ++i)
    {
        const auto m = random_module(rng);
        const auto ds = validate_structure(m);
        ASSERT_FALSE(has_errors(ds)) << i << ": " << to_string(errors_of(ds).front());
        if (i % 20 == 0)
        {
            const auto r = check_external(m);
            if (r.status != ExternalStatus::skipped)
                EXPECT_TRUE(r.accepted()) << i << ": " << r.tool_output;
        }
    }
}
