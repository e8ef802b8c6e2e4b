#include "fixtures.hpp"
#include "rewasm/errors.hpp"
#include "rewasm/recipes.hpp"
#include "rewasm/script.hpp"
#include "rewasm/semantics.hpp"

#include <gtest/gtest.h>
#include <algorithm>

using namespace rewasm;
using namespace rewasm::testing;

namespace
{
StepOutcome run(Module& m, const std::string& text, uint64_t seed = 0)
{
    const auto steps = parse_script(text);
    EXPECT_EQ(steps.size(), 1u);
    return run_step(m, steps.at(0), {seed});
}
}  // namespace

TEST(Script, ParseSkipsCommentsAndBlankLines)
{
    const auto steps = parse_script("# header\n\n  appendLinearMemory 2   # grow\ninsert-global i64 mut=1 init=0\n");
    ASSERT_EQ(steps.size(), 2u);
    EXPECT_EQ(steps[0].line, 3u);
    EXPECT_EQ(steps[0].positional, (std::vector<std::string>{"2"}));
    EXPECT_EQ(steps[1].line, 4u);
    EXPECT_EQ(steps[1].positional, (std::vector<std::string>{"i64"}));
    ASSERT_EQ(steps[1].named.size(), 2u);
    EXPECT_EQ(steps[1].named[1].first, "init");
}

TEST(Script, QuotedValues)
{
    const auto steps = parse_script(R"(appendImportFunction "my mod" name="a\"b" params=i32,i64 results=[])");
    ASSERT_EQ(steps.size(), 1u);
    EXPECT_EQ(steps[0].positional[0], "my mod");
    EXPECT_EQ(steps[0].named[0].second, "a\"b");
}

TEST(Script, SyntaxErrorsNameTheLine)
{
    try
    {
        parse_script("appendLinearMemory 1\nfrobnicate 3\n");
        FAIL();
    }
    catch (const SyntaxError& e)
    {
        EXPECT_NE(std::string{e.what()}.find("line 2"), std::string::npos) << e.what();
    }
    EXPECT_THROW(parse_script("appendLinearMemory pages=1 2"), SyntaxError);
    EXPECT_THROW(parse_script("appendLinearMemory \"unterminated"), SyntaxError);

    auto m = listing_module();
    EXPECT_THROW(run(m, "appendLinearMemory"), SyntaxError);
    EXPECT_THROW(run(m, "appendLinearMemory lots"), SyntaxError);
    EXPECT_THROW(run(m, "appendLinearMemory 1 bogus=2"), SyntaxError);
    EXPECT_EQ(m, listing_module());
}

TEST(Script, InsertGlobal)
{
    auto m = listing_module();
    const auto out = run(m, "insert-global i64 mut=1 init=0");
    EXPECT_TRUE(out.success);
    ASSERT_EQ(m.global_sec.size(), 1u);
    EXPECT_EQ(m.global_sec[0].type, ValType::i64);
    EXPECT_EQ(m.global_sec[0].mut, Mutability::mutable_);
    EXPECT_EQ(m.global_sec[0].init, ConstExpr::i64(0));
}

TEST(Script, InstrumentCallMatchesApi)
{
    auto a = instrument_module();
    auto b = instrument_module();
    EXPECT_TRUE(run(a, "instrument-call callee=5 module=hooks").success);
    instrument_call(b, 5, "hooks");
    EXPECT_EQ(a, b);
}

TEST(Script, FunctionSteps)
{
    auto m = listing_module();
    EXPECT_TRUE(run(m, R"(appendInternalFunction params=i32 results=i32 locals=2:i64 body="local.get 0; end")").success);
    EXPECT_EQ(m.code_sec.back().locals, (std::vector<Local>{{2, ValType::i64}}));
    EXPECT_EQ(m.code_sec.back().body, (std::vector<Instruction>{ins::local_get(0), ins::end()}));
    EXPECT_TRUE(run(m, R"(modifyFuncInstr target="call 0" instrs="call 0")").success);
    EXPECT_TRUE(run(m, "appendFuncInstrs 3 \"i32.const 1; drop\"").success);
    EXPECT_TRUE(run(m, "insertFuncName 3 name=helper").success);
    EXPECT_EQ(m.name_section()->functions, (NameMap{{3, "helper"}}));
}

TEST(Script, MissingTargetReportsFalse)
{
    auto m = listing_module();
    const auto out = run(m, "deleteGlobalVariable 4");
    EXPECT_FALSE(out.success);
    EXPECT_FALSE(out.message.empty());
    EXPECT_EQ(m, listing_module());
}

TEST(Script, RecordsDeltas)
{
    auto m = listing_module();
    const auto out = run(m, "insertImportFunction 0 env first params=i32 results=[]");
    ASSERT_TRUE(out.success);
    ASSERT_FALSE(out.deltas.empty());
    EXPECT_EQ(out.deltas.back(), (RewriteDelta{IndexSpace::function, 0, 1, 0}));
}

TEST(Script, ModifyLinearMemoryBytes)
{
    auto m = listing_module();
    run(m, "appendLinearMemory 1");
    EXPECT_TRUE(run(m, "modifyLinearMemory 8 data=0a0b").success);
    EXPECT_TRUE(run(m, "modifyLinearMemory 16 utf8:hi").success);
    ASSERT_EQ(m.data_sec.size(), 2u);
    EXPECT_EQ(m.data_sec[0].init, (Bytes{0x0a, 0x0b}));
    EXPECT_EQ(m.data_sec[1].init, (Bytes{'h', 'i'}));
}

TEST(Script, CanaryDefaultIsSeeded)
{
    auto a = canary_module();
    auto b = canary_module();
    auto c = canary_module();
    run(a, "hardenStackCanary 0", 9);
    run(b, "hardenStackCanary 0", 9);
    run(c, "hardenStackCanary 0 canary=5", 9);
    EXPECT_EQ(a, b);
    const auto& hook = c.code_sec.back().body;
    EXPECT_NE(std::find(hook.begin(), hook.end(), ins::i64_const(5)), hook.end());
}

TEST(Script, EveryApiHasAStep)
{
    const auto names = script_api_names();
    EXPECT_GE(names.size(), 34u);
    for (const auto* n : {"insertHookFunction", "modifyFuncInstr", "deleteDataName", "instrumentCall",
             "hardenStackCanary", "mutateInsertFunction"})
        EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
}
