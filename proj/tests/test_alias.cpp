#include <random>

#include <gtest/gtest.h>

#include "flowmon/alias.hpp"
#include "flowmon/generator.hpp"
#include "support.hpp"

using namespace flowmon;
using flowmon::test::block;
using flowmon::test::corpus;
using flowmon::test::program;

namespace {

BlockSet names(const TypedProgram& p, std::initializer_list<std::string_view> vs) {
    BlockSet out;
    for (auto v : vs) {
        out.insert(block(p, v));
    }
    return out;
}

} // namespace

TEST(Alias, WriteThroughPointerMayHitEitherTarget) {
    const auto p = corpus("pointer_flow");
    const auto f = compute_alias(p);
    ASSERT_EQ(f.size(), 3u);
    EXPECT_EQ(f.at(0), names(p, {"p"}));
    EXPECT_EQ(f.at(1), names(p, {"p"}));
    EXPECT_EQ(f.at(2), names(p, {"x", "y"}));
    EXPECT_EQ(format_alias(f, p, "pointer_flow.mc"), "pointer_flow.mc:8:5 -> {p}\npointer_flow.mc:10:5 -> {p}\npointer_flow.mc:12:1 -> {x, y}\n");
}

TEST(Alias, StraightLineProgramHasSingletonSets) {
    const auto p = corpus("explicit_flow");
    const auto f = compute_alias(p);
    for (std::size_t i = 0; i < f.size(); ++i) {
        EXPECT_EQ(f.at(static_cast<int>(i)).size(), 1u);
    }
}

TEST(Alias, ArrayCellsCollapseIntoTheirBlock) {
    const auto p = corpus("array_pointer");
    const auto f = compute_alias(p);
    // p = &a[i]; *p = 42; p += secret; *p = 43;
    EXPECT_EQ(f.at(1), names(p, {"a"}));
    EXPECT_EQ(f.at(3), names(p, {"a"}));
}

TEST(Alias, FollowsTwoLevelsOfIndirection) {
    const auto p = corpus("ptrarray");
    const auto f = compute_alias(p);
    // pp = &b[1]; *pp = &x; **pp = secret; y = *b[1];
    EXPECT_EQ(f.at(0), names(p, {"pp"}));
    EXPECT_EQ(f.at(1), names(p, {"b"}));
    EXPECT_EQ(f.at(2), names(p, {"x", "y"}));
    EXPECT_EQ(f.at(3), names(p, {"y"}));
}

TEST(Alias, SeedsFromInitialMemories) {
    const auto p = program("int x; int y; int *q = &x; *q = 1;");
    EXPECT_EQ(compute_alias(p).at(0), names(p, {"x"}));
    Memory other = p.initial_memory;
    other.at(block(p, "q")) = ScalarVal{Ptr{Loc{block(p, "y"), std::nullopt}}};
    EXPECT_EQ(compute_alias(p, std::span<const Memory>(&other, 1)).at(0), names(p, {"x", "y"}));
}

TEST(Admissibility, TopIsAdmissible) {
    for (const char* name : {"explicit_flow", "implicit_flow", "pointer_flow", "array_flow", "array_pointer", "loop", "ptrarray"}) {
        const auto p = corpus(name);
        EXPECT_TRUE(check_admissible(AliasFunction::top(p.assign_count, p.vars.size()), p, 10000).passed()) << name;
    }
}

TEST(Admissibility, EmptySetOnAReachedAssignmentIsACounterexample) {
    const auto p = corpus("pointer_flow");
    auto f = compute_alias(p);
    f.at(2).clear();
    const auto v = check_admissible(f, p, 10000);
    EXPECT_EQ(v.kind, AdmissibilityVerdict::Kind::counterexample);
    EXPECT_EQ(v.assign_id, 2);
    EXPECT_EQ(v.block, block(p, "x"));
    EXPECT_EQ(v.pos.line, 12);
    ASSERT_TRUE(v.snapshot.has_value());
}

TEST(Admissibility, UnreachedAssignmentDoesNotMatter) {
    const auto p = program("int x; int c; if (c) { x = 1; }");
    auto f = compute_alias(p);
    f.at(0).clear();
    EXPECT_TRUE(check_admissible(f, p, 100).passed());
}

TEST(Admissibility, ComputedFunctionIsAdmissibleOnTheCorpus) {
    for (const char* name : {"explicit_flow", "implicit_flow", "pointer_flow", "array_flow", "array_pointer", "loop", "ptrarray"}) {
        const auto p = corpus(name);
        EXPECT_TRUE(check_admissible(compute_alias(p), p, 10000).passed()) << name;
    }
}

TEST(Admissibility, FaultsPropagate) {
    const auto p = program("int *q; *q = 1;");
    EXPECT_THROW((void)check_admissible(compute_alias(p), p, 100), Fault);
}

TEST(Admissibility, ComputedFunctionIsAdmissibleAndMonotoneOnGeneratedPrograms) {
    std::mt19937_64 rng(99);
    int checked = 0;
    for (std::uint64_t i = 0; i < 400; ++i) {
        GenConfig cfg;
        cfg.seed = instance_seed(5, i);
        const auto p = generate_program(cfg);
        const Memory m = random_memory(p, rng);
        const auto f = compute_alias(p, std::span<const Memory>(&m, 1));
        AdmissibilityVerdict v;
        try {
            v = check_admissible(f, p, cfg.fuel, m);
        } catch (const Fault&) {
            continue;
        }
        if (v.kind == AdmissibilityVerdict::Kind::timeout) {
            continue;
        }
        ++checked;
        ASSERT_TRUE(v.passed()) << "instance " << i;
        // Enlarging any set keeps the function admissible.
        auto bigger = f;
        for (std::size_t k = 0; k < bigger.size(); ++k) {
            bigger.at(static_cast<int>(k)).insert(BlockId{static_cast<std::uint32_t>(rng() % p.vars.size())});
        }
        ASSERT_TRUE(check_admissible(bigger, p, cfg.fuel, m).passed()) << "instance " << i;
    }
    EXPECT_GT(checked, 300);
}
