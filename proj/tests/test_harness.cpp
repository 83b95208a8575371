#include <gtest/gtest.h>

#include "flowmon/harness.hpp"
#include "support.hpp"

using namespace flowmon;
using flowmon::test::corpus;

TEST(Generator, IsDeterministic) {
    GenConfig cfg;
    cfg.seed = 1234;
    EXPECT_EQ(emit(generate_program(cfg)), emit(generate_program(cfg)));
    EXPECT_EQ(instance_seed(1, 2), instance_seed(1, 2));
    EXPECT_NE(instance_seed(1, 2), instance_seed(2, 1));
}

TEST(Generator, ProgramsAreWellTypedAndInstrumentable) {
    for (std::uint64_t i = 0; i < 300; ++i) {
        GenConfig cfg;
        cfg.seed = instance_seed(3, i);
        const auto src = generate_source(cfg);
        TypedProgram p;
        ASSERT_NO_THROW(p = elaborate(src)) << i;
        ASSERT_NO_THROW((void)instrument(p)) << emit(p);
    }
}

TEST(Generator, SEquivalentPairsAgreeBelowS) {
    for (std::uint64_t i = 0; i < 200; ++i) {
        const auto in = make_instance(GenConfig{}, 8, i);
        const auto [m1, m2] = generate_s_equivalent_pair(in.program, in.s, in.seed);
        EXPECT_TRUE(s_equivalent(in.program.initial_labels, in.s, m1, m2));
    }
}

TEST(Generator, RandomLabelsStayWithinTheRequestedBits) {
    std::mt19937_64 rng(4);
    const auto p = corpus("ptrarray");
    for (int i = 0; i < 100; ++i) {
        for (std::uint32_t b = 0; b < p.vars.size(); ++b) {
            EXPECT_TRUE(label_leq(random_labels(p, 0.5, 2, rng).at(BlockId{b}), Label{3}));
        }
    }
}

TEST(Soundness, CorpusProgramsPassForEveryThreshold) {
    for (const char* name : {"explicit_flow", "implicit_flow", "pointer_flow", "array_flow", "array_pointer", "loop", "ptrarray"}) {
        const auto p = corpus(name);
        for (std::uint64_t s = 0; s < 3; ++s) {
            for (std::uint64_t seed = 0; seed < 20; ++seed) {
                const auto v = check_soundness_instance(p, Label{s}, seed);
                EXPECT_NE(v.kind, VerdictKind::Violation) << name << ": " << v.detail;
            }
        }
    }
}

TEST(Agreement, CorpusProgramsAgreeFromRandomStores) {
    for (const char* name : {"explicit_flow", "implicit_flow", "pointer_flow", "array_flow", "array_pointer", "loop", "ptrarray"}) {
        const auto p = corpus(name);
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            const auto v = check_transform_agreement(p, seed);
            EXPECT_NE(v.kind, VerdictKind::Violation) << name << ": " << v.detail;
        }
    }
}

TEST(Fuzz, CountZeroIsAllZeros) {
    FuzzOptions o;
    o.count = 0;
    EXPECT_EQ(summary_line(fuzz(o).total()), "PASS=0 TIMEOUT=0 FAULT=0 VIOLATION=0");
}

TEST(Fuzz, SmallRunOfEveryCheckHasNoViolations) {
    FuzzOptions o;
    o.seed = 17;
    o.count = 300;
    o.checks = {CheckKind::soundness, CheckKind::agreement, CheckKind::lemma};
    const auto r = fuzz(o);
    for (const auto& c : r.checks) {
        EXPECT_EQ(c.counts.violation, 0u) << to_string(c.check);
        EXPECT_GT(c.counts.pass, 200u) << to_string(c.check);
    }
    EXPECT_EQ(r.stats.failures(), 0u);
    EXPECT_EQ(r.admissibility.passed, r.admissibility.checked);
}

TEST(Fuzz, IdenticalSeedsGiveIdenticalVerdicts) {
    FuzzOptions o;
    o.seed = 5;
    o.count = 100;
    o.checks = {CheckKind::soundness, CheckKind::lemma};
    const auto a = fuzz(o);
    const auto b = fuzz(o);
    for (std::size_t i = 0; i < a.checks.size(); ++i) {
        EXPECT_EQ(summary_line(a.checks[i].counts), summary_line(b.checks[i].counts));
    }
    // Ranges compose: instance i does not depend on where the run starts.
    FuzzOptions tail = o;
    tail.start = 50;
    tail.count = 50;
    FuzzOptions head = o;
    head.count = 50;
    auto sum = fuzz(head).total();
    sum += fuzz(tail).total();
    EXPECT_EQ(summary_line(sum), summary_line(a.total()));
}

TEST(Fuzz, MutantsAreCaughtAndWitnessesReplay) {
    for (const Mutation m : {Mutation::drop_pc_in_scalar_assign, Mutation::strong_array_update}) {
        FuzzOptions o;
        o.seed = 1;
        o.count = 3000;
        o.mutation = m;
        o.stop_at_violation = true;
        const auto r = fuzz(o);
        ASSERT_EQ(r.checks.size(), 1u);
        ASSERT_EQ(r.checks[0].witnesses.size(), 1u);
        const Witness& w = r.checks[0].witnesses[0];
        const Witness back = parse_witness(emit(w.program), format_witness_store(w));
        CheckOptions with;
        with.mutation = m;
        const auto v = replay(back, with);
        EXPECT_EQ(v.kind, VerdictKind::Violation);
        EXPECT_EQ(v.detail, w.detail);
        // The unmutated monitor is sound on the same witness.
        EXPECT_NE(replay(back).kind, VerdictKind::Violation);
    }
}

TEST(Lemma, PremiseAndConclusion) {
    std::uint64_t premises = 0;
    for (std::uint64_t i = 0; i < 500; ++i) {
        const auto in = make_instance(GenConfig{}, 2, i);
        const auto r = check_lemma_instance(in.program, i);
        EXPECT_NE(r.verdict.kind, VerdictKind::Violation) << r.verdict.detail;
        premises += r.premise ? 1 : 0;
    }
    EXPECT_GT(premises, 300u);
}

TEST(Lemma, UnmetPremisesAreNotCounted) {
    // Γ₂ gives x a larger label than Γ₁ although x is below s under Γ₁.
    Witness w;
    w.check = CheckKind::lemma;
    w.program = elaborate(parse("int x;"));
    w.expr = read_var("x");
    w.s = Label{0};
    w.m1 = w.program.initial_memory;
    w.m2 = w.m1;
    w.g1 = LabelMemory({Label{0}});
    w.g2 = LabelMemory({Label{1}});
    auto r = replay_lemma(w);
    EXPECT_FALSE(r.premise);
    EXPECT_EQ(r.verdict.kind, VerdictKind::Pass);

    w.g2 = w.g1;
    w.m2 = Memory({ScalarVal{Num{5}}});
    EXPECT_FALSE(replay_lemma(w).premise);

    w.m2 = w.m1;
    r = replay_lemma(parse_witness(emit(w.program), format_witness_store(w)));
    EXPECT_TRUE(r.premise);
    EXPECT_EQ(r.verdict.kind, VerdictKind::Pass);
}

TEST(Witness, MalformedStoresAreRejected) {
    EXPECT_THROW((void)parse_witness("int x;", "check nonsense\n"), std::invalid_argument);
    EXPECT_THROW((void)parse_witness("int x;", "m1 y = 3 label 0\n"), std::invalid_argument);
    EXPECT_THROW((void)parse_witness("int x;", "m1 x = &z label 0\n"), std::invalid_argument);
    EXPECT_THROW((void)parse_witness("int x;", "check lemma\n"), std::invalid_argument);
}
