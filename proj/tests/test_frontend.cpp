#include <gtest/gtest.h>

#include "flowmon/emit.hpp"
#include "flowmon/generator.hpp"
#include "support.hpp"

using namespace flowmon;
using flowmon::test::corpus;
using flowmon::test::program;

namespace {

const char* const kCorpus[] = {"explicit_flow", "implicit_flow", "pointer_flow", "array_flow", "array_pointer", "policy", "loop", "ptrarray"};

template <class E> SourcePos error_pos(std::string_view src) {
    try {
        (void)program(src);
    } catch (const E& e) {
        return e.pos();
    }
    ADD_FAILURE() << "no error for: " << src;
    return {};
}

} // namespace

TEST(Frontend, DeclarationsGetDenseBlocksInOrder) {
    const auto p = program("int x; int a[3]; int *p = &a[1]; int **q = &p;");
    ASSERT_EQ(p.vars.size(), 4u);
    for (std::uint32_t i = 0; i < 4; ++i) {
        EXPECT_EQ(p.vars[i].block.index, i);
    }
    EXPECT_EQ(p.find_var("a")->type, ObjType::array_of(ObjType::int_type(), 3));
    EXPECT_EQ(p.find_var("q")->type, ObjType::ptr_to(ObjType::ptr_to(ObjType::int_type())));
    const BlockVal p_init = ScalarVal{Ptr{Loc{BlockId{1}, 1}}};
    const BlockVal q_init = ScalarVal{Ptr{Loc{BlockId{2}, std::nullopt}}};
    EXPECT_EQ(p.initial_memory.at(BlockId{2}), p_init);
    EXPECT_EQ(p.initial_memory.at(BlockId{3}), q_init);
}

TEST(Frontend, DefaultsAreZeroForIntsAndUnsetForPointers) {
    const auto p = program("int x; int a[2]; int *p;");
    EXPECT_EQ(p.initial_memory.at(BlockId{0}), BlockVal{ScalarVal{Num{0}}});
    EXPECT_EQ(p.initial_memory.at(BlockId{1}), BlockVal{(ArrayVal{{Num{0}, Num{0}}})});
    EXPECT_EQ(p.initial_memory.at(BlockId{2}), BlockVal{ScalarVal{Uninit{}}});
}

TEST(Frontend, AnnotationsSetInitialLabelsAndDefaultToPublic) {
    const auto p = program("int x; int s = 1; /*@ private */ int t; /*@ public */");
    EXPECT_EQ(p.initial_labels.at(BlockId{0}), Label::public_level());
    EXPECT_EQ(p.initial_labels.at(BlockId{1}), Label::private_level());
    EXPECT_EQ(p.initial_labels.at(BlockId{2}), Label::public_level());
    EXPECT_FALSE(p.vars[0].annotation.has_value());
    EXPECT_TRUE(p.vars[2].annotation.has_value());
}

TEST(Frontend, CompoundAssignmentsDesugar) {
    const auto a = program("int x; int y; x |= y; x += 2; x++;");
    const auto b = program("int x; int y; x = x | y; x = x + 2; x = x + 1;");
    EXPECT_TRUE(structurally_equal(a, b));
}

TEST(Frontend, AssignmentIdsFollowProgramOrder) {
    const auto p = program("int x; int a[2]; x = 1; if (x) { a[0] = 2; } else { x = 3; } while (x < 1) x = 4;");
    EXPECT_EQ(p.assign_count, 4);
    std::vector<int> ids;
    for_each_instr(p.body, [&](const Instr& i) {
        if (const auto* f = assign_fields(i)) {
            ids.push_back(f->id);
        }
    });
    EXPECT_EQ(ids, (std::vector<int>{0, 1, 2, 3}));
}

TEST(Frontend, ArrayElementTargetsBecomeArrayAssignments) {
    const auto p = program("int a[2]; int *p = &a[0]; a[1] = 1; *p = 2;");
    const auto stmts = flatten_seq(p.body);
    ASSERT_EQ(stmts.size(), 2u);
    EXPECT_TRUE(std::holds_alternative<Instr::AssignArrayElem>(stmts[0]->node));
    // Through a pointer the target shape is only known at run time.
    EXPECT_TRUE(std::holds_alternative<Instr::Assign>(stmts[1]->node));
}

TEST(Frontend, PointerArithmeticBecomesPtrAdd) {
    const auto p = program("int a[4]; int *p = &a[0]; p = p + 2;");
    const auto* f = assign_fields(*flatten_seq(p.body)[0]);
    ASSERT_NE(f, nullptr);
    EXPECT_TRUE(std::holds_alternative<Expr::PtrAdd>(f->value->node));
}

TEST(Frontend, AssertionsParseInBothForms) {
    const auto p = program("int x; int x_s;\n//@ assert security_status(x) == public;\n//@ assert (x_s) == 3;\n");
    const auto sites = p.assertions();
    ASSERT_EQ(sites.size(), 2u);
    EXPECT_EQ(sites[0].var, "x");
    EXPECT_EQ(sites[0].pos.line, 2);
    EXPECT_EQ(sites[1].bound, Label{3});
}

TEST(Frontend, SyntaxErrorsCarryPositions) {
    EXPECT_EQ(error_pos<SyntaxError>("int x;\nx = ;"), (SourcePos{2, 5}));
    EXPECT_EQ(error_pos<SyntaxError>("int x; x = 1"), (SourcePos{1, 13}));
    EXPECT_EQ(error_pos<SyntaxError>("int x; /*@ secret */").line, 1);
    EXPECT_EQ(error_pos<SyntaxError>("int x; x = 1; int y;").line, 1);
    EXPECT_THROW((void)program("int x; 3 = x;"), SyntaxError);
    EXPECT_THROW((void)program("int x; int x;"), SyntaxError);
}

TEST(Frontend, TypeErrors) {
    EXPECT_THROW((void)program("int x; y = 1;"), TypeError);
    EXPECT_THROW((void)program("int x; int *p; x = p;"), TypeError);
    EXPECT_THROW((void)program("int x; x[0] = 1;"), TypeError);
    EXPECT_THROW((void)program("int a[2]; int b[2]; a = b;"), TypeError);
    EXPECT_THROW((void)program("int *p; if (p) p = p;"), TypeError);
    EXPECT_THROW((void)program("int a[2] = {1};"), TypeError);
    EXPECT_THROW((void)program("int *p = &q; int q;"), TypeError);
    EXPECT_THROW((void)program("int x;\n//@ assert security_status(nope) == public;\n"), TypeError);
    EXPECT_EQ(error_pos<TypeError>("int x;\n  y = 1;"), (SourcePos{2, 3}));
}

TEST(Frontend, TypeOfExpressions) {
    const auto p = program("int a[2]; int *p = &a[0]; int **q = &p;");
    const auto pi = ObjType::ptr_to(ObjType::int_type());
    EXPECT_EQ(type_of(p, *read(deref(read_var("q")))), pi);
    EXPECT_EQ(type_of(p, *addr_of(elem("a", constant(1)))), pi);
    EXPECT_EQ(type_of(p, *read(elem("a", constant(0)))), ObjType::int_type());
}

TEST(Emit, RoundTripIsStructurallyEqualOnTheCorpus) {
    for (const char* name : kCorpus) {
        SCOPED_TRACE(name);
        const auto p = corpus(name);
        const std::string once = emit(p);
        const auto q = program(once);
        EXPECT_TRUE(structurally_equal(p, q));
        EXPECT_EQ(emit(q), once);
    }
}

TEST(Emit, RoundTripOnGeneratedPrograms) {
    for (std::uint64_t i = 0; i < 300; ++i) {
        GenConfig cfg;
        cfg.seed = instance_seed(11, i);
        const auto p = generate_program(cfg);
        const auto text = emit(p);
        const auto q = program(text);
        ASSERT_TRUE(structurally_equal(p, q)) << text;
    }
}

TEST(Emit, EmptyProgramPrintsDeclarationsOnly) {
    EXPECT_EQ(emit(program("int x = 2; int *p = &x;")), "int x = 2;\nint *p = &x;\n");
    EXPECT_EQ(emit(program("")), "");
}

TEST(Emit, ResugarsSelfUpdates) {
    const auto text = emit(program("int x; int *p; x = x | 4; p = p + x;"));
    EXPECT_NE(text.find("x |= 4;"), std::string::npos) << text;
    EXPECT_NE(text.find("p += x;"), std::string::npos) << text;
}

TEST(Emit, NestedControlFlowIsIndented) {
    const auto text = emit(program("int x; while (x < 3) { if (x) x = x + 1; else x = 2; }"));
    EXPECT_NE(text.find("while (x < 3) {\n    if (x) {\n        x = x + 1;\n    } else {\n        x = 2;\n    }\n}"),
              std::string::npos)
        << text;
}

TEST(Emit, CRenderingWrapsTheBodyInMain) {
    const auto text = emit_c(program("int x;\n//@ assert security_status(x) == public;\n"), "/* rt */");
    EXPECT_EQ(text.rfind("/* rt */", 0), 0u);
    EXPECT_NE(text.find("int main(void) {"), std::string::npos);
    EXPECT_NE(text.find("return 0;"), std::string::npos);
}
