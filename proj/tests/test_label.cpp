#include <random>

#include <gtest/gtest.h>

#include "flowmon/label.hpp"
#include "flowmon/model.hpp"

using namespace flowmon;

TEST(Label, BottomIsPublicAndPrivateIsOne) {
    EXPECT_EQ(Label::bottom(), Label::public_level());
    EXPECT_EQ(Label::private_level().bits(), 1u);
    EXPECT_TRUE(label_leq(Label::public_level(), Label::private_level()));
    EXPECT_FALSE(label_leq(Label::private_level(), Label::public_level()));
}

TEST(Label, JoinIsBitwiseOr) {
    EXPECT_EQ(label_join(Label{0b0101}, Label{0b0011}), Label{0b0111});
    Label l{2};
    l |= Label{1};
    EXPECT_EQ(l, Label{3});
}

TEST(Label, OrderIsSubset) {
    EXPECT_TRUE(label_leq(Label{0b010}, Label{0b110}));
    EXPECT_FALSE(label_leq(Label{0b011}, Label{0b110}));
    // Incomparable labels exist beyond the two-point lattice.
    EXPECT_FALSE(label_leq(Label{1}, Label{2}));
    EXPECT_FALSE(label_leq(Label{2}, Label{1}));
}

TEST(Label, DisplayUsesAliasesForTheTwoPointLattice) {
    EXPECT_EQ(to_string(Label{0}), "public");
    EXPECT_EQ(to_string(Label{1}), "private");
    EXPECT_EQ(to_string(Label{6}), "6");
}

TEST(Label, LatticeLawsOnRandomLabels) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 2000; ++i) {
        const Label a{rng()};
        const Label b{rng()};
        const Label c{rng() & 0xff};
        EXPECT_EQ(a | b, b | a);
        EXPECT_EQ((a | b) | c, a | (b | c));
        EXPECT_EQ(a | a, a);
        EXPECT_TRUE(label_leq(a, a | b));
        EXPECT_TRUE(label_leq(Label::bottom(), a));
        EXPECT_TRUE(label_leq(a, Label::top()));
        // Join is the least upper bound.
        if (label_leq(a, c) && label_leq(b, c)) {
            EXPECT_TRUE(label_leq(a | b, c));
        }
        // Antisymmetry.
        if (label_leq(a, b) && label_leq(b, a)) {
            EXPECT_EQ(a, b);
        }
    }
}

TEST(Model, SEquivalenceIgnoresBlocksAboveS) {
    Memory m1({ScalarVal{Num{1}}, ScalarVal{Num{2}}});
    Memory m2({ScalarVal{Num{1}}, ScalarVal{Num{9}}});
    LabelMemory g({Label{0}, Label{1}});
    EXPECT_TRUE(s_equivalent(g, Label{0}, m1, m2));
    EXPECT_FALSE(s_equivalent(g, Label{1}, m1, m2));
}

TEST(Model, LessRestrictiveUpTo) {
    LabelMemory g1({Label{1}, Label{2}});
    LabelMemory g2({Label{0}, Label{3}});
    // Block 1 is above s = 1, so only block 0 matters.
    EXPECT_TRUE(less_restrictive_up_to(Label{1}, g2, g1));
    EXPECT_FALSE(less_restrictive_up_to(Label{3}, g2, g1));
}

TEST(Model, MemoryAccessOutOfRangeThrows) {
    Memory m;
    EXPECT_THROW((void)m.at(BlockId{0}), std::out_of_range);
    const BlockId b = m.push(ScalarVal{Num{4}});
    EXPECT_EQ(b.index, 0u);
    EXPECT_TRUE(m.contains(b));
    EXPECT_THROW((void)mem_equal(m, Memory{}, b), std::domain_error);
}

TEST(Model, CDeclarations) {
    const auto pi = ObjType::ptr_to(ObjType::int_type());
    EXPECT_EQ(c_declaration(ObjType::int_type(), "x"), "int x");
    EXPECT_EQ(c_declaration(pi, "p"), "int *p");
    EXPECT_EQ(c_declaration(ObjType::array_of(pi, 10), "b"), "int *b[10]");
    EXPECT_EQ(c_declaration(ObjType::ptr_to(pi), "q"), "int **q");
}
