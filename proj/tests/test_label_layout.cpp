#include <gtest/gtest.h>

#include "flowmon/label_layout.hpp"

using namespace flowmon;

namespace {

const ObjType tint = ObjType::int_type();
const ObjType tptr = ObjType::ptr_to(ObjType::int_type());

LabelType lt(LabelKind k, int d, ObjType t) { return LabelType{k, d, std::move(t)}; }

} // namespace

TEST(LabelLayout, PtrLabelAddsOneIndirection) {
    EXPECT_EQ(ptr_label(lt(LabelKind::Exact, 0, tint)), lt(LabelKind::Exact, 1, tptr));
    EXPECT_EQ(ptr_label(lt(LabelKind::Summary, 1, tptr)), lt(LabelKind::Summary, 2, ObjType::ptr_to(tptr)));
}

TEST(LabelLayout, ArrayLabelWrapsTheShape) {
    EXPECT_EQ(array_label(10, lt(LabelKind::Exact, 0, tint)), lt(LabelKind::Exact, 0, ObjType::array_of(tint, 10)));
    EXPECT_EQ(array_label(10, lt(LabelKind::Summary, 1, tptr)),
              lt(LabelKind::Summary, 1, ObjType::array_of(tptr, 10)));
    EXPECT_EQ(array_label(2, lt(LabelKind::Exact, 1, tptr)), lt(LabelKind::Exact, 1, ObjType::array_of(tptr, 2)));
}

TEST(LabelLayout, ScalarsHaveOneExactLabel) {
    EXPECT_EQ(labels(tint), (std::vector<LabelType>{lt(LabelKind::Exact, 0, tint)}));
}

TEST(LabelLayout, PointersGetSummaryAndExactPerLevel) {
    const std::vector<LabelType> one{
        lt(LabelKind::Exact, 0, tint),
        lt(LabelKind::Summary, 1, tptr),
        lt(LabelKind::Exact, 1, tptr),
    };
    EXPECT_EQ(labels(tptr), one);
    const auto two = labels(ObjType::ptr_to(tptr));
    ASSERT_EQ(two.size(), 5u);
    EXPECT_EQ(two[3], lt(LabelKind::Summary, 2, ObjType::ptr_to(tptr)));
    EXPECT_EQ(two[4], lt(LabelKind::Exact, 2, ObjType::ptr_to(tptr)));
}

TEST(LabelLayout, ArrayOfPointers) {
    const auto b = ObjType::array_of(tptr, 10);
    EXPECT_EQ(labels_aux(b), (std::vector<LabelType>{
                                 lt(LabelKind::Exact, 0, ObjType::array_of(tint, 10)),
                                 lt(LabelKind::Summary, 1, ObjType::array_of(tptr, 10)),
                                 lt(LabelKind::Exact, 1, ObjType::array_of(tptr, 10)),
                             }));
    EXPECT_EQ(labels(b), (std::vector<LabelType>{
                             lt(LabelKind::Summary, 0, tint),
                             lt(LabelKind::Exact, 0, ObjType::array_of(tint, 10)),
                             lt(LabelKind::Summary, 1, ObjType::array_of(tptr, 10)),
                             lt(LabelKind::Exact, 1, ObjType::array_of(tptr, 10)),
                         }));
}

TEST(LabelLayout, IntArrayHasSummaryAndExactCells) {
    EXPECT_EQ(labels(ObjType::array_of(tint, 2)), (std::vector<LabelType>{
                                                      lt(LabelKind::Summary, 0, tint),
                                                      lt(LabelKind::Exact, 0, ObjType::array_of(tint, 2)),
                                                  }));
}

TEST(LabelLayout, DeclarationsForAnArrayOfPointers) {
    std::vector<std::string> got;
    for (const auto& d : label_decls("b", ObjType::array_of(tptr, 10))) {
        got.push_back(d.c_declaration() + ";");
    }
    EXPECT_EQ(got, (std::vector<std::string>{
                       "int b_status;",
                       "int b_status_d0[10];",
                       "int *b_status_d1_summary[10];",
                       "int *b_status_d1[10];",
                   }));
}

TEST(LabelLayout, Naming) {
    EXPECT_EQ(label_name("x", LabelKind::Exact, 0), "x_status");
    EXPECT_EQ(label_name("a", LabelKind::Summary, 0), "a_status");
    EXPECT_EQ(label_name("a", LabelKind::Exact, 0, true), "a_status_d0");
    EXPECT_EQ(label_name("p", LabelKind::Exact, 1), "p_status_d1");
    EXPECT_EQ(label_name("p", LabelKind::Summary, 2), "p_status_d2_summary");
}

TEST(LabelLayout, InitializationKinds) {
    const auto d = label_decls("q", ObjType::ptr_to(tptr));
    ASSERT_EQ(d.size(), 5u);
    EXPECT_EQ(d[0].init, LabelInit::annotation);
    for (std::size_t i = 1; i < d.size(); ++i) {
        EXPECT_EQ(d[i].init, LabelInit::mirror);
    }
}

TEST(LabelLayout, LayoutLineAndDisplay) {
    const auto d = label_decls("b", ObjType::array_of(tptr, 10));
    EXPECT_EQ(layout_line(d[0]), "b_status : int (kind=summary, depth=0)");
    EXPECT_EQ(layout_line(d[2]), "b_status_d1_summary : int *[10] (kind=summary, depth=1)");
    EXPECT_EQ(to_string(d[1].label), "Label Exact 0 (TArray TInt 10)");
}
