#include <gtest/gtest.h>

#include <random>
#include <set>

#include "nl2spatial/errors.hpp"
#include "nl2spatial/formula.hpp"
#include "support/sorting_example.hpp"
#include "support/generators.hpp"

namespace nl2spatial {
namespace {

Formula atom_a() { return Formula::atom(make_atom(AtomKind::touch, {"obj_1", "obj_2"}, {0.1})); }
Formula atom_b() { return Formula::atom(make_atom(AtomKind::close_to, {"obj_1", "obj_3"}, {2.0})); }

TEST(Subformulas, AtomIsItsOnlySubformula) {
  auto subs = subformulas(atom_a());
  ASSERT_EQ(subs.size(), 1u);
  EXPECT_TRUE(subs[0].path.empty());
  EXPECT_EQ(subs[0].formula, atom_a());
}

TEST(Subformulas, PreOrderWithChildPaths) {
  auto f = Formula::conjunction({atom_a(), atom_b()});
  auto subs = subformulas(f);
  ASSERT_EQ(subs.size(), 3u);
  EXPECT_EQ(subs[0].path, Path{});
  EXPECT_EQ(subs[0].formula, f);
  EXPECT_EQ(subs[1].path, Path{0});
  EXPECT_EQ(subs[1].formula, atom_a());
  EXPECT_EQ(subs[2].path, Path{1});
  EXPECT_EQ(subs[2].formula, atom_b());
}

TEST(Subformulas, SortingExampleHasTwelveNodes) {
  auto subs = subformulas(testing::sorting_example());
  ASSERT_EQ(subs.size(), 12u);
  int leaves = 0;
  std::map<std::size_t, int> per_layer;
  for (const auto& s : subs) {
    per_layer[s.path.size()]++;
    if (s.formula.is_atom()) ++leaves;
  }
  EXPECT_EQ(leaves, 5);
  EXPECT_EQ(per_layer[0], 1);
  EXPECT_EQ(per_layer[1], 3);
  EXPECT_EQ(per_layer[2], 3);
  EXPECT_EQ(per_layer[3], 5);
}

TEST(Subformulas, PathsAreUniqueAndResolve) {
  std::mt19937_64 rng(11);
  for (int n = 0; n < 200; ++n) {
    auto f = testing::random_formula(rng);
    std::set<Path> seen;
    for (const auto& s : subformulas(f)) {
      EXPECT_TRUE(seen.insert(s.path).second);
      EXPECT_EQ(at_path(f, s.path), s.formula);
    }
  }
}

TEST(StructureMetrics, SingleAtom) {
  EXPECT_EQ(structure_metrics(atom_a()), (StructureMetrics{1, 0, 1}));
}

TEST(StructureMetrics, UnaryTemporal) {
  EXPECT_EQ(structure_metrics(Formula::always({0, 5}, atom_a())), (StructureMetrics{2, 1, 1}));
}

TEST(StructureMetrics, SortingExample) {
  EXPECT_EQ(structure_metrics(testing::sorting_example()), (StructureMetrics{4, 3, 5}));
}

TEST(StructureMetrics, Laws) {
  std::mt19937_64 rng(12);
  for (int n = 0; n < 300; ++n) {
    auto f = testing::random_formula(rng);
    auto m = structure_metrics(f);
    EXPECT_GE(m.depth, 1);
    EXPECT_GE(m.leaf_count, 1);
    EXPECT_EQ(m.max_breadth == 0, f.is_atom());
  }
}

TEST(RequiredHorizon, NestedBoundsAdd) {
  EXPECT_EQ(required_horizon(atom_a()), 0);
  EXPECT_EQ(required_horizon(Formula::always({1, 4}, atom_a())), 4);
  EXPECT_EQ(required_horizon(Formula::eventually({0, 2}, Formula::always({1, 3}, atom_a()))), 5);
  // Until contributes its bound plus the larger operand horizon.
  auto u = Formula::until({0, 3}, Formula::always({0, 2}, atom_a()), Formula::eventually({0, 5}, atom_b()));
  EXPECT_EQ(required_horizon(u), 8);
  EXPECT_EQ(required_horizon(Formula::conjunction({Formula::always({0, 2}, atom_a()), atom_b()})), 2);
}

TEST(Validate, WellFormedIsOk) {
  EXPECT_TRUE(validate_formula(testing::sorting_example()).empty());
}

TEST(Validate, DuplicateArgument) {
  auto f = Formula::atom(make_atom(AtomKind::touch, {"obj_1", "obj_1"}, {0.1}));
  auto v = validate_formula(f);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::duplicate_arg);
}

TEST(Validate, NonPositiveConstant) {
  auto f = Formula::atom(make_atom(AtomKind::close_to, {"obj_1", "obj_2"}, {-1.0}));
  auto v = validate_formula(f);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::non_positive_constant);
}

TEST(Validate, ReportsPathOfOffendingNode) {
  auto bad = Formula::atom(make_atom(AtomKind::encl_in, {"obj_1", "reg_1"}, {0.0}));
  auto f = Formula::always({0, 3}, Formula::conjunction({atom_a(), bad}));
  auto v = validate_formula(f);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].path, (Path{0, 1}));
}

TEST(Validate, IntervalAndShapeProblems) {
  auto f = Formula::eventually({5, 3}, atom_a());
  auto v = validate_formula(f);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::interval_order);

  SpatialAtom a;
  a.kind = AtomKind::between_px;
  a.args = {Ident("obj_1"), Ident("2bad")};
  a.constants = {0.1, 0.2};
  auto kinds = validate_formula(Formula::atom(a));
  std::set<ViolationKind> got;
  for (const auto& x : kinds) got.insert(x.kind);
  EXPECT_TRUE(got.contains(ViolationKind::wrong_ident_count));
  EXPECT_TRUE(got.contains(ViolationKind::wrong_constant_count));
  EXPECT_TRUE(got.contains(ViolationKind::invalid_ident));
}

TEST(Validate, OrientationToleranceRange) {
  auto ok = Formula::atom(make_atom(AtomKind::oriented, {"obj_1", "obj_2"}, {2.0}));
  auto bad = Formula::atom(make_atom(AtomKind::oriented, {"obj_1", "obj_2"}, {2.5}));
  EXPECT_TRUE(validate_formula(ok).empty());
  ASSERT_EQ(validate_formula(bad).size(), 1u);
  EXPECT_EQ(validate_formula(bad)[0].kind, ViolationKind::constant_out_of_range);
}

TEST(Construction, ConnectivesNeedTwoOperands) {
  EXPECT_THROW(Formula::conjunction({atom_a()}), ArityError);
  EXPECT_THROW(Formula::disjunction({}), ArityError);
}

TEST(Ident, KindFromPrefix) {
  EXPECT_EQ(Ident("reg_s").kind(), IdentKind::region);
  EXPECT_EQ(Ident("obj_r").kind(), IdentKind::object);
  EXPECT_TRUE(is_valid_ident_name("_x9"));
  EXPECT_FALSE(is_valid_ident_name("9x"));
  EXPECT_FALSE(is_valid_ident_name(""));
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(format_number(1.5), "1.5");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(0.05), "0.05");
}

}  // namespace
}  // namespace nl2spatial
