#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "nl2spatial/errors.hpp"
#include "nl2spatial/monitor.hpp"
#include "nl2spatial/syntax.hpp"
#include "support/expansion_oracle.hpp"
#include "support/generators.hpp"

namespace nl2spatial {
namespace {

DiskObject disk(std::string id, double x, double y, double r, std::optional<Vec2> heading = {}) {
  DiskObject d;
  d.id = Ident(std::move(id));
  d.kind = d.id.kind();
  d.center = {x, y};
  d.radius = r;
  d.heading = heading;
  return d;
}

SceneState scene(std::initializer_list<DiskObject> objs) {
  SceneState s;
  for (const auto& d : objs) s.add(d);
  return s;
}

Formula atom(AtomKind k, std::initializer_list<std::string_view> args, double c) {
  return Formula::atom(make_atom(k, args, {c}));
}

TEST(RhoAtom, CloseToIsToleranceMinusDistance) {
  auto s = scene({disk("i", 0, 0, 1), disk("j", 3, 4, 1)});
  EXPECT_DOUBLE_EQ(rho_atom(s, make_atom(AtomKind::close_to, {"i", "j"}, {6.0})), 1.0);
}

TEST(RhoAtom, FarFromAtZeroDistance) {
  auto s = scene({disk("i", 2, 2, 1), disk("j", 2, 2, 0.5)});
  EXPECT_EQ(rho_atom(s, make_atom(AtomKind::far_from, {"i", "j"}, {2.0})), -2.0);
}

TEST(RhoAtom, TouchAtZeroClearance) {
  auto s = scene({disk("i", 0, 0, 1), disk("j", 2, 0, 1)});
  EXPECT_EQ(rho_atom(s, make_atom(AtomKind::touch, {"i", "j"}, {0.1})), 0.1);
}

TEST(RhoAtom, LeftOfWithMargin) {
  auto s = scene({disk("i", 0, 0, 1), disk("j", 5, 0, 1)});
  EXPECT_EQ(rho_atom(s, make_atom(AtomKind::left_of, {"i", "j"}, {0.5})), 2.5);
}

TEST(RhoAtom, OrientedIdenticalHeadings) {
  Vec2 u{0.6, 0.8};
  auto s = scene({disk("i", 0, 0, 1, u), disk("j", 3, 0, 1, u)});
  EXPECT_EQ(rho_atom(s, make_atom(AtomKind::oriented, {"i", "j"}, {0.5})), 0.5);
}

TEST(RhoAtom, OrientedOppositeHeadings) {
  // ecd of opposite unit vectors is 0.5 * |(2,0)|^2 = 2.
  auto s = scene({disk("i", 0, 0, 1, Vec2{1, 0}), disk("j", 3, 0, 1, Vec2{-1, 0})});
  EXPECT_DOUBLE_EQ(rho_atom(s, make_atom(AtomKind::oriented, {"i", "j"}, {0.5})), -1.5);
}

TEST(RhoAtom, OrientedNeedsHeadings) {
  auto s = scene({disk("i", 0, 0, 1), disk("j", 3, 0, 1, Vec2{1, 0})});
  EXPECT_THROW(rho_atom(s, make_atom(AtomKind::oriented, {"i", "j"}, {0.5})), MissingHeadingError);
}

TEST(RhoAtom, UnknownIdent) {
  auto s = scene({disk("i", 0, 0, 1)});
  EXPECT_THROW(rho_atom(s, make_atom(AtomKind::close_to, {"i", "ghost"}, {1.0})), UnknownIdentError);
}

TEST(RhoAtom, EnclosureAndPartialOverlapByHand) {
  // Small disk well inside a large one: d = 1, r_i = 0.5, r_j = 3.
  auto s = scene({disk("i", 1, 0, 0.5), disk("j", 0, 0, 3)});
  // (3 - 0.25) - (1 + 0.5)
  EXPECT_DOUBLE_EQ(rho_atom(s, make_atom(AtomKind::encl_in, {"i", "j"}, {0.25})), 1.25);
  // ovlp: min((3.5 - 0.1) - 1, 1 - (2.5 + 0.1)) = min(2.4, -1.6)
  EXPECT_DOUBLE_EQ(rho_atom(s, make_atom(AtomKind::ovlp, {"i", "j"}, {0.1})), -1.6);
  // partOvlp: min(-1.6, -1.25, -((0.5 - 0.25) - (1 + 3))) = -1.6
  EXPECT_DOUBLE_EQ(rho_atom(s, make_atom(AtomKind::part_ovlp, {"i", "j"}, {0.1, 0.25})), -1.6);
}

TEST(RhoAtom, AxisRelationsByHand) {
  auto s = scene({disk("a", 0, 0, 1), disk("b", 4, 3, 1), disk("c", 9, 8, 1)});
  // above(b,a): (3 - 1) - (0 + 1 + 0.5)
  EXPECT_DOUBLE_EQ(rho_atom(s, make_atom(AtomKind::above, {"b", "a"}, {0.5})), 0.5);
  EXPECT_DOUBLE_EQ(rho_atom(s, make_atom(AtomKind::below, {"a", "b"}, {0.5})), 0.5);
  EXPECT_DOUBLE_EQ(rho_atom(s, make_atom(AtomKind::right_of, {"b", "a"}, {0.5})), 1.5);
  // betweenPx: min((4-1)-(0+1+0.5), (9-1)-(4+1+0.5)) = min(1.5, 2.5)
  EXPECT_DOUBLE_EQ(rho_atom(s, make_atom(AtomKind::between_px, {"a", "b", "c"}, {0.5})), 1.5);
  // betweenPy: min((3-1)-(0+1+0.5), (8-1)-(3+1+0.5)) = min(0.5, 2.5)
  EXPECT_DOUBLE_EQ(rho_atom(s, make_atom(AtomKind::between_py, {"a", "b", "c"}, {0.5})), 0.5);
}

TEST(SignedClearance, Examples) {
  auto touching = scene({disk("i", 0, 0, 1), disk("j", 2, 0, 1)});
  EXPECT_EQ(signed_clearance(touching, Ident("i"), Ident("j")), 0.0);
  auto apart = scene({disk("i", 0, 0, 1), disk("j", 3, 4, 2)});
  EXPECT_EQ(signed_clearance(apart, Ident("i"), Ident("j")), 2.0);
  EXPECT_THROW(signed_clearance(apart, Ident("i"), Ident("i")), DuplicateArgError);
  EXPECT_THROW(signed_clearance(apart, Ident("i"), Ident("k")), UnknownIdentError);
}

TEST(SignedClearance, SymmetricAndSymmetricAtoms) {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 500; ++n) {
    auto s = testing::random_scene(rng, {"a", "b"});
    Ident a("a"), b("b");
    EXPECT_EQ(signed_clearance(s, a, b), signed_clearance(s, b, a));
    for (auto k : {AtomKind::touch, AtomKind::close_to, AtomKind::far_from})
      EXPECT_EQ(rho_atom(s, make_atom(k, {"a", "b"}, {0.7})), rho_atom(s, make_atom(k, {"b", "a"}, {0.7})));
  }
}

TEST(RhoAtom, CloseToDecreasesAsObjectsSeparate) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> step(0.01, 2.0);
  for (int n = 0; n < 200; ++n) {
    auto s = testing::random_scene(rng, {"a", "b"});
    auto pa = s.at(Ident("a")).center;
    auto pb = s.at(Ident("b")).center;
    double dx = pb.x - pa.x, dy = pb.y - pa.y, len = std::hypot(dx, dy);
    if (len < 1e-6) continue;
    double k = step(rng);
    auto moved = disk("b", pb.x + k * dx / len, pb.y + k * dy / len, s.at(Ident("b")).radius);
    auto s2 = scene({s.at(Ident("a")), moved});
    auto c = make_atom(AtomKind::close_to, {"a", "b"}, {1.0});
    EXPECT_LT(rho_atom(s2, c), rho_atom(s, c));
  }
}

TEST(HoldsAtom, SignMatchesBooleanReading) {
  std::mt19937_64 rng(7);
  testing::FormulaGenOptions o;
  o.idents = {"obj_1", "obj_2", "obj_3"};
  int checked = 0;
  for (int n = 0; n < 3000; ++n) {
    auto s = testing::random_scene(rng, o.idents);
    auto a = testing::random_atom(rng, o);
    double r = rho_atom(s, a);
    if (std::abs(r) <= 1e-6) continue;
    ++checked;
    ASSERT_EQ(r > 0, holds_atom(s, a)) << signature(a.kind).keyword << " rho=" << r;
  }
  EXPECT_GT(checked, 2500);
}

// Trajectory of two disks whose centre distance follows `dists` (both radius 0.5).
Trajectory distance_profile(const std::vector<double>& dists) {
  std::vector<SceneState> states;
  for (double d : dists) states.push_back(scene({disk("obj_1", 0, 0, 0.5), disk("obj_2", d, 0, 0.5)}));
  return Trajectory(states);
}

TEST(RobustnessAt, ConstantTrajectoryAlways) {
  auto traj = distance_profile({3, 3, 3, 3, 3, 3});
  auto a = atom(AtomKind::close_to, {"obj_1", "obj_2"}, 5.0);
  EXPECT_EQ(robustness_at(traj, Formula::always({0, 5}, a), 0), rho_atom(traj.at(0), a.atom_value()));
}

TEST(RobustnessAt, NegationFlipsSign) {
  auto traj = distance_profile({1.0});
  auto a = atom(AtomKind::close_to, {"obj_1", "obj_2"}, 2.0);  // 2 - 1
  EXPECT_EQ(robustness_at(traj, a, 0), 1.0);
  EXPECT_EQ(robustness_at(traj, Formula::negation(a), 0), -1.0);
}

TEST(RobustnessAt, EventuallyPicksMaximum) {
  // closeTo with tolerance 3 over distances 4, 2.5, 1 -> [-1, 0.5, 2]
  auto traj = distance_profile({4, 2.5, 1});
  auto a = atom(AtomKind::close_to, {"obj_1", "obj_2"}, 3.0);
  EXPECT_EQ(robustness_at(traj, Formula::eventually({0, 2}, a), 0), 2.0);
}

TEST(RobustnessAt, UntilInclusiveInnerMinimum) {
  // lhs = closeTo(a,b;10) with d_ab = 7,8,9     -> [3, 2, 1]
  // rhs = farFrom(a,c;1)  with d_ac = 0,0,5     -> [-1, -1, 4]
  std::vector<SceneState> states;
  double dab[] = {7, 8, 9};
  double dac[] = {0, 0, 5};
  for (int t = 0; t < 3; ++t)
    states.push_back(scene({disk("a", 0, 0, 0.5), disk("b", dab[t], 0, 0.5), disk("c", 0, dac[t], 0.5)}));
  Trajectory traj(states);
  auto lhs = atom(AtomKind::close_to, {"a", "b"}, 10.0);
  auto rhs = atom(AtomKind::far_from, {"a", "c"}, 1.0);
  EXPECT_EQ(robustness_at(traj, Formula::until({0, 2}, lhs, rhs), 0), 1.0);
}

TEST(RobustnessAt, OutsideDomainIsAnError) {
  auto traj = distance_profile({1, 1, 1});
  auto f = Formula::always({0, 1}, atom(AtomKind::close_to, {"obj_1", "obj_2"}, 2.0));
  EXPECT_NO_THROW(robustness_at(traj, f, 1));
  EXPECT_THROW(robustness_at(traj, f, 2), HorizonError);
  EXPECT_THROW(robustness_at(traj, f, -1), HorizonError);
}

TEST(RobustnessAt, ImplicationLiftsAsNegatedDisjunction) {
  auto traj = distance_profile({1.0, 3.0});
  auto p = atom(AtomKind::close_to, {"obj_1", "obj_2"}, 2.0);  // [1, -1]
  auto q = atom(AtomKind::far_from, {"obj_1", "obj_2"}, 2.5);  // [-1.5, 0.5]
  auto imp = Formula::implication(p, q);
  EXPECT_EQ(robustness_at(traj, imp, 0), -1.0);
  EXPECT_EQ(robustness_at(traj, imp, 1), 1.0);
}

TEST(RobustnessTrace, DomainFollowsHorizon) {
  auto traj = distance_profile({1, 2, 3});
  auto a = atom(AtomKind::close_to, {"obj_1", "obj_2"}, 2.0);
  auto tr = robustness_trace(traj, a);
  ASSERT_EQ(tr.values.size(), 3u);
  for (std::size_t t = 0; t < 3; ++t) EXPECT_EQ(tr.values[t].robustness, rho_atom(traj.at(t), a.atom_value()));
  EXPECT_EQ(robustness_trace(traj, Formula::always({0, 2}, a)).values.size(), 1u);
  EXPECT_THROW(robustness_trace(distance_profile({1, 2}), Formula::always({0, 2}, a)), EmptyDomainError);
}

TEST(Satisfies, StrictlyPositive) {
  auto a = atom(AtomKind::close_to, {"obj_1", "obj_2"}, 2.0);
  EXPECT_TRUE(satisfies(distance_profile({1.0}), a));     // r = 1
  EXPECT_FALSE(satisfies(distance_profile({2.0}), a));    // r = 0
  EXPECT_FALSE(satisfies(distance_profile({2.01}), a));   // r < 0
  EXPECT_THROW(satisfies(distance_profile({1.0}), Formula::eventually({0, 1}, a)), EmptyDomainError);
}

TEST(Monitor, AgreesWithExpansionOracle) {
  std::mt19937_64 rng(99);
  testing::FormulaGenOptions o;
  o.max_depth = 4;
  o.max_bound = 3;
  o.idents = {"obj_1", "obj_2", "obj_3", "obj_4"};
  int compared = 0;
  for (int n = 0; n < 300; ++n) {
    auto f = testing::random_formula(rng, o);
    auto h = required_horizon(f);
    if (h >= 10) continue;
    std::size_t len = static_cast<std::size_t>(h) + 1 + rng() % static_cast<std::size_t>(10 - h);
    auto traj = testing::random_trajectory(rng, o.idents, len);
    auto sig = robustness_signal(traj, f);
    for (std::size_t t = 0; t < sig.size(); ++t, ++compared)
      ASSERT_NEAR(sig[t], testing::oracle_robustness(traj, f, static_cast<std::int64_t>(t)), 1e-12);
  }
  EXPECT_GT(compared, 300);
}

TEST(Monitor, DualityLaws) {
  std::mt19937_64 rng(100);
  testing::FormulaGenOptions o;
  o.max_depth = 3;
  o.max_bound = 3;
  for (int n = 0; n < 200; ++n) {
    auto f = testing::random_formula(rng, o);
    auto w = testing::random_interval(rng, 3);
    auto g = Formula::negation(Formula::always(w, f));
    auto e = Formula::eventually(w, Formula::negation(f));
    auto len = static_cast<std::size_t>(required_horizon(g)) + 3;
    auto traj = testing::random_trajectory(rng, o.idents, len);
    auto sf = robustness_signal(traj, f);
    auto snf = robustness_signal(traj, Formula::negation(f));
    for (std::size_t t = 0; t < sf.size(); ++t) ASSERT_EQ(snf[t], -sf[t]);
    auto sg = robustness_signal(traj, g);
    auto se = robustness_signal(traj, e);
    ASSERT_EQ(sg, se);
  }
}

TEST(TraceCsv, TwelveSignificantDigits) {
  auto traj = distance_profile({1.0 / 3.0, 2});
  auto tr = robustness_trace(traj, atom(AtomKind::close_to, {"obj_1", "obj_2"}, 1.0));
  std::ostringstream out;
  write_trace_csv(tr, out);
  EXPECT_EQ(out.str(), "t,robustness\n0,0.666666666667\n1,-1\n");
}

}  // namespace
}  // namespace nl2spatial
