#pragma once

// Test-only random generators. Independent of the datagen module: covers every
// atom kind (including oriented), implication, n-ary connectives and raw
// unrounded constants.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "nl2spatial/formula.hpp"
#include "nl2spatial/scene.hpp"

namespace nl2spatial::testing {

struct FormulaGenOptions {
  int max_depth = 5;
  int max_breadth = 3;
  std::int64_t max_bound = 6;
  std::vector<std::string> idents = {"obj_1", "obj_2", "obj_3", "obj_4"};
  bool include_implication = true;
  bool include_oriented = true;
  bool raw_constants = true;  // full-precision doubles instead of 3 decimals
};

inline double random_constant(std::mt19937_64& rng, bool raw, double hi = 3.0) {
  std::uniform_real_distribution<double> d(0.001, hi);
  double v = d(rng);
  if (!raw) v = std::max(0.001, std::round(v * 1000.0) / 1000.0);
  return v;
}

inline SpatialAtom random_atom(std::mt19937_64& rng, const FormulaGenOptions& o) {
  std::vector<AtomKind> kinds;
  for (auto k : kAllAtomKinds)
    if (k != AtomKind::oriented || o.include_oriented) kinds.push_back(k);
  SpatialAtom a;
  a.kind = kinds[std::uniform_int_distribution<std::size_t>(0, kinds.size() - 1)(rng)];
  const auto& sig = signature(a.kind);
  auto pool = o.idents;
  std::shuffle(pool.begin(), pool.end(), rng);
  for (std::size_t i = 0; i < sig.ident_count; ++i) a.args.emplace_back(pool[i]);
  for (std::size_t i = 0; i < sig.constant_count; ++i)
    a.constants.push_back(random_constant(rng, o.raw_constants, a.kind == AtomKind::oriented ? 2.0 : 3.0));
  return a;
}

inline Interval random_interval(std::mt19937_64& rng, std::int64_t max_bound) {
  std::uniform_int_distribution<std::int64_t> d(0, max_bound);
  auto a = d(rng), b = d(rng);
  if (a > b) std::swap(a, b);
  return {a, b};
}

inline Formula random_formula(std::mt19937_64& rng, const FormulaGenOptions& o, int depth) {
  if (depth <= 1 || std::uniform_int_distribution<int>(0, 4)(rng) == 0)
    return Formula::atom(random_atom(rng, o));
  int choices = o.include_implication ? 7 : 6;
  int pick = std::uniform_int_distribution<int>(0, choices - 1)(rng);
  auto sub = [&] { return random_formula(rng, o, depth - 1); };
  auto many = [&] {
    int n = std::uniform_int_distribution<int>(2, std::max(2, o.max_breadth))(rng);
    std::vector<Formula> v;
    for (int i = 0; i < n; ++i) v.push_back(sub());
    return v;
  };
  switch (pick) {
    case 0: return Formula::negation(sub());
    case 1: return Formula::conjunction(many());
    case 2: return Formula::disjunction(many());
    case 3: return Formula::always(random_interval(rng, o.max_bound), sub());
    case 4: return Formula::eventually(random_interval(rng, o.max_bound), sub());
    case 5: {
      auto w = random_interval(rng, o.max_bound);
      auto lhs = sub();
      return Formula::until(w, lhs, sub());
    }
    default: {
      auto lhs = sub();
      return Formula::implication(lhs, sub());
    }
  }
}

inline Formula random_formula(std::mt19937_64& rng, const FormulaGenOptions& o = {}) {
  return random_formula(rng, o, o.max_depth);
}

inline SceneState random_scene(std::mt19937_64& rng, const std::vector<std::string>& ids) {
  std::uniform_real_distribution<double> pos(-4.0, 4.0);
  std::uniform_real_distribution<double> rad(0.2, 2.0);
  std::uniform_real_distribution<double> ang(0.0, 6.283185307179586);
  SceneState s;
  for (const auto& id : ids) {
    DiskObject d;
    d.id = Ident(id);
    d.kind = d.id.kind();
    d.center = {pos(rng), pos(rng)};
    d.radius = rad(rng);
    double th = ang(rng);
    d.heading = Vec2{std::cos(th), std::sin(th)};
    s.add(d);
  }
  return s;
}

inline Trajectory random_trajectory(std::mt19937_64& rng, const std::vector<std::string>& ids,
                                    std::size_t length) {
  std::vector<SceneState> states;
  for (std::size_t t = 0; t < length; ++t) states.push_back(random_scene(rng, ids));
  return Trajectory(std::move(states));
}

}  // namespace nl2spatial::testing
