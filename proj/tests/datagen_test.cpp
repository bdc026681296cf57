#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nl2spatial/datagen.hpp"
#include "nl2spatial/errors.hpp"
#include "nl2spatial/renderer.hpp"
#include "nl2spatial/syntax.hpp"
#include "support/sorting_example.hpp"

namespace nl2spatial {
namespace {

SkeletonNode leaf() { return {}; }
SkeletonNode unary(GenOperator op, SkeletonNode c, Interval w = {0, 0}) { return {op, w, {std::move(c)}}; }

// The sorting-example construction: D = 4, B = 3.
Skeleton sorting_skeleton() {
  Skeleton sk;
  sk.sampled_depth = 4;
  sk.sampled_breadth = 3;
  auto v1 = unary(GenOperator::eventually, {GenOperator::conjunction, {}, {leaf(), leaf()}}, {0, 20});
  auto v2 = unary(GenOperator::always, {GenOperator::until, {0, 20}, {leaf(), leaf()}}, {0, 20});
  auto v3 = unary(GenOperator::eventually, unary(GenOperator::negation, leaf()), {10, 20});
  sk.root = {GenOperator::conjunction, {}, {v1, v2, v3}};
  return sk;
}

TEST(Skeleton, SortingExampleConstruction) {
  auto sk = sorting_skeleton();
  EXPECT_EQ(skeleton_depth(sk.root), 4);
  EXPECT_EQ(skeleton_breadth(sk.root), 3);
  EXPECT_EQ(skeleton_leaf_count(sk.root), 5u);
  using namespace testing;
  auto f = instantiate_atoms(sk, {sorting_example_inside().atom_value(), sorting_example_above().atom_value(),
                                  sorting_example_far().atom_value(), sorting_example_touch().atom_value(),
                                  sorting_example_close().atom_value()});
  EXPECT_EQ(f, sorting_example());
  EXPECT_THROW(instantiate_atoms(sk, {sorting_example_inside().atom_value()}), std::invalid_argument);
}

TEST(Skeleton, SampledShapesRespectDepthAndBreadth) {
  auto spec = GenSpec::defaults();
  spec.max_depth = 6;
  spec.max_breadth = 4;
  std::set<int> depths, breadths;
  for (std::uint64_t i = 0; i < 2000; ++i) {
    auto rng = record_stream(9, i);
    auto sk = sample_skeleton(spec, rng);
    ASSERT_GE(sk.sampled_depth, 2);
    ASSERT_LE(sk.sampled_depth, 6);
    ASSERT_EQ(skeleton_depth(sk.root), sk.sampled_depth);
    ASSERT_LE(skeleton_breadth(sk.root), sk.sampled_breadth);
    depths.insert(sk.sampled_depth);
    breadths.insert(sk.sampled_breadth);
  }
  EXPECT_EQ(depths, (std::set<int>{2, 3, 4, 5, 6}));
  EXPECT_EQ(breadths, (std::set<int>{1, 2, 3, 4}));
}

TEST(Skeleton, BreadthOneExcludesBinaryOperators) {
  auto spec = GenSpec::defaults();
  spec.max_breadth = 1;
  for (std::uint64_t i = 0; i < 300; ++i) {
    auto rng = record_stream(1, i);
    auto sk = sample_skeleton(spec, rng);
    ASSERT_EQ(skeleton_breadth(sk.root), 1);
  }
}

TEST(Skeleton, OnlyBinaryOperatorsForceWiderBreadth) {
  auto spec = GenSpec::defaults();
  spec.operator_weights = {{GenOperator::until, 1.0}};
  for (std::uint64_t i = 0; i < 100; ++i) {
    auto rng = record_stream(2, i);
    EXPECT_GE(sample_skeleton(spec, rng).sampled_breadth, 2);
  }
  spec.max_breadth = 1;
  auto rng = record_stream(2, 0);
  EXPECT_THROW(sample_skeleton(spec, rng), InfeasibleSpecError);
}

TEST(Atoms, RespectUniverseAndRegionSlots) {
  auto spec = GenSpec::defaults();
  std::set<std::string> universe(spec.objects.begin(), spec.objects.end());
  universe.insert(spec.regions.begin(), spec.regions.end());
  bool saw_region = false;
  for (std::uint64_t i = 0; i < 3000; ++i) {
    auto rng = record_stream(4, i);
    auto a = sample_atom(spec, rng);
    auto f = Formula::atom(a);
    ASSERT_TRUE(validate_formula(f).empty()) << serialize_formula(f);
    for (std::size_t k = 0; k < a.args.size(); ++k) {
      ASSERT_TRUE(universe.contains(a.args[k].name()));
      if (a.args[k].kind() == IdentKind::region) {
        saw_region = true;
        ASSERT_EQ(a.kind, AtomKind::encl_in);
        ASSERT_EQ(k, 1u);
      }
    }
    for (double c : a.constants) {
      ASSERT_GE(c, 0.001);
      ASSERT_DOUBLE_EQ(c, std::round(c * 1000) / 1000);
    }
    ASSERT_NE(a.kind, AtomKind::oriented);
  }
  EXPECT_TRUE(saw_region);
}

TEST(Atoms, UniverseTooSmall) {
  auto spec = GenSpec::defaults();
  spec.objects = {"obj_1", "obj_2"};  // Between needs three objects
  auto rng = record_stream(0, 0);
  auto sk = sample_skeleton(spec, rng);
  EXPECT_THROW(instantiate_atoms(sk, spec, rng), UniverseTooSmallError);
  spec.atom_weights[AtomKind::between_px] = 0;
  spec.atom_weights[AtomKind::between_py] = 0;
  EXPECT_NO_THROW(instantiate_atoms(sk, spec, rng));
  std::ostringstream sink;
  spec.objects = {"obj_1"};
  EXPECT_THROW(generate_dataset(spec, 3, sink, nullptr), UniverseTooSmallError);
  EXPECT_TRUE(sink.str().empty());
}

TEST(Spec, JsonRoundTripAndValidation) {
  auto spec = GenSpec::defaults();
  spec.seed = 77;
  spec.objects = {"obj_r", "obj_b", "obj_g"};
  spec.regions = {"reg_s"};
  auto again = gen_spec_from_json(gen_spec_to_json(spec));
  EXPECT_EQ(gen_spec_to_json(again), gen_spec_to_json(spec));

  using nlohmann::json;
  EXPECT_THROW(gen_spec_from_json(json{{"max_depth", 1}}), InfeasibleSpecError);
  EXPECT_THROW(gen_spec_from_json(json{{"bogus", 1}}), InfeasibleSpecError);
  EXPECT_THROW(gen_spec_from_json(json{{"operators", {{"sometimes", 1}}}}), InfeasibleSpecError);
  EXPECT_THROW(gen_spec_from_json(json{{"atoms", {{"touch", -1}}}}), InfeasibleSpecError);
  EXPECT_THROW(gen_spec_from_json(json{{"atoms", json::object()}}), InfeasibleSpecError);
  EXPECT_THROW(gen_spec_from_json(json{{"objects", {"reg_x"}}}), InfeasibleSpecError);
  EXPECT_THROW(gen_spec_from_json(json{{"constants", {{"orientation", {0.1, 3.0}}}}}), InfeasibleSpecError);
  EXPECT_THROW(gen_spec_from_json(json{{"max_depth", "four"}}), InfeasibleSpecError);
  auto s = gen_spec_from_json(json{{"num_objects", 5}, {"num_regions", 0}, {"atoms", {{"closeTo", 2}}}});
  EXPECT_EQ(s.objects.size(), 5u);
  EXPECT_TRUE(s.regions.empty());
  EXPECT_EQ(s.atom_weights.size(), 1u);
}

TEST(Records, EveryNodeRenderedAndParsable) {
  auto spec = GenSpec::defaults();
  spec.seed = 5;
  MockBackend mock;
  for (std::uint64_t i = 0; i < 100; ++i) {
    auto r = generate_record(spec, i, &mock);
    auto f = parse_formula(r.formula);
    EXPECT_EQ(parse_controlled_english(r.canonical), f);
    EXPECT_EQ(r.nodes.size(), subformulas(f).size());
    for (const auto& n : r.nodes) {
      EXPECT_EQ(n.paraphrases.size(), spec.paraphrases);
      EXPECT_EQ(parse_controlled_english(n.canonical), parse_formula(n.formula));
    }
    EXPECT_EQ(r.metrics.depth, r.sampled_depth);
    EXPECT_TRUE(r.warnings.empty());
  }
}

class DeadBackend final : public ParaphraseBackend {
public:
  std::vector<std::string> paraphrase(const ParaphraseRequest&) override {
    ++calls;
    throw BackendUnavailable("offline");
  }
  int calls = 0;
};

TEST(Records, BackendFailureBecomesWarning) {
  auto spec = GenSpec::defaults();
  DeadBackend dead;
  auto r = generate_record(spec, 3, &dead);
  EXPECT_EQ(dead.calls, 1);
  ASSERT_EQ(r.warnings.size(), 1u);
  for (const auto& n : r.nodes) EXPECT_TRUE(n.paraphrases.empty());
}

TEST(Dataset, DeterministicAcrossRunsAndJobCounts) {
  auto spec = GenSpec::defaults();
  spec.seed = 123;
  MockBackend mock;
  std::ostringstream a, b, c;
  auto sa = generate_dataset(spec, 300, a, &mock, 1);
  generate_dataset(spec, 300, b, &mock, 1);
  generate_dataset(spec, 300, c, &mock, 3);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str(), c.str());
  EXPECT_EQ(sa.records, 300u);
  std::size_t total = 0;
  for (auto [d, k] : sa.depth_histogram) total += k;
  EXPECT_EQ(total, 300u);

  spec.seed = 124;
  std::ostringstream d;
  generate_dataset(spec, 300, d, &mock, 1);
  EXPECT_NE(a.str(), d.str());
}

TEST(Dataset, JsonLinesCarryMetadata) {
  auto spec = GenSpec::defaults();
  std::ostringstream out;
  generate_dataset(spec, 20, out, nullptr);
  std::istringstream in(out.str());
  std::string line;
  std::uint64_t expected = 0;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j["index"].get<std::uint64_t>(), expected++);
    EXPECT_TRUE(j["metadata"].contains("sampled_depth"));
    EXPECT_TRUE(j["metadata"].contains("sampled_breadth"));
    EXPECT_EQ(j["nodes"][0]["formula"], j["formula"]);
  }
  EXPECT_EQ(expected, 20u);
}

}  // namespace
}  // namespace nl2spatial
