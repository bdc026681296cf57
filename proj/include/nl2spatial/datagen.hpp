#pragma once

// Synthetic dataset generation: sample an operator skeleton, fill its leaves
// with spatial atoms over a finite universe of identifiers, then render every
// node in controlled English and (optionally) paraphrase it.
//
// Determinism: record i of a run with seed s draws from its own
// mt19937_64 stream seeded by mix(s, i), so records are reproducible and
// independent of generation order or thread count.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nl2spatial/formula.hpp"
#include "nl2spatial/gateway.hpp"
#include "nl2spatial/renderer.hpp"

namespace nl2spatial {

// Version of the JSON-lines record layout (docs/dataset_schema.md).
inline constexpr int kDatasetSchemaVersion = 1;

// Operators the sampler may place at internal nodes.
enum class GenOperator { negation, conjunction, disjunction, implication, always, eventually, until };

std::string_view to_string(GenOperator op);

struct ConstantRange {
  double lo = 0.0;
  double hi = 1.0;
};

struct ConstantRanges {
  ConstantRange touch{0.01, 0.1};       // epsilon
  ConstantRange close_to{0.1, 1.0};     // epsilon_c
  ConstantRange far_from{0.5, 2.0};     // epsilon_f
  ConstantRange overlap{0.01, 0.2};     // tau
  ConstantRange containment{0.01, 0.2}; // rho
  ConstantRange margin{0.05, 0.5};      // kappa (directional / between)
  ConstantRange orientation{0.05, 0.5}; // kappa for oriented, at most 2
};

// Where region identifiers may appear.
enum class RegionSlots {
  encl_in_container,  // only as the container (second argument) of enclIn
  anywhere,
};

struct GenSpec {
  int max_depth = 4;    // d_max >= 2; the sampled depth D ~ U{2..d_max}
  int max_breadth = 3;  // b_max >= 1; the sampled breadth B ~ U{1..b_max}
  std::int64_t max_time = 20;  // interval bounds drawn from [0, max_time]
  std::map<GenOperator, double> operator_weights;  // missing entries weigh 0
  std::map<AtomKind, double> atom_weights;         // missing entries weigh 0
  std::vector<std::string> objects;  // object identifiers
  std::vector<std::string> regions;  // region identifiers (reg_ prefix)
  RegionSlots region_slots = RegionSlots::encl_in_container;
  ConstantRanges constants;
  std::uint64_t seed = 0;
  std::size_t paraphrases = 2;  // per node
  double steps_per_second = 1.0;

  // Defaults: every operator except implication and every atom kind except
  // oriented with weight 1; objects obj_1..obj_3, region reg_1.
  static GenSpec defaults();
};

// Throws InfeasibleSpecError for out-of-range sizes, negative or all-zero
// weights, bad constant ranges or malformed identifiers.
void validate_gen_spec(const GenSpec& spec);

// Unknown keys are rejected (InfeasibleSpecError); absent keys keep defaults.
GenSpec gen_spec_from_json(const nlohmann::json& j);
nlohmann::json gen_spec_to_json(const GenSpec& spec);

using GenRng = std::mt19937_64;

// The per-record stream: splitmix64 finalisation of (seed, index).
GenRng record_stream(std::uint64_t seed, std::uint64_t index);

struct SkeletonNode {
  std::optional<GenOperator> op;  // nullopt marks a leaf (atom slot)
  Interval window{0, 0};          // temporal operators only
  std::vector<SkeletonNode> children;
};

struct Skeleton {
  SkeletonNode root;
  int sampled_depth = 0;
  int sampled_breadth = 0;
};

// Depth counts nodes on the longest root-leaf path (a leaf has depth 1);
// breadth is the largest child count of any node.
int skeleton_depth(const SkeletonNode& n);
int skeleton_breadth(const SkeletonNode& n);
std::size_t skeleton_leaf_count(const SkeletonNode& n);

// Samples D and B, then grows a tree of exactly depth D whose nodes have at
// most B children: one child per level continues the deepest path, siblings
// get a depth drawn from U{min(2, remaining-1)..remaining-1}.
Skeleton sample_skeleton(const GenSpec& spec, GenRng& rng);

// Fills the leaves in left-to-right order with the given atoms.
Formula instantiate_atoms(const Skeleton& skeleton, const std::vector<SpatialAtom>& atoms);

// Samples one atom per leaf over the spec's universe. Throws
// UniverseTooSmallError when some positively weighted atom kind cannot be
// formed from the universe.
Formula instantiate_atoms(const Skeleton& skeleton, const GenSpec& spec, GenRng& rng);

SpatialAtom sample_atom(const GenSpec& spec, GenRng& rng);

struct NodeText {
  Path path;
  std::string formula;
  std::string canonical;
  std::vector<std::string> paraphrases;
};

struct DatasetRecord {
  std::string id;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  std::string formula;
  std::string canonical;
  std::vector<std::string> paraphrases;
  std::vector<NodeText> nodes;  // pre-order, root first
  StructureMetrics metrics;
  int sampled_depth = 0;
  int sampled_breadth = 0;
  std::vector<std::string> warnings;
};

// Renders every node and asks the paraphraser (if any) for spec.paraphrases
// variants per node. Backend failures leave the paraphrase lists empty and
// add a warning instead of failing the record.
DatasetRecord back_translate_record(const Formula& f, const GenSpec& spec, ParaphraseBackend* paraphraser);

nlohmann::ordered_json record_to_json(const DatasetRecord& r);

// Generates record `index` of the run described by spec.
DatasetRecord generate_record(const GenSpec& spec, std::uint64_t index, ParaphraseBackend* paraphraser);

struct DatasetSummary {
  std::size_t records = 0;
  std::uint64_t seed = 0;
  std::map<int, std::size_t> depth_histogram;    // realised depth -> count
  std::map<int, std::size_t> breadth_histogram;  // realised breadth -> count
  std::size_t warnings = 0;
};

nlohmann::ordered_json summary_to_json(const DatasetSummary& s);

// Writes n records as JSON lines, in index order. `jobs` worker threads
// generate records concurrently; output is identical for any job count.
DatasetSummary generate_dataset(const GenSpec& spec, std::size_t n, std::ostream& out,
                                ParaphraseBackend* paraphraser, unsigned jobs = 1);

}  // namespace nl2spatial
