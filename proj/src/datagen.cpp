#include "nl2spatial/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "nl2spatial/errors.hpp"
#include "nl2spatial/syntax.hpp"

namespace nl2spatial {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::pair<GenOperator, std::string_view> kOperatorNames[] = {
    {GenOperator::negation, "not"},       {GenOperator::conjunction, "and"}, {GenOperator::disjunction, "or"},
    {GenOperator::implication, "implies"}, {GenOperator::always, "always"},  {GenOperator::eventually, "eventually"},
    {GenOperator::until, "until"},
};

std::size_t arity_floor(GenOperator op) {
  switch (op) {
    case GenOperator::conjunction:
    case GenOperator::disjunction:
    case GenOperator::implication:
    case GenOperator::until: return 2;
    default: return 1;
  }
}

bool is_temporal(GenOperator op) {
  return op == GenOperator::always || op == GenOperator::eventually || op == GenOperator::until;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

int uniform_int(GenRng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

template <typename Key>
Key weighted_pick(GenRng& rng, const std::vector<std::pair<Key, double>>& options) {
  std::vector<double> w;
  for (const auto& [k, wt] : options) w.push_back(wt);
  std::discrete_distribution<std::size_t> dist(w.begin(), w.end());
  return options[dist(rng)].first;
}

std::vector<std::pair<GenOperator, double>> operators_for_breadth(const GenSpec& spec, int breadth) {
  std::vector<std::pair<GenOperator, double>> out;
  for (auto [op, name] : kOperatorNames) {
    auto it = spec.operator_weights.find(op);
    if (it == spec.operator_weights.end() || it->second <= 0) continue;
    if (arity_floor(op) > static_cast<std::size_t>(breadth)) continue;
    out.emplace_back(op, it->second);
  }
  return out;
}

bool kind_feasible(AtomKind kind, const GenSpec& spec) {
  auto m = spec.objects.size();
  auto k = spec.regions.size();
  auto need = signature(kind).ident_count;
  if (spec.region_slots == RegionSlots::anywhere) return m + k >= need;
  if (kind == AtomKind::encl_in) return m >= 2 || (m >= 1 && k >= 1);
  return m >= need;
}

void check_universe(const GenSpec& spec) {
  for (const auto& [kind, w] : spec.atom_weights)
    if (w > 0 && !kind_feasible(kind, spec))
      throw UniverseTooSmallError("universe of " + std::to_string(spec.objects.size()) + " objects and " +
                                  std::to_string(spec.regions.size()) + " regions cannot form a " +
                                  std::string(signature(kind).keyword) + " atom");
}

double sample_constant(GenRng& rng, ConstantRange r) {
  double v = std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
  v = std::round(v * 1000.0) / 1000.0;
  return std::clamp(std::max(v, 0.001), 0.001, std::max(r.hi, 0.001));
}

// k distinct picks from pool, in draw order.
std::vector<std::string> pick_distinct(GenRng& rng, std::vector<std::string> pool, std::size_t k) {
  for (std::size_t i = 0; i < k; ++i) {
    auto j = std::uniform_int_distribution<std::size_t>(i, pool.size() - 1)(rng);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

SkeletonNode grow(const GenSpec& spec, GenRng& rng, const std::vector<std::pair<GenOperator, double>>& ops,
                  int breadth, int remaining) {
  SkeletonNode node;
  if (remaining <= 1) return node;
  auto op = weighted_pick(rng, ops);
  node.op = op;
  if (is_temporal(op)) {
    auto a = uniform_int(rng, 0, static_cast<int>(spec.max_time));
    auto b = uniform_int(rng, 0, static_cast<int>(spec.max_time));
    node.window = {std::min(a, b), std::max(a, b)};
  }
  int n = 1;
  if (op == GenOperator::until || op == GenOperator::implication) n = 2;
  if (op == GenOperator::conjunction || op == GenOperator::disjunction) n = uniform_int(rng, 2, breadth);
  int deep = uniform_int(rng, 0, n - 1);
  for (int i = 0; i < n; ++i) {
    // Siblings of the deep branch keep at least two layers whenever there is room.
    int r = i == deep ? remaining - 1 : uniform_int(rng, std::min(2, remaining - 1), remaining - 1);
    node.children.push_back(grow(spec, rng, ops, breadth, r));
  }
  return node;
}

Formula build(const SkeletonNode& n, const std::vector<SpatialAtom>& atoms, std::size_t& next) {
  if (!n.op) {
    if (next >= atoms.size()) throw std::invalid_argument("fewer atoms than skeleton leaves");
    return Formula::atom(atoms[next++]);
  }
  std::vector<Formula> kids;
  for (const auto& c : n.children) kids.push_back(build(c, atoms, next));
  switch (*n.op) {
    case GenOperator::negation: return Formula::negation(kids.at(0));
    case GenOperator::conjunction: return Formula::conjunction(std::move(kids));
    case GenOperator::disjunction: return Formula::disjunction(std::move(kids));
    case GenOperator::implication: return Formula::implication(kids.at(0), kids.at(1));
    case GenOperator::always: return Formula::always(n.window, kids.at(0));
    case GenOperator::eventually: return Formula::eventually(n.window, kids.at(0));
    case GenOperator::until: return Formula::until(n.window, kids.at(0), kids.at(1));
  }
  throw std::logic_error("unreachable");
}

void check_range(const ConstantRange& r, const char* name, double cap) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo <= 0 || r.lo > r.hi || r.hi > cap)
    throw InfeasibleSpecError(std::string("constant range '") + name + "' must satisfy 0 < lo <= hi <= " +
                              format_number(cap));
}

constexpr std::pair<const char*, ConstantRange ConstantRanges::*> kRangeFields[] = {
    {"touch", &ConstantRanges::touch},         {"closeTo", &ConstantRanges::close_to},
    {"farFrom", &ConstantRanges::far_from},    {"overlap", &ConstantRanges::overlap},
    {"containment", &ConstantRanges::containment}, {"margin", &ConstantRanges::margin},
    {"orientation", &ConstantRanges::orientation},
};

}  // namespace

std::string_view to_string(GenOperator op) {
  for (auto [k, n] : kOperatorNames)
    if (k == op) return n;
  return "?";
}

GenSpec GenSpec::defaults() {
  GenSpec s;
  for (auto [op, name] : kOperatorNames) s.operator_weights[op] = op == GenOperator::implication ? 0.0 : 1.0;
  for (auto k : kAllAtomKinds) s.atom_weights[k] = k == AtomKind::oriented ? 0.0 : 1.0;
  s.objects = {"obj_1", "obj_2", "obj_3"};
  s.regions = {"reg_1"};
  return s;
}

void validate_gen_spec(const GenSpec& spec) {
  if (spec.max_depth < 2 || spec.max_depth > 32) throw InfeasibleSpecError("max_depth must lie in [2, 32]");
  if (spec.max_breadth < 1 || spec.max_breadth > 16) throw InfeasibleSpecError("max_breadth must lie in [1, 16]");
  if (spec.max_time < 0 || spec.max_time > 1'000'000) throw InfeasibleSpecError("max_time must lie in [0, 1e6]");
  if (!(spec.steps_per_second > 0) || !std::isfinite(spec.steps_per_second))
    throw InfeasibleSpecError("steps_per_second must be positive");
  for (const auto& [op, w] : spec.operator_weights)
    if (!(w >= 0) || !std::isfinite(w)) throw InfeasibleSpecError("operator weights must be finite and >= 0");
  for (const auto& [k, w] : spec.atom_weights)
    if (!(w >= 0) || !std::isfinite(w)) throw InfeasibleSpecError("atom weights must be finite and >= 0");
  bool any_op = false;
  for (int b = 1; b <= spec.max_breadth; ++b) any_op |= !operators_for_breadth(spec, b).empty();
  if (!any_op) throw InfeasibleSpecError("no operator has positive weight within the breadth limit");
  if (std::none_of(spec.atom_weights.begin(), spec.atom_weights.end(), [](auto& p) { return p.second > 0; }))
    throw InfeasibleSpecError("no atom kind has positive weight");
  if (spec.objects.empty()) throw InfeasibleSpecError("the universe needs at least one object");
  std::set<std::string> seen;
  for (const auto& o : spec.objects)
    if (!is_valid_ident_name(o) || Ident(o).kind() != IdentKind::object || !seen.insert(o).second)
      throw InfeasibleSpecError("bad or duplicate object identifier '" + o + "'");
  for (const auto& r : spec.regions)
    if (!is_valid_ident_name(r) || Ident(r).kind() != IdentKind::region || !seen.insert(r).second)
      throw InfeasibleSpecError("bad or duplicate region identifier '" + r + "'");
  for (auto [name, field] : kRangeFields) check_range(spec.constants.*field, name, name == std::string("orientation") ? 2.0 : 1e12);
}

GenSpec gen_spec_from_json(const json& j) {
  if (!j.is_object()) throw InfeasibleSpecError("generation spec must be a JSON object");
  static const std::set<std::string> kKeys = {"max_depth", "max_breadth", "max_time", "operators", "atoms",
                                               "objects", "regions", "num_objects", "num_regions", "region_slots",
                                               "constants", "seed", "paraphrases", "steps_per_second"};
  for (const auto& [k, v] : j.items())
    if (!kKeys.contains(k)) throw InfeasibleSpecError("unknown generation spec key '" + k + "'");

  auto s = GenSpec::defaults();
  try {
    if (j.contains("max_depth")) s.max_depth = j.at("max_depth").get<int>();
    if (j.contains("max_breadth")) s.max_breadth = j.at("max_breadth").get<int>();
    if (j.contains("max_time")) s.max_time = j.at("max_time").get<std::int64_t>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("paraphrases")) s.paraphrases = j.at("paraphrases").get<std::size_t>();
    if (j.contains("steps_per_second")) s.steps_per_second = j.at("steps_per_second").get<double>();
    if (j.contains("operators")) {
      s.operator_weights.clear();
      for (const auto& [name, w] : j.at("operators").items()) {
        auto it = std::find_if(std::begin(kOperatorNames), std::end(kOperatorNames),
                               [&](auto& p) { return p.second == name; });
        if (it == std::end(kOperatorNames)) throw InfeasibleSpecError("unknown operator '" + name + "'");
        s.operator_weights[it->first] = w.get<double>();
      }
    }
    if (j.contains("atoms")) {
      s.atom_weights.clear();
      for (const auto& [name, w] : j.at("atoms").items()) {
        auto kind = atom_kind_from_keyword(name);
        if (!kind) throw InfeasibleSpecError("unknown atom keyword '" + name + "'");
        s.atom_weights[*kind] = w.get<double>();
      }
    }
    if (j.contains("objects") && j.contains("num_objects"))
      throw InfeasibleSpecError("give either objects or num_objects");
    if (j.contains("regions") && j.contains("num_regions"))
      throw InfeasibleSpecError("give either regions or num_regions");
    if (j.contains("objects")) s.objects = j.at("objects").get<std::vector<std::string>>();
    if (j.contains("regions")) s.regions = j.at("regions").get<std::vector<std::string>>();
    if (j.contains("num_objects")) {
      auto m = j.at("num_objects").get<std::size_t>();
      s.objects.clear();
      for (std::size_t i = 1; i <= m; ++i) s.objects.push_back("obj_" + std::to_string(i));
    }
    if (j.contains("num_regions")) {
      auto k = j.at("num_regions").get<std::size_t>();
      s.regions.clear();
      for (std::size_t i = 1; i <= k; ++i) s.regions.push_back("reg_" + std::to_string(i));
    }
    if (j.contains("region_slots")) {
      auto v = j.at("region_slots").get<std::string>();
      if (v == "encl_in_container") s.region_slots = RegionSlots::encl_in_container;
      else if (v == "anywhere") s.region_slots = RegionSlots::anywhere;
      else throw InfeasibleSpecError("region_slots must be 'encl_in_container' or 'anywhere'");
    }
    if (j.contains("constants")) {
      for (const auto& [name, range] : j.at("constants").items()) {
        auto it = std::find_if(std::begin(kRangeFields), std::end(kRangeFields),
                               [&](auto& p) { return name == p.first; });
        if (it == std::end(kRangeFields)) throw InfeasibleSpecError("unknown constant range '" + name + "'");
        auto pair = range.get<std::vector<double>>();
        if (pair.size() != 2) throw InfeasibleSpecError("constant range '" + name + "' needs [lo, hi]");
        s.constants.*(it->second) = {pair[0], pair[1]};
      }
    }
  } catch (const json::exception& e) {
    throw InfeasibleSpecError(std::string("malformed generation spec: ") + e.what());
  }
  validate_gen_spec(s);
  return s;
}

json gen_spec_to_json(const GenSpec& s) {
  json ops = json::object();
  for (const auto& [op, w] : s.operator_weights) ops[std::string(to_string(op))] = w;
  json atoms = json::object();
  for (const auto& [k, w] : s.atom_weights) atoms[std::string(signature(k).keyword)] = w;
  json constants = json::object();
  for (auto [name, field] : kRangeFields) constants[name] = {(s.constants.*field).lo, (s.constants.*field).hi};
  return {{"max_depth", s.max_depth},
          {"max_breadth", s.max_breadth},
          {"max_time", s.max_time},
          {"operators", ops},
          {"atoms", atoms},
          {"objects", s.objects},
          {"regions", s.regions},
          {"region_slots", s.region_slots == RegionSlots::anywhere ? "anywhere" : "encl_in_container"},
          {"constants", constants},
          {"seed", s.seed},
          {"paraphrases", s.paraphrases},
          {"steps_per_second", s.steps_per_second}};
}

GenRng record_stream(std::uint64_t seed, std::uint64_t index) {
  return GenRng(splitmix64(seed ^ splitmix64(index)));
}

int skeleton_depth(const SkeletonNode& n) {
  int d = 0;
  for (const auto& c : n.children) d = std::max(d, skeleton_depth(c));
  return d + 1;
}

int skeleton_breadth(const SkeletonNode& n) {
  int b = static_cast<int>(n.children.size());
  for (const auto& c : n.children) b = std::max(b, skeleton_breadth(c));
  return b;
}

std::size_t skeleton_leaf_count(const SkeletonNode& n) {
  if (n.children.empty()) return 1;
  std::size_t total = 0;
  for (const auto& c : n.children) total += skeleton_leaf_count(c);
  return total;
}

Skeleton sample_skeleton(const GenSpec& spec, GenRng& rng) {
  validate_gen_spec(spec);
  std::vector<int> breadths;
  for (int b = 1; b <= spec.max_breadth; ++b)
    if (!operators_for_breadth(spec, b).empty()) breadths.push_back(b);
  Skeleton sk;
  sk.sampled_depth = uniform_int(rng, 2, spec.max_depth);
  sk.sampled_breadth = breadths[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(breadths.size()) - 1))];
  sk.root = grow(spec, rng, operators_for_breadth(spec, sk.sampled_breadth), sk.sampled_breadth, sk.sampled_depth);
  return sk;
}

Formula instantiate_atoms(const Skeleton& skeleton, const std::vector<SpatialAtom>& atoms) {
  std::size_t next = 0;
  auto f = build(skeleton.root, atoms, next);
  if (next != atoms.size()) throw std::invalid_argument("more atoms than skeleton leaves");
  return f;
}

SpatialAtom sample_atom(const GenSpec& spec, GenRng& rng) {
  std::vector<std::pair<AtomKind, double>> kinds;
  for (const auto& [k, w] : spec.atom_weights)
    if (w > 0) kinds.emplace_back(k, w);
  if (kinds.empty()) throw InfeasibleSpecError("no atom kind has positive weight");
  auto kind = weighted_pick(rng, kinds);
  if (!kind_feasible(kind, spec)) check_universe(spec);

  SpatialAtom a;
  a.kind = kind;
  auto need = signature(kind).ident_count;
  std::vector<std::string> names;
  if (spec.region_slots == RegionSlots::anywhere) {
    auto pool = spec.objects;
    pool.insert(pool.end(), spec.regions.begin(), spec.regions.end());
    names = pick_distinct(rng, std::move(pool), need);
  } else if (kind == AtomKind::encl_in) {
    names = pick_distinct(rng, spec.objects, 1);
    std::vector<std::string> containers;
    for (const auto& o : spec.objects)
      if (o != names[0]) containers.push_back(o);
    containers.insert(containers.end(), spec.regions.begin(), spec.regions.end());
    names.push_back(pick_distinct(rng, containers, 1)[0]);
  } else {
    names = pick_distinct(rng, spec.objects, need);
  }
  for (auto& n : names) a.args.emplace_back(std::move(n));

  const auto& c = spec.constants;
  switch (kind) {
    case AtomKind::touch: a.constants = {sample_constant(rng, c.touch)}; break;
    case AtomKind::close_to: a.constants = {sample_constant(rng, c.close_to)}; break;
    case AtomKind::far_from: a.constants = {sample_constant(rng, c.far_from)}; break;
    case AtomKind::ovlp: a.constants = {sample_constant(rng, c.overlap)}; break;
    case AtomKind::part_ovlp:
      a.constants = {sample_constant(rng, c.overlap)};
      a.constants.push_back(sample_constant(rng, c.containment));
      break;
    case AtomKind::encl_in: a.constants = {sample_constant(rng, c.containment)}; break;
    case AtomKind::oriented: a.constants = {sample_constant(rng, c.orientation)}; break;
    default: a.constants = {sample_constant(rng, c.margin)}; break;
  }
  return a;
}

Formula instantiate_atoms(const Skeleton& skeleton, const GenSpec& spec, GenRng& rng) {
  validate_gen_spec(spec);
  check_universe(spec);
  std::vector<SpatialAtom> atoms;
  auto n = skeleton_leaf_count(skeleton.root);
  for (std::size_t i = 0; i < n; ++i) atoms.push_back(sample_atom(spec, rng));
  return instantiate_atoms(skeleton, atoms);
}

DatasetRecord back_translate_record(const Formula& f, const GenSpec& spec, ParaphraseBackend* paraphraser) {
  DatasetRecord r;
  RenderOptions opts{.symbolic_constants = false, .steps_per_second = spec.steps_per_second};
  bool backend_ok = paraphraser != nullptr && spec.paraphrases > 0;
  for (auto& node : render_all_nodes(f, opts)) {
    NodeText nt{node.path, serialize_formula(node.formula), std::move(node.text.text), {}};
    if (backend_ok) {
      try {
        nt.paraphrases = paraphrase_node({nt.canonical, nt.formula, spec.paraphrases}, *paraphraser);
      } catch (const BackendUnavailable& e) {
        r.warnings.push_back(std::string("paraphrase backend unavailable: ") + e.what());
        backend_ok = false;
      } catch (const BackendMalformedResponse& e) {
        r.warnings.push_back(std::string("paraphrase backend malformed response: ") + e.what());
        backend_ok = false;
      }
    }
    r.nodes.push_back(std::move(nt));
  }
  r.formula = r.nodes.front().formula;
  r.canonical = r.nodes.front().canonical;
  r.paraphrases = r.nodes.front().paraphrases;
  r.metrics = structure_metrics(f);
  return r;
}

ordered_json record_to_json(const DatasetRecord& r) {
  ordered_json nodes = ordered_json::array();
  for (const auto& n : r.nodes) {
    ordered_json node;
    node["path"] = n.path;
    node["formula"] = n.formula;
    node["canonical"] = n.canonical;
    node["paraphrases"] = n.paraphrases;
    nodes.push_back(std::move(node));
  }
  ordered_json meta;
  meta["depth"] = r.metrics.depth;
  meta["breadth"] = r.metrics.max_breadth;
  meta["leaves"] = r.metrics.leaf_count;
  meta["sampled_depth"] = r.sampled_depth;
  meta["sampled_breadth"] = r.sampled_breadth;

  ordered_json j;
  j["schema_version"] = kDatasetSchemaVersion;
  j["id"] = r.id;
  j["seed"] = r.seed;
  j["index"] = r.index;
  j["formula"] = r.formula;
  j["canonical"] = r.canonical;
  j["paraphrases"] = r.paraphrases;
  j["metadata"] = std::move(meta);
  j["nodes"] = std::move(nodes);
  j["warnings"] = r.warnings;
  return j;
}

DatasetRecord generate_record(const GenSpec& spec, std::uint64_t index, ParaphraseBackend* paraphraser) {
  auto rng = record_stream(spec.seed, index);
  auto sk = sample_skeleton(spec, rng);
  auto f = instantiate_atoms(sk, spec, rng);
  auto r = back_translate_record(f, spec, paraphraser);
  r.id = std::to_string(spec.seed) + "-" + std::to_string(index);
  r.seed = spec.seed;
  r.index = index;
  r.sampled_depth = sk.sampled_depth;
  r.sampled_breadth = sk.sampled_breadth;
  return r;
}

ordered_json summary_to_json(const DatasetSummary& s) {
  ordered_json depth = ordered_json::object();
  for (auto [k, v] : s.depth_histogram) depth[std::to_string(k)] = v;
  ordered_json breadth = ordered_json::object();
  for (auto [k, v] : s.breadth_histogram) breadth[std::to_string(k)] = v;
  ordered_json j;
  j["records"] = s.records;
  j["seed"] = s.seed;
  j["depth_histogram"] = depth;
  j["breadth_histogram"] = breadth;
  j["warnings"] = s.warnings;
  return j;
}

DatasetSummary generate_dataset(const GenSpec& spec, std::size_t n, std::ostream& out,
                                ParaphraseBackend* paraphraser, unsigned jobs) {
  validate_gen_spec(spec);
  check_universe(spec);
  jobs = std::max(1u, jobs);
  DatasetSummary summary;
  summary.seed = spec.seed;

  const std::size_t block = 256 * jobs;
  std::vector<DatasetRecord> records;
  for (std::size_t start = 0; start < n; start += block) {
    std::size_t count = std::min(block, n - start);
    records.assign(count, DatasetRecord{});
    auto work = [&](unsigned worker) {
      for (std::size_t i = worker; i < count; i += jobs) records[i] = generate_record(spec, start + i, paraphraser);
    };
    if (jobs == 1) {
      work(0);
    } else {
      std::vector<std::exception_ptr> errors(jobs);
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < jobs; ++w)
        pool.emplace_back([&, w] {
          try {
            work(w);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      for (auto& t : pool) t.join();
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    }
    for (const auto& r : records) {
      out << record_to_json(r).dump() << '\n';
      ++summary.records;
      ++summary.depth_histogram[r.metrics.depth];
      ++summary.breadth_histogram[r.metrics.max_breadth];
      summary.warnings += r.warnings.size();
    }
  }
  if (!out) throw IoError("failed writing dataset records");
  return summary;
}

}  // namespace nl2spatial
