#include "nl2spatial/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "nl2spatial/datagen.hpp"
#include "nl2spatial/errors.hpp"
#include "nl2spatial/hlt.hpp"
#include "nl2spatial/io.hpp"
#include "nl2spatial/monitor.hpp"
#include "nl2spatial/renderer.hpp"
#include "nl2spatial/rollout.hpp"
#include "nl2spatial/syntax.hpp"

#ifndef NL2SPATIAL_VERSION
#define NL2SPATIAL_VERSION "0.0.0"
#endif

namespace nl2spatial {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// A usage problem discovered after argument parsing (exit code 1).
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c); };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

// A formula given inline or as the path of a file holding it.
Formula load_formula_arg(const std::string& arg) {
  std::error_code ec;
  std::string text = std::filesystem::is_regular_file(arg, ec) ? trim(read_file(arg)) : arg;
  auto f = parse_formula(text);
  auto violations = validate_formula(f);
  if (!violations.empty())
    throw SchemaError("invalid formula: " + std::string(to_string(violations.front().kind)) + ": " +
                      violations.front().detail);
  return f;
}

ordered_json trace_json(const RobustnessTrace& trace) {
  ordered_json arr = ordered_json::array();
  for (const auto& p : trace.values) arr.push_back({{"t", p.t}, {"robustness", p.robustness}});
  return arr;
}

struct Backends {
  std::unique_ptr<MockBackend> mock;
  std::unique_ptr<RemoteBackend> remote;
  std::unique_ptr<BoundedBackend> bounded;
  std::unique_ptr<AcceptAllChecker> accept_all;
};

ParaphraseBackend* make_paraphraser(Backends& b, const std::string& which, int inflight) {
  if (which == "none") return nullptr;
  if (which == "mock") {
    b.mock = std::make_unique<MockBackend>();
    return b.mock.get();
  }
  auto cfg = RemoteConfig::from_env();
  if (!cfg) throw BackendUnavailable("remote backend selected but NL2SPATIAL_LLM_URL is not set");
  b.remote = std::make_unique<RemoteBackend>(*cfg);
  b.bounded = std::make_unique<BoundedBackend>(b.remote.get(), b.remote.get(), inflight);
  return b.bounded.get();
}

AlignmentChecker* make_checker(Backends& b, const std::string& which, int inflight) {
  if (which == "accept-all") {
    b.accept_all = std::make_unique<AcceptAllChecker>();
    return b.accept_all.get();
  }
  if (which == "mock") {
    b.mock = std::make_unique<MockBackend>();
    return b.mock.get();
  }
  make_paraphraser(b, "remote", inflight);
  return b.bounded.get();
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path == "-")
    out << content;
  else
    write_file_atomic(path, content);
}

struct Context {
  bool json_mode = false;
  std::ostream& out;
  std::ostream& err;

  void emit(const ordered_json& doc) const { out << doc.dump(2) << '\n'; }
};

// --- subcommands -------------------------------------------------------------

struct MonitorArgs {
  std::string spec, traj, trace;
};

int cmd_monitor(const Context& ctx, const MonitorArgs& a) {
  auto f = load_formula_arg(a.spec);
  auto traj = load_trajectory(std::filesystem::path(a.traj));
  auto trace = robustness_trace(traj, f);
  double r0 = trace.values.front().robustness;
  bool sat = r0 > 0;
  if (!a.trace.empty() && !(a.trace == "-" && ctx.json_mode)) {
    std::ostringstream csv;
    write_trace_csv(trace, csv);
    write_output(a.trace, csv.str(), ctx.out);
  }
  if (ctx.json_mode) {
    ordered_json doc;
    doc["formula"] = serialize_formula(f);
    doc["robustness"] = r0;
    doc["satisfied"] = sat;
    doc["horizon"] = required_horizon(f);
    doc["trace"] = trace_json(trace);
    ctx.emit(doc);
  } else {
    std::ostream& o = a.trace == "-" ? ctx.err : ctx.out;
    o << "robustness: " << format_robustness(r0) << '\n'
      << "verdict: " << (sat ? "SATISFIED" : "VIOLATED") << '\n'
      << "horizon: " << required_horizon(f) << '\n';
  }
  return sat ? kExitOk : kExitNegative;
}

struct RenderArgs {
  std::string formula;
  bool symbolic = false;
  double steps_per_second = 1.0;
  bool all_nodes = false;
};

int cmd_render(const Context& ctx, const RenderArgs& a) {
  auto f = load_formula_arg(a.formula);
  RenderOptions opts{.symbolic_constants = a.symbolic, .steps_per_second = a.steps_per_second};
  auto ct = render_canonical(f, opts);
  if (ctx.json_mode) {
    ordered_json doc;
    doc["formula"] = serialize_formula(f);
    doc["text"] = ct.text;
    ordered_json spans = ordered_json::array();
    for (const auto& s : ct.node_map) spans.push_back({{"path", s.path}, {"begin", s.begin}, {"end", s.end}});
    doc["node_map"] = spans;
    if (a.all_nodes) {
      ordered_json nodes = ordered_json::array();
      for (const auto& n : render_all_nodes(f, opts))
        nodes.push_back({{"path", n.path}, {"formula", serialize_formula(n.formula)}, {"text", n.text.text}});
      doc["nodes"] = nodes;
    }
    ctx.emit(doc);
  } else if (a.all_nodes) {
    for (const auto& n : render_all_nodes(f, opts)) {
      std::string p = "root";
      for (auto i : n.path) p += "." + std::to_string(i);
      ctx.out << p << '\t' << n.text.text << '\n';
    }
  } else {
    ctx.out << ct.text << '\n';
  }
  return kExitOk;
}

struct ParseArgs {
  std::string text, text_file;
  double steps_per_second = 1.0;
};

int cmd_parse_nl(const Context& ctx, const ParseArgs& a) {
  if (a.text.empty() == a.text_file.empty()) throw UsageError("give exactly one of TEXT or --text-file");
  std::string text = a.text_file.empty() ? a.text : read_file(a.text_file);
  RenderOptions opts{.steps_per_second = a.steps_per_second};
  auto f = parse_controlled_english(text, opts);
  if (ctx.json_mode) {
    ordered_json doc;
    doc["formula"] = serialize_formula(f);
    doc["canonical"] = render_canonical(f, opts).text;
    ctx.emit(doc);
  } else {
    ctx.out << serialize_formula(f) << '\n';
  }
  return kExitOk;
}

struct GenArgs {
  std::string spec, out, backend = "mock";
  std::size_t n = 0;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paraphrases;
  unsigned jobs = 1;
  int inflight = 4;
};

int cmd_gen_dataset(const Context& ctx, const GenArgs& a) {
  if (ctx.json_mode && a.out == "-") throw UsageError("--json needs --out to name a file");
  GenSpec spec = GenSpec::defaults();
  if (!a.spec.empty()) {
    json j = json::parse(read_file(a.spec), nullptr, false);
    if (j.is_discarded()) throw InfeasibleSpecError(a.spec + ": not valid JSON");
    spec = gen_spec_from_json(j);
  }
  if (a.seed) spec.seed = *a.seed;
  if (a.paraphrases) spec.paraphrases = *a.paraphrases;
  validate_gen_spec(spec);

  Backends backends;
  auto* paraphraser = make_paraphraser(backends, a.backend, a.inflight);
  DatasetSummary summary;
  if (a.out == "-") {
    summary = generate_dataset(spec, a.n, ctx.out, paraphraser, a.jobs);
  } else {
    AtomicFile file(a.out);
    summary = generate_dataset(spec, a.n, file.stream(), paraphraser, a.jobs);
    file.commit();
  }

  if (ctx.json_mode) {
    auto doc = summary_to_json(summary);
    doc["out"] = a.out;
    doc["schema_version"] = kDatasetSchemaVersion;
    ctx.emit(doc);
  } else {
    std::ostream& o = a.out == "-" ? ctx.err : ctx.out;
    o << "wrote " << summary.records << " records to " << a.out << " (seed " << summary.seed << ")\n";
    o << "depth histogram:";
    for (auto [d, k] : summary.depth_histogram) o << ' ' << d << ':' << k;
    o << "\nbreadth histogram:";
    for (auto [b, k] : summary.breadth_histogram) o << ' ' << b << ':' << k;
    o << "\nwarnings: " << summary.warnings << '\n';
  }
  return kExitOk;
}

struct SelectArgs {
  std::string spec, traces, mode = "initial";
  std::vector<std::string> rollouts;
};

int cmd_select_rollout(const Context& ctx, const SelectArgs& a) {
  auto f = load_formula_arg(a.spec);
  std::vector<Trajectory> candidates;
  for (const auto& path : a.rollouts) candidates.push_back(load_trajectory(std::filesystem::path(path)));
  auto mode = a.mode == "mean" ? ScoreMode::mean : ScoreMode::initial;
  auto scores = score_rollouts(candidates, f, mode);
  auto best = select_best(scores);
  if (!a.traces.empty()) {
    std::ostringstream csv;
    export_traces(scores, csv);
    if (a.traces == "-" && ctx.json_mode) throw UsageError("--json cannot share stdout with --traces -");
    write_output(a.traces, csv.str(), ctx.out);
  }
  double overall = scores[best].overall;
  if (ctx.json_mode) {
    ordered_json doc;
    doc["formula"] = serialize_formula(f);
    doc["mode"] = to_string(mode);
    doc["winner"] = best;
    doc["overall"] = overall;
    ordered_json cands = ordered_json::array();
    for (const auto& s : scores)
      cands.push_back({{"index", s.candidate}, {"file", a.rollouts[s.candidate]}, {"overall", s.overall},
                       {"satisfied", s.satisfied}});
    doc["candidates"] = cands;
    ctx.emit(doc);
  } else {
    std::ostream& o = a.traces == "-" ? ctx.err : ctx.out;
    for (const auto& s : scores)
      o << "candidate " << s.candidate << ": overall " << format_robustness(s.overall) << " ("
        << (s.satisfied ? "SATISFIED" : "VIOLATED") << ") " << a.rollouts[s.candidate] << '\n';
    o << "winner: " << best << '\n' << "overall: " << format_robustness(overall) << '\n';
  }
  return overall > 0 ? kExitOk : kExitNegative;
}

struct ComposeArgs {
  std::string hlt;
  bool symbolic = false;
};

int cmd_compose_hlt(const Context& ctx, const ComposeArgs& a) {
  auto h = load_hlt(a.hlt);
  auto f = compose_hlt(h);
  auto text = render_canonical(f, {.symbolic_constants = a.symbolic}).text;
  if (ctx.json_mode) {
    ordered_json doc;
    doc["formula"] = serialize_formula(f);
    doc["text"] = text;
    doc["nodes"] = h.nodes.size();
    ctx.emit(doc);
  } else {
    ctx.out << serialize_formula(f) << '\n' << text << '\n';
  }
  return kExitOk;
}

struct ExpandArgs {
  std::string proposals, instruction, root_formula, out, checker = "mock";
  std::size_t budget = 10000;
  int inflight = 4;
};

int cmd_expand_hlt(const Context& ctx, const ExpandArgs& a) {
  auto gold = load_hlt(a.proposals);
  const auto* gold_root = gold.find(gold.root);
  if (!gold_root) throw HltFormatError(a.proposals + ": root names no node");
  std::string instruction = a.instruction.empty() ? gold.instruction : a.instruction;
  Formula root_label = a.root_formula.empty() ? gold_root->label : load_formula_arg(a.root_formula);

  Backends backends;
  auto* checker = make_checker(backends, a.checker, a.inflight);
  ReplayProposer proposer(gold);
  auto result = expand_frontier(seed_hlt(instruction, root_label, gold.root), proposer, *checker, {.budget = a.budget});
  auto tree = hlt_to_json(result.tree);

  if (!a.out.empty()) write_file_atomic(a.out, tree.dump(2) + "\n");
  if (ctx.json_mode) {
    ordered_json doc;
    doc["status"] = to_string(result.status);
    doc["rounds"] = result.rounds;
    doc["proposals"] = result.proposals;
    ordered_json rejected = ordered_json::array();
    for (const auto& r : result.rejected) rejected.push_back({{"id", r.candidate.id}, {"reason", r.reason}});
    doc["rejected"] = rejected;
    doc["tree"] = ordered_json::parse(tree.dump());
    ctx.emit(doc);
  } else {
    std::ostream& o = a.out.empty() ? ctx.err : ctx.out;
    if (a.out.empty()) ctx.out << tree.dump(2) << '\n';
    o << "status: " << to_string(result.status) << '\n'
      << "rounds: " << result.rounds << '\n'
      << "nodes: " << result.tree.nodes.size() << '\n'
      << "rejected: " << result.rejected.size() << '\n';
    for (const auto& r : result.rejected) o << "  " << r.candidate.id << ": " << r.reason << '\n';
  }
  return result.status == ExpansionStatus::complete ? kExitOk : kExitNegative;
}

std::string error_type(const std::exception& e) {
  if (dynamic_cast<const SyntaxError*>(&e)) return "SyntaxError";
  if (dynamic_cast<const NotCanonicalError*>(&e)) return "NotCanonicalError";
  if (dynamic_cast<const BackendUnavailable*>(&e)) return "BackendUnavailable";
  if (dynamic_cast<const BackendMalformedResponse*>(&e)) return "BackendMalformedResponse";
  if (dynamic_cast<const IoError*>(&e)) return "IoError";
  if (dynamic_cast<const Error*>(&e)) return "InputError";
  return "Error";
}

}  // namespace

std::string version_string() {
  return std::string("nl2spatial ") + NL2SPATIAL_VERSION + " (dataset schema v" +
         std::to_string(kDatasetSchemaVersion) + ")";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spatio-temporal specification toolkit: monitoring, rendering, datasets and HLTs", "nl2spatial"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);
  app.fallthrough();
  bool json_mode = false;
  app.add_flag("--json", json_mode, "Emit one JSON document on stdout");

  MonitorArgs mon;
  auto* monitor = app.add_subcommand("monitor", "Robustness trace and verdict of a formula over a trajectory");
  monitor->add_option("--spec", mon.spec, "Formula (machine syntax) or a file holding it")->required();
  monitor->add_option("--traj", mon.traj, "Trajectory JSON file")->required()->check(CLI::ExistingFile);
  monitor->add_option("--trace", mon.trace, "Write the robustness trace CSV here ('-' for stdout)");

  RenderArgs ren;
  auto* render = app.add_subcommand("render", "Formula to canonical controlled English");
  render->add_option("formula", ren.formula, "Formula (machine syntax) or a file holding it")->required();
  render->add_flag("--symbolic-constants", ren.symbolic, "Print constant symbols instead of values");
  render->add_option("--steps-per-second", ren.steps_per_second, "Divide interval bounds by this rate")
      ->check(CLI::PositiveNumber);
  render->add_flag("--all-nodes", ren.all_nodes, "Render every subformula separately");

  ParseArgs par;
  auto* parse = app.add_subcommand("parse-nl", "Canonical controlled English back to a formula");
  parse->add_option("text", par.text, "Canonical English text");
  parse->add_option("--text-file", par.text_file, "Read the text from a file")->check(CLI::ExistingFile);
  parse->add_option("--steps-per-second", par.steps_per_second, "Rate used when rendering")
      ->check(CLI::PositiveNumber);

  GenArgs gen;
  auto* gends = app.add_subcommand("gen-dataset", "Generate a JSON-lines corpus of formulas and texts");
  gends->add_option("--spec", gen.spec, "Generation spec JSON (defaults when omitted)")->check(CLI::ExistingFile);
  gends->add_option("--n", gen.n, "Number of records")->required();
  gends->add_option("--seed", gen.seed, "Override the spec seed");
  gends->add_option("--out", gen.out, "Output path ('-' for stdout)")->required();
  gends->add_option("--jobs", gen.jobs, "Worker threads")->check(CLI::Range(1u, 256u));
  gends->add_option("--backend", gen.backend, "Paraphrase backend")
      ->check(CLI::IsMember({"mock", "remote", "none"}));
  gends->add_option("--paraphrases", gen.paraphrases, "Paraphrases per node");
  gends->add_option("--max-inflight", gen.inflight, "Concurrent remote requests")->check(CLI::Range(1, 1024));

  SelectArgs sel;
  auto* select = app.add_subcommand("select-rollout", "Score candidate trajectories and pick the most robust");
  select->add_option("--spec", sel.spec, "Formula (machine syntax) or a file holding it")->required();
  select->add_option("--rollouts", sel.rollouts, "Candidate trajectory files")->required()->check(CLI::ExistingFile);
  select->add_option("--traces", sel.traces, "Write all robustness traces as CSV ('-' for stdout)");
  select->add_option("--mode", sel.mode, "Overall score: robustness at t=0 or mean over the domain")
      ->check(CLI::IsMember({"initial", "mean"}));

  ComposeArgs com;
  auto* compose = app.add_subcommand("compose-hlt", "Assemble the flat formula of an HLT");
  compose->add_option("hlt", com.hlt, "HLT JSON file")->required()->check(CLI::ExistingFile);
  compose->add_flag("--symbolic-constants", com.symbolic, "Render constants symbolically");

  ExpandArgs exp;
  auto* expand = app.add_subcommand("expand-hlt", "Refine an instruction into an HLT by replaying proposals");
  expand->add_option("--proposals", exp.proposals, "HLT JSON whose nodes are replayed as proposals")
      ->required()
      ->check(CLI::ExistingFile);
  expand->add_option("--instruction", exp.instruction, "Instruction text (default: the proposal file's)");
  expand->add_option("--root-formula", exp.root_formula, "Root label (default: the proposal file's)");
  expand->add_option("--checker", exp.checker, "Alignment checker")
      ->check(CLI::IsMember({"mock", "accept-all", "remote"}));
  expand->add_option("--budget", exp.budget, "Maximum number of proposals examined");
  expand->add_option("--out", exp.out, "Write the resulting HLT JSON here");
  expand->add_option("--max-inflight", exp.inflight, "Concurrent remote requests")->check(CLI::Range(1, 1024));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Context ctx{json_mode, out, err};
  auto fail = [&](int code, const std::string& type, const std::string& message,
                  std::optional<std::size_t> position = std::nullopt) {
    err << "error: " << message << '\n';
    if (json_mode) {
      ordered_json e;
      e["type"] = type;
      e["message"] = message;
      if (position) e["position"] = *position;
      ctx.emit({{"error", e}});
    }
    return code;
  };

  try {
    if (*monitor) return cmd_monitor(ctx, mon);
    if (*render) return cmd_render(ctx, ren);
    if (*parse) return cmd_parse_nl(ctx, par);
    if (*gends) return cmd_gen_dataset(ctx, gen);
    if (*select) return cmd_select_rollout(ctx, sel);
    if (*compose) return cmd_compose_hlt(ctx, com);
    if (*expand) return cmd_expand_hlt(ctx, exp);
  } catch (const UsageError& e) {
    return fail(kExitUsage, "UsageError", e.what());
  } catch (const SyntaxError& e) {
    return fail(kExitInput, "SyntaxError", e.what(), e.position());
  } catch (const NotCanonicalError& e) {
    return fail(kExitInput, "NotCanonicalError", e.what(), e.position());
  } catch (const std::exception& e) {
    return fail(kExitInput, error_type(e), e.what());
  }
  return kExitUsage;
}

}  // namespace nl2spatial
