#include "nl2spatial/rollout.hpp"

#include <ostream>
#include <stdexcept>

#include "nl2spatial/errors.hpp"

namespace nl2spatial {

std::string_view to_string(ScoreMode m) { return m == ScoreMode::initial ? "initial" : "mean"; }

std::vector<RolloutScore> score_rollouts(std::span<const Trajectory> candidates, const Formula& f, ScoreMode mode) {
  if (candidates.empty()) throw std::invalid_argument("no candidate rollouts to score");
  std::vector<RolloutScore> scores;
  scores.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    RolloutScore s{i, 0.0, false, robustness_trace(candidates[i], f)};
    double initial = s.trace.values.front().robustness;
    s.satisfied = initial > 0;
    if (mode == ScoreMode::initial) {
      s.overall = initial;
    } else {
      double sum = 0;
      for (const auto& p : s.trace.values) sum += p.robustness;
      s.overall = sum / static_cast<double>(s.trace.values.size());
    }
    scores.push_back(std::move(s));
  }
  return scores;
}

std::size_t select_best(std::span<const RolloutScore> scores) {
  if (scores.empty()) throw std::invalid_argument("no scores to select from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i].overall > scores[best].overall) best = i;
  return scores[best].candidate;
}

void export_traces(std::span<const RolloutScore> scores, std::ostream& out) {
  out << "candidate,t,robustness\n";
  for (const auto& s : scores)
    for (const auto& p : s.trace.values) out << s.candidate << ',' << p.t << ',' << format_robustness(p.robustness) << '\n';
  if (!out) throw IoError("failed writing trace CSV");
}

}  // namespace nl2spatial
