#pragma once

// Rollout verification: score candidate trajectories against one formula and
// pick the most robust.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "nl2spatial/formula.hpp"
#include "nl2spatial/monitor.hpp"
#include "nl2spatial/scene.hpp"

namespace nl2spatial {

enum class ScoreMode {
  initial,  // robustness at t = 0 (the satisfaction semantics)
  mean,     // mean robustness over the evaluable domain
};

std::string_view to_string(ScoreMode m);

struct RolloutScore {
  std::size_t candidate = 0;
  double overall = 0.0;
  bool satisfied = false;  // robustness at t = 0 strictly positive
  RobustnessTrace trace;
};

// Throws std::invalid_argument for an empty candidate list; monitor errors
// (EmptyDomainError, UnknownIdentError, MissingHeadingError) propagate.
std::vector<RolloutScore> score_rollouts(std::span<const Trajectory> candidates, const Formula& f,
                                         ScoreMode mode = ScoreMode::initial);

// Index of the highest overall score; ties go to the lowest index.
std::size_t select_best(std::span<const RolloutScore> scores);

// CSV with header "candidate,t,robustness", one row per candidate and instant.
void export_traces(std::span<const RolloutScore> scores, std::ostream& out);

}  // namespace nl2spatial
