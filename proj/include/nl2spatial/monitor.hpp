#pragma once

// Quantitative robustness of SpaTiaL formulas over disk-object trajectories.
//
// Atoms are scored from the scene geometry at a single instant; Boolean and
// temporal operators lift through min/max. A formula with required horizon H
// can be evaluated at t in [0, len-1-H] only; anything outside that window is
// an error rather than a clamped value.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nl2spatial/formula.hpp"
#include "nl2spatial/scene.hpp"

namespace nl2spatial {

// ||p_i - p_j|| - (r_i + r_j). Throws UnknownIdentError, DuplicateArgError for i == j.
double signed_clearance(const SceneState& state, const Ident& i, const Ident& j);

double rho_atom(const SceneState& state, const SpatialAtom& atom);

// Boolean reading of an atom taken straight from its defining inequalities.
bool holds_atom(const SceneState& state, const SpatialAtom& atom);

struct TracePoint {
  std::int64_t t;
  double robustness;
};

struct RobustnessTrace {
  Formula formula;
  std::vector<TracePoint> values;
};

// Last index at which f can be evaluated, or -1 when the domain is empty.
std::int64_t last_evaluable_index(const Trajectory& traj, const Formula& f);

// Robustness of f over every evaluable index, as one vector indexed by t.
// Throws EmptyDomainError when the required horizon reaches past the trajectory.
std::vector<double> robustness_signal(const Trajectory& traj, const Formula& f);

// Throws HorizonError if t lies outside the evaluation domain.
double robustness_at(const Trajectory& traj, const Formula& f, std::int64_t t);

RobustnessTrace robustness_trace(const Trajectory& traj, const Formula& f);

// Strictly positive robustness at t = 0; zero counts as a violation.
bool satisfies(const Trajectory& traj, const Formula& f);

// CSV with header `t,robustness`, values printed with 12 significant digits.
void write_trace_csv(const RobustnessTrace& trace, std::ostream& out);

std::string format_robustness(double value);

}  // namespace nl2spatial
