#include "nl2spatial/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "nl2spatial/errors.hpp"

namespace nl2spatial {

namespace {

double distance(const DiskObject& a, const DiskObject& b) {
  return std::hypot(a.center.x - b.center.x, a.center.y - b.center.y);
}

const DiskObject& lookup(const SceneState& s, const SpatialAtom& a, std::size_t k) {
  if (k >= a.args.size()) throw ArityError("atom is missing identifier #" + std::to_string(k));
  return s.at(a.args[k]);
}

double constant(const SpatialAtom& a, std::size_t k) {
  if (k >= a.constants.size()) throw ArityError("atom is missing constant #" + std::to_string(k));
  return a.constants[k];
}

// (r_j - rho) - (||p_i - p_j|| + r_i)
double encl_in(const DiskObject& i, const DiskObject& j, double margin) {
  return (j.radius - margin) - (distance(i, j) + i.radius);
}

double ovlp(const DiskObject& i, const DiskObject& j, double tau) {
  double d = distance(i, j);
  return std::min((i.radius + j.radius - tau) - d, d - (std::abs(i.radius - j.radius) + tau));
}

}  // namespace

double signed_clearance(const SceneState& state, const Ident& i, const Ident& j) {
  if (i == j) throw DuplicateArgError("signed clearance of '" + i.name() + "' with itself");
  const auto& a = state.at(i);
  const auto& b = state.at(j);
  return distance(a, b) - (a.radius + b.radius);
}

double rho_atom(const SceneState& state, const SpatialAtom& atom) {
  const auto& i = lookup(state, atom, 0);
  const auto& j = lookup(state, atom, 1);
  switch (atom.kind) {
    case AtomKind::touch: {
      double sigma = signed_clearance(state, atom.args[0], atom.args[1]);
      return -std::abs(sigma) + constant(atom, 0);
    }
    case AtomKind::close_to:
      return constant(atom, 0) - distance(i, j);
    case AtomKind::far_from:
      return distance(i, j) - constant(atom, 0);
    case AtomKind::ovlp:
      return ovlp(i, j, constant(atom, 0));
    case AtomKind::part_ovlp: {
      double rho = constant(atom, 1);
      return std::min({ovlp(i, j, constant(atom, 0)), -encl_in(i, j, rho), -encl_in(j, i, rho)});
    }
    case AtomKind::encl_in:
      return encl_in(i, j, constant(atom, 0));
    case AtomKind::left_of:
      return (j.center.x - j.radius) - (i.center.x + i.radius + constant(atom, 0));
    case AtomKind::right_of:
      return (i.center.x - i.radius) - (j.center.x + j.radius + constant(atom, 0));
    case AtomKind::below:
      return (j.center.y - j.radius) - (i.center.y + i.radius + constant(atom, 0));
    case AtomKind::above:
      return (i.center.y - i.radius) - (j.center.y + j.radius + constant(atom, 0));
    case AtomKind::between_px:
    case AtomKind::between_py: {
      const auto& a = i;
      const auto& b = j;
      const auto& c = lookup(state, atom, 2);
      double kappa = constant(atom, 0);
      auto coord = [&](const DiskObject& d) {
        return atom.kind == AtomKind::between_px ? d.center.x : d.center.y;
      };
      return std::min((coord(b) - b.radius) - (coord(a) + a.radius + kappa),
                      (coord(c) - c.radius) - (coord(b) + b.radius + kappa));
    }
    case AtomKind::oriented: {
      if (!i.heading || !j.heading)
        throw MissingHeadingError("oriented(" + atom.args[0].name() + "," + atom.args[1].name() +
                                  ") needs headings on both objects");
      double dx = i.heading->x - j.heading->x;
      double dy = i.heading->y - j.heading->y;
      return constant(atom, 0) - 0.5 * (dx * dx + dy * dy);
    }
  }
  throw std::logic_error("unhandled atom kind");
}

bool holds_atom(const SceneState& state, const SpatialAtom& atom) {
  const auto& i = lookup(state, atom, 0);
  const auto& j = lookup(state, atom, 1);
  double d = distance(i, j);
  switch (atom.kind) {
    case AtomKind::touch:
      return std::abs(d - (i.radius + j.radius)) <= constant(atom, 0);
    case AtomKind::close_to:
      return d <= constant(atom, 0);
    case AtomKind::far_from:
      return d >= constant(atom, 0);
    case AtomKind::ovlp: {
      double tau = constant(atom, 0);
      return std::abs(i.radius - j.radius) + tau < d && d < i.radius + j.radius - tau;
    }
    case AtomKind::part_ovlp: {
      double tau = constant(atom, 0);
      double rho = constant(atom, 1);
      bool overlap = std::abs(i.radius - j.radius) + tau < d && d < i.radius + j.radius - tau;
      bool i_in_j = d + i.radius <= j.radius - rho;
      bool j_in_i = d + j.radius <= i.radius - rho;
      return overlap && !i_in_j && !j_in_i;
    }
    case AtomKind::encl_in:
      return d + i.radius <= j.radius - constant(atom, 0);
    case AtomKind::left_of:
      return i.center.x + i.radius + constant(atom, 0) <= j.center.x - j.radius;
    case AtomKind::right_of:
      return j.center.x + j.radius + constant(atom, 0) <= i.center.x - i.radius;
    case AtomKind::below:
      return i.center.y + i.radius + constant(atom, 0) <= j.center.y - j.radius;
    case AtomKind::above:
      return j.center.y + j.radius + constant(atom, 0) <= i.center.y - i.radius;
    case AtomKind::between_px:
    case AtomKind::between_py: {
      const auto& c = lookup(state, atom, 2);
      double kappa = constant(atom, 0);
      bool x = atom.kind == AtomKind::between_px;
      double pa = x ? i.center.x : i.center.y;
      double pb = x ? j.center.x : j.center.y;
      double pc = x ? c.center.x : c.center.y;
      return pa + i.radius + kappa <= pb - j.radius && pb + j.radius + kappa <= pc - c.radius;
    }
    case AtomKind::oriented: {
      if (!i.heading || !j.heading) throw MissingHeadingError("oriented needs headings");
      double dx = i.heading->x - j.heading->x;
      double dy = i.heading->y - j.heading->y;
      return 0.5 * (dx * dx + dy * dy) <= constant(atom, 0);
    }
  }
  throw std::logic_error("unhandled atom kind");
}

std::int64_t last_evaluable_index(const Trajectory& traj, const Formula& f) {
  return static_cast<std::int64_t>(traj.length()) - 1 - required_horizon(f);
}

namespace {

// Signal of f over [0, last], where last = len-1-H(f) >= 0.
std::vector<double> signal(const Trajectory& traj, const Formula& f) {
  const auto last = last_evaluable_index(traj, f);
  const auto n = static_cast<std::size_t>(last + 1);
  std::vector<double> out(n);
  switch (f.op()) {
    case Op::atom:
      for (std::size_t t = 0; t < n; ++t) out[t] = rho_atom(traj.at(t), f.atom_value());
      return out;
    case Op::negation: {
      auto s = signal(traj, f.child(0));
      for (std::size_t t = 0; t < n; ++t) out[t] = -s[t];
      return out;
    }
    case Op::conjunction:
    case Op::disjunction: {
      const bool conj = f.op() == Op::conjunction;
      std::fill(out.begin(), out.end(), conj ? std::numeric_limits<double>::infinity()
                                             : -std::numeric_limits<double>::infinity());
      for (const auto& c : f.children()) {
        auto s = signal(traj, c);
        for (std::size_t t = 0; t < n; ++t) out[t] = conj ? std::min(out[t], s[t]) : std::max(out[t], s[t]);
      }
      return out;
    }
    case Op::implication: {
      auto lhs = signal(traj, f.child(0));
      auto rhs = signal(traj, f.child(1));
      for (std::size_t t = 0; t < n; ++t) out[t] = std::max(-lhs[t], rhs[t]);
      return out;
    }
    case Op::always:
    case Op::eventually: {
      const bool all = f.op() == Op::always;
      auto s = signal(traj, f.child(0));
      const auto [lo, hi] = f.window();
      for (std::size_t t = 0; t < n; ++t) {
        double acc = s[t + static_cast<std::size_t>(lo)];
        for (auto k = lo + 1; k <= hi; ++k) {
          double v = s[t + static_cast<std::size_t>(k)];
          acc = all ? std::min(acc, v) : std::max(acc, v);
        }
        out[t] = acc;
      }
      return out;
    }
    case Op::until: {
      auto lhs = signal(traj, f.child(0));
      auto rhs = signal(traj, f.child(1));
      const auto [lo, hi] = f.window();
      for (std::size_t t = 0; t < n; ++t) {
        // Running min of lhs over [t, t'] with t' inclusive.
        double hold = std::numeric_limits<double>::infinity();
        for (std::int64_t k = 0; k < lo; ++k) hold = std::min(hold, lhs[t + static_cast<std::size_t>(k)]);
        double best = -std::numeric_limits<double>::infinity();
        for (auto k = lo; k <= hi; ++k) {
          auto tp = t + static_cast<std::size_t>(k);
          hold = std::min(hold, lhs[tp]);
          best = std::max(best, std::min(rhs[tp], hold));
        }
        out[t] = best;
      }
      return out;
    }
  }
  throw std::logic_error("unhandled operator");
}

}  // namespace

std::vector<double> robustness_signal(const Trajectory& traj, const Formula& f) {
  const auto h = required_horizon(f);
  if (h >= static_cast<std::int64_t>(traj.length()))
    throw EmptyDomainError("formula needs " + std::to_string(h + 1) + " frames, trajectory has " +
                           std::to_string(traj.length()));
  return signal(traj, f);
}

double robustness_at(const Trajectory& traj, const Formula& f, std::int64_t t) {
  const auto last = last_evaluable_index(traj, f);
  if (t < 0 || t > last)
    throw HorizonError("t=" + std::to_string(t) + " outside evaluation domain [0," +
                       std::to_string(last) + "]");
  // Only the prefix [0, t] of the outer signal is needed, but sub-signals
  // must extend to t + H anyway, so evaluate the full signal.
  return signal(traj, f)[static_cast<std::size_t>(t)];
}

RobustnessTrace robustness_trace(const Trajectory& traj, const Formula& f) {
  auto s = robustness_signal(traj, f);
  RobustnessTrace trace{f, {}};
  trace.values.reserve(s.size());
  for (std::size_t t = 0; t < s.size(); ++t) trace.values.push_back({static_cast<std::int64_t>(t), s[t]});
  return trace;
}

bool satisfies(const Trajectory& traj, const Formula& f) {
  return robustness_signal(traj, f).front() > 0.0;
}

std::string format_robustness(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

void write_trace_csv(const RobustnessTrace& trace, std::ostream& out) {
  out << "t,robustness\n";
  for (const auto& p : trace.values) out << p.t << ',' << format_robustness(p.robustness) << '\n';
}

}  // namespace nl2spatial
