#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nl2spatial/formula.hpp"

namespace nl2spatial {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline constexpr double kHeadingTolerance = 1e-9;

struct DiskObject {
  Ident id;
  IdentKind kind = IdentKind::object;
  Vec2 center;
  double radius = 1.0;
  std::optional<Vec2> heading;  // unit vector when present

  friend bool operator==(const DiskObject&, const DiskObject&) = default;
};

// Throws InvariantError on a non-positive radius or a non-unit heading.
void check_disk(const DiskObject& d);

class SceneState {
public:
  SceneState() = default;

  // Throws InvariantError for duplicate ids or invalid disks.
  void add(DiskObject d);
  const DiskObject& at(const Ident& id) const;  // throws UnknownIdentError
  bool contains(const Ident& id) const { return objects_.contains(id.name()); }
  const std::map<std::string, DiskObject>& objects() const noexcept { return objects_; }

  friend bool operator==(const SceneState&, const SceneState&) = default;

private:
  std::map<std::string, DiskObject> objects_;
};

class Trajectory {
public:
  // Throws InvariantError if states is empty or object ids drift between frames.
  explicit Trajectory(std::vector<SceneState> states, double step_seconds = 1.0);

  std::size_t length() const noexcept { return states_.size(); }
  const SceneState& at(std::size_t t) const { return states_.at(t); }
  const std::vector<SceneState>& states() const noexcept { return states_; }
  double step_seconds() const noexcept { return step_seconds_; }

private:
  std::vector<SceneState> states_;
  double step_seconds_;
};

// JSON trajectory format:
//   {"step_seconds": 0.02,
//    "frames": [{"t": 0, "objects": [{"id": "obj_1", "kind": "object",
//                "x": 0.0, "y": 0.0, "r": 1.0, "heading": [1.0, 0.0]}]}]}
// `kind` and `heading` are optional. Frame `t` must equal the frame index.
Trajectory load_trajectory(std::istream& in);
Trajectory load_trajectory(const std::filesystem::path& path);
Trajectory parse_trajectory_json(const std::string& text);
std::string trajectory_to_json(const Trajectory& traj);

}  // namespace nl2spatial
