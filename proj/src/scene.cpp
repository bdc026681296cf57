#include "nl2spatial/scene.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nl2spatial/errors.hpp"

namespace nl2spatial {

using nlohmann::json;

void check_disk(const DiskObject& d) {
  if (!(d.radius > 0.0) || !std::isfinite(d.radius))
    throw InvariantError("object '" + d.id.name() + "' has non-positive radius");
  if (!std::isfinite(d.center.x) || !std::isfinite(d.center.y))
    throw InvariantError("object '" + d.id.name() + "' has a non-finite center");
  if (d.heading) {
    double norm = std::hypot(d.heading->x, d.heading->y);
    if (!(std::abs(norm - 1.0) <= kHeadingTolerance))
      throw InvariantError("object '" + d.id.name() + "' heading is not a unit vector");
  }
}

void SceneState::add(DiskObject d) {
  check_disk(d);
  auto name = d.id.name();
  if (!objects_.emplace(name, std::move(d)).second)
    throw InvariantError("duplicate object id '" + name + "'");
}

const DiskObject& SceneState::at(const Ident& id) const {
  auto it = objects_.find(id.name());
  if (it == objects_.end()) throw UnknownIdentError("unknown identifier '" + id.name() + "'");
  return it->second;
}

Trajectory::Trajectory(std::vector<SceneState> states, double step_seconds)
    : states_(std::move(states)), step_seconds_(step_seconds) {
  if (states_.empty()) throw InvariantError("trajectory needs at least one frame");
  if (!(step_seconds_ > 0.0)) throw InvariantError("step_seconds must be positive");
  const auto& first = states_.front().objects();
  for (std::size_t t = 1; t < states_.size(); ++t) {
    const auto& cur = states_[t].objects();
    bool same = cur.size() == first.size();
    for (auto a = cur.begin(), b = first.begin(); same && a != cur.end(); ++a, ++b)
      same = a->first == b->first;
    if (!same)
      throw InvariantError("object set of frame " + std::to_string(t) + " differs from frame 0");
  }
}

namespace {

const json& field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(where + ": missing field '" + key + "'");
  return *it;
}

double number_field(const json& obj, const char* key, const std::string& where) {
  const auto& v = field(obj, key, where);
  if (!v.is_number()) throw SchemaError(where + ": field '" + key + "' must be a number");
  return v.get<double>();
}

DiskObject parse_object(const json& o, const std::string& where) {
  if (!o.is_object()) throw SchemaError(where + ": object entry must be a JSON object");
  const auto& id = field(o, "id", where);
  if (!id.is_string() || !is_valid_ident_name(id.get<std::string>()))
    throw SchemaError(where + ": 'id' must be an identifier string");
  DiskObject d;
  d.id = Ident(id.get<std::string>());
  d.kind = d.id.kind();
  if (auto k = o.find("kind"); k != o.end()) {
    if (*k == "object")
      d.kind = IdentKind::object;
    else if (*k == "region")
      d.kind = IdentKind::region;
    else
      throw SchemaError(where + ": 'kind' must be \"object\" or \"region\"");
  }
  d.center = {number_field(o, "x", where), number_field(o, "y", where)};
  d.radius = number_field(o, "r", where);
  if (auto h = o.find("heading"); h != o.end() && !h->is_null()) {
    if (!h->is_array() || h->size() != 2 || !(*h)[0].is_number() || !(*h)[1].is_number())
      throw SchemaError(where + ": 'heading' must be a two-element number array");
    d.heading = Vec2{(*h)[0].get<double>(), (*h)[1].get<double>()};
  }
  return d;
}

Trajectory from_json(const json& doc) {
  if (!doc.is_object()) throw SchemaError("trajectory document must be a JSON object");
  double step = 1.0;
  if (auto s = doc.find("step_seconds"); s != doc.end()) {
    if (!s->is_number()) throw SchemaError("'step_seconds' must be a number");
    step = s->get<double>();
  }
  const auto& frames = field(doc, "frames", "trajectory");
  if (!frames.is_array()) throw SchemaError("'frames' must be an array");
  std::vector<SceneState> states;
  states.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    std::string where = "frame " + std::to_string(i);
    const auto& fr = frames[i];
    if (!fr.is_object()) throw SchemaError(where + ": must be a JSON object");
    if (auto t = fr.find("t"); t != fr.end()) {
      if (!t->is_number_integer() || t->get<std::int64_t>() != static_cast<std::int64_t>(i))
        throw SchemaError(where + ": 't' must equal the frame index");
    }
    const auto& objs = field(fr, "objects", where);
    if (!objs.is_array()) throw SchemaError(where + ": 'objects' must be an array");
    SceneState s;
    for (const auto& o : objs) s.add(parse_object(o, where));
    states.push_back(std::move(s));
  }
  return Trajectory(std::move(states), step);
}

}  // namespace

Trajectory parse_trajectory_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw TrajectoryParseError(std::string("trajectory JSON: ") + e.what());
  }
  return from_json(doc);
}

Trajectory load_trajectory(std::istream& in) {
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_trajectory_json(buf.str());
}

Trajectory load_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trajectory file " + path.string());
  return load_trajectory(in);
}

std::string trajectory_to_json(const Trajectory& traj) {
  json frames = json::array();
  for (std::size_t t = 0; t < traj.length(); ++t) {
    json objs = json::array();
    for (const auto& [name, d] : traj.at(t).objects()) {
      json o = {{"id", name},
                {"kind", d.kind == IdentKind::region ? "region" : "object"},
                {"x", d.center.x},
                {"y", d.center.y},
                {"r", d.radius}};
      if (d.heading) o["heading"] = {d.heading->x, d.heading->y};
      objs.push_back(std::move(o));
    }
    frames.push_back({{"t", t}, {"objects", std::move(objs)}});
  }
  json doc = {{"step_seconds", traj.step_seconds()}, {"frames", std::move(frames)}};
  return doc.dump();
}

}  // namespace nl2spatial
