#include "seamforge/serialize.hpp"

namespace seamforge {

Json recipe_to_json(const ForgeryRecipe& r) {
  Json j;
  j["kind"] = std::string(to_string(r.kind));
  j["variant"] = std::string(to_string(r.variant));
  switch (r.kind) {
    case ForgeryKind::retarget:
      j["ratio"] = r.ratio;
      break;
    case ForgeryKind::object_removal:
      j["protective_mask"] = r.protective.has_value();
      break;
    case ForgeryKind::object_displacement:
      j["direction"] = std::string(to_string(r.direction));
      j["shift"] = r.shift;
      break;
  }
  j["seed"] = r.seed;
  return j;
}

Json trajectories_to_json(const ForgeryResult& result) {
  Json j;
  j["width"] = result.forged.width();
  j["height"] = result.forged.height();
  const bool horizontal = !result.seams_removed.empty()
                              ? result.seams_removed.front().orientation == Orientation::horizontal
                              : !result.seams_inserted.empty() &&
                                    result.seams_inserted.front().orientation == Orientation::horizontal;
  j["orientation"] = horizontal ? "horizontal" : "vertical";
  auto list = [](const std::vector<SeamTrajectory>& seams) {
    Json arr = Json::array();
    for (const auto& s : seams) arr.push_back(s.columns);
    return arr;
  };
  j["removed"] = list(result.seams_removed);
  j["inserted"] = list(result.seams_inserted);
  return j;
}

TrajectoryFile trajectories_from_json(const Json& j) {
  TrajectoryFile f;
  f.width = j.at("width").get<Index>();
  f.height = j.at("height").get<Index>();
  const Orientation orient =
      j.value("orientation", std::string("vertical")) == "horizontal" ? Orientation::horizontal : Orientation::vertical;
  auto read = [&](const char* key) {
    std::vector<SeamTrajectory> out;
    if (!j.contains(key)) return out;
    for (const auto& cols : j.at(key)) out.push_back({cols.get<std::vector<Index>>(), orient});
    return out;
  };
  f.removed = read("removed");
  f.inserted = read("inserted");
  return f;
}

}  // namespace seamforge
