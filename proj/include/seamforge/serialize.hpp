#pragma once

#include "seamforge/forgery.hpp"
#include "seamforge/metrics.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace seamforge {

using Json = nlohmann::ordered_json;

/// Recipe parameters without mask contents; masks are recorded as present or
/// absent only.
Json recipe_to_json(const ForgeryRecipe& recipe);

/// {"width", "height", "removed": [[col...]...], "inserted": [...]} with an
/// "orientation" field per file.
Json trajectories_to_json(const ForgeryResult& result);

struct TrajectoryFile {
  Index width = 0;
  Index height = 0;
  std::vector<SeamTrajectory> removed;
  std::vector<SeamTrajectory> inserted;
};

TrajectoryFile trajectories_from_json(const Json& j);

}  // namespace seamforge
