#pragma once

#include <nlohmann/json.hpp>

#include "ddfem/geometry/sdf.hpp"

namespace ddfem::geometry {

/// Builds an SDF tree from its scene-file description (see docs/scene-format.md).
/// Throws Error(kParse) with the JSON path of the offending node.
Sdf sdf_from_json(const nlohmann::json& node);

}  // namespace ddfem::geometry
