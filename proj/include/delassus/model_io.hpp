#pragma once

#include <string>
#include <utility>

#include "delassus/model.hpp"

namespace delassus {

/// JSON model description. Schema (all angles/lengths SI):
///
/// {
///   "links": [
///     {"name": "link1", "parent": 0,
///      "joint": {"type": "revolute", "axis": [0, 0, 1]},
///      "placement": {"translation": [1, 0, 0],
///                    "rpy": [0, 0, 0]},            // or "rotation": 3x3
///      "inertia": {"mass": 1.0, "com": [0.5, 0, 0],
///                  "moments": [ixx, iyy, izz, ixy, ixz, iyz]}}
///   ],
///   "constraints": [
///     {"link": 3, "type": "weld"},
///     {"link": 5, "type": "connect"},
///     {"link": 2, "type": "custom", "K": [[...6 numbers...], ...]}
///   ]
/// }
///
/// Links must appear parent-before-child; joint types are revolute,
/// prismatic, spherical, free_flyer. Placement defaults to identity,
/// inertia to a unit point mass at the origin (which validate() rejects
/// only if the mass is not positive).
std::pair<KinematicTree, ConstraintSet> load_model_json(
    const std::string& text);

std::pair<KinematicTree, ConstraintSet> load_model_json_file(
    const std::string& path);

std::string save_model_json(const KinematicTree& tree,
                            const ConstraintSet& cons);

}  // namespace delassus
