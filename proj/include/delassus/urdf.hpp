#pragma once

#include <map>
#include <string>
#include <vector>

#include "delassus/generators.hpp"
#include "delassus/model.hpp"

namespace delassus {

/// Parsed URDF subset: inertial and kinematic data only. Supported joint
/// types: revolute, continuous (treated as revolute), prismatic, fixed,
/// floating. visual/collision/mimic/transmission elements are skipped and
/// reported in `warnings`.
struct UrdfDocument {
  struct Inertial {
    double mass = 0.0;
    Transform<double> origin;      // inertial frame in the link frame
    Mat3<double> inertia;          // about the inertial frame origin
    bool present = false;
  };
  struct Link {
    std::string name;
    Inertial inertial;
  };
  struct Joint {
    std::string name;
    std::string type;
    std::string parent, child;
    Transform<double> origin;  // child frame in the parent frame
    Vec3<double> axis{1.0, 0.0, 0.0};
  };

  std::vector<Link> links;
  std::vector<Joint> joints;
  std::string root;  // root link name
  std::vector<std::string> warnings;
};

/// Parses URDF XML text. Throws MalformedXml, MultipleRoots,
/// CyclicJointGraph or UnsupportedJointType.
UrdfDocument parse_urdf(const std::string& xml_text);

/// Conversion result. Fixed joints are merged (placements composed,
/// inertias summed in the surviving link's frame) and links renumbered
/// root-to-leaves. link_index maps URDF link names to tree indices; links
/// merged into an ancestor map to that ancestor.
struct UrdfModel {
  KinematicTree tree;
  std::map<std::string, int> link_index;
};

/// With a floating base the root link gets a free-flyer joint; with a
/// fixed base the root link is welded to the world and its children attach
/// directly to it (the welded root's own inertia drops out of the
/// dynamics).
UrdfModel to_tree(const UrdfDocument& doc, BaseKind base);

UrdfModel load_urdf_file(const std::string& path, BaseKind base);

}  // namespace delassus
