#include "delassus/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace delassus {

namespace {

using nlohmann::json;

Vec3<double> vec3_of(const json& j) {
  if (!j.is_array() || j.size() != 3)
    throw Error(ErrorCode::InvalidArgument, "expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

TransTag trans_tag_of(const Vec3<double>& p) {
  const bool x = p.x != 0.0, y = p.y != 0.0, z = p.z != 0.0;
  if (!x && !y && !z) return TransTag::Zero;
  if (x && !y && !z) return TransTag::AxisX;
  if (!x && y && !z) return TransTag::AxisY;
  if (!x && !y && z) return TransTag::AxisZ;
  return TransTag::General;
}

Mat3<double> rpy_to_rot(double r, double p, double y) {
  const double cr = std::cos(r), sr = std::sin(r);
  const double cp = std::cos(p), sp = std::sin(p);
  const double cy = std::cos(y), sy = std::sin(y);
  // Fixed-axis XYZ convention: R = Rz(y) Ry(p) Rx(r).
  Mat3<double> m;
  m(0, 0) = cy * cp;
  m(0, 1) = cy * sp * sr - sy * cr;
  m(0, 2) = cy * sp * cr + sy * sr;
  m(1, 0) = sy * cp;
  m(1, 1) = sy * sp * sr + cy * cr;
  m(1, 2) = sy * sp * cr - cy * sr;
  m(2, 0) = -sp;
  m(2, 1) = cp * sr;
  m(2, 2) = cp * cr;
  return m;
}

bool is_identity_rot(const Mat3<double>& r) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (std::abs(r(i, j) - (i == j ? 1.0 : 0.0)) > 1e-15) return false;
  return true;
}

Transform<double> placement_of(const json& j) {
  Transform<double> x;
  if (j.contains("translation")) {
    x.p = vec3_of(j["translation"]);
    x.ttag = trans_tag_of(x.p);
  }
  if (j.contains("rotation")) {
    const auto& r = j["rotation"];
    if (!r.is_array() || r.size() != 3)
      throw Error(ErrorCode::InvalidArgument, "rotation must be 3 rows");
    for (int i = 0; i < 3; ++i)
      for (int c = 0; c < 3; ++c) x.R(i, c) = r[i][c].get<double>();
    x.rtag = is_identity_rot(x.R) ? RotTag::Identity : RotTag::General;
  } else if (j.contains("rpy")) {
    const auto v = vec3_of(j["rpy"]);
    x.R = rpy_to_rot(v.x, v.y, v.z);
    x.rtag = is_identity_rot(x.R) ? RotTag::Identity : RotTag::General;
  }
  return x;
}

JointModel joint_of(const json& j) {
  const std::string type = j.value("type", "revolute");
  if (type == "revolute")
    return JointModel::revolute(j.contains("axis") ? vec3_of(j["axis"])
                                                   : Vec3<double>{0, 0, 1});
  if (type == "prismatic")
    return JointModel::prismatic(j.contains("axis") ? vec3_of(j["axis"])
                                                    : Vec3<double>{0, 0, 1});
  if (type == "spherical") return JointModel::spherical();
  if (type == "free_flyer" || type == "floating")
    return JointModel::free_flyer();
  throw Error(ErrorCode::UnsupportedJointType, "joint type '" + type + "'");
}

}  // namespace

std::pair<KinematicTree, ConstraintSet> load_model_json(
    const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidArgument,
                std::string("model JSON: ") + e.what());
  }
  if (!doc.contains("links") || !doc["links"].is_array())
    throw Error(ErrorCode::InvalidArgument, "model JSON needs a links array");

  KinematicTree tree;
  for (const auto& lj : doc["links"]) {
    KinematicTree::Link l;
    l.name = lj.value("name", "link" + std::to_string(tree.n_links() + 1));
    l.parent = lj.value("parent", tree.n_links());
    if (lj.contains("joint")) l.joint = joint_of(lj["joint"]);
    if (lj.contains("placement")) l.placement = placement_of(lj["placement"]);
    l.inertia.mass = 1.0;
    if (lj.contains("inertia")) {
      const auto& ij = lj["inertia"];
      l.inertia.mass = ij.value("mass", 1.0);
      if (ij.contains("com")) l.inertia.com = vec3_of(ij["com"]);
      if (ij.contains("moments")) {
        const auto& mm = ij["moments"];
        if (!mm.is_array() || mm.size() != 6)
          throw Error(ErrorCode::InvalidArgument,
                      "moments must be [ixx, iyy, izz, ixy, ixz, iyz]");
        l.inertia.rot_inertia(0, 0) = mm[0].get<double>();
        l.inertia.rot_inertia(1, 1) = mm[1].get<double>();
        l.inertia.rot_inertia(2, 2) = mm[2].get<double>();
        l.inertia.rot_inertia(0, 1) = l.inertia.rot_inertia(1, 0) =
            mm[3].get<double>();
        l.inertia.rot_inertia(0, 2) = l.inertia.rot_inertia(2, 0) =
            mm[4].get<double>();
        l.inertia.rot_inertia(1, 2) = l.inertia.rot_inertia(2, 1) =
            mm[5].get<double>();
      }
    }
    tree.add_link(std::move(l));
  }

  ConstraintSet cons;
  if (doc.contains("constraints")) {
    for (const auto& cj : doc["constraints"]) {
      const int link = cj.at("link").get<int>();
      const std::string type = cj.value("type", "weld");
      if (type == "weld") {
        cons = attach_constraint(std::move(cons), tree, link,
                                 ConstraintKind::Weld);
      } else if (type == "connect") {
        cons = attach_constraint(std::move(cons), tree, link,
                                 ConstraintKind::Connect);
      } else if (type == "custom") {
        const auto& kj = cj.at("K");
        MatX<double> k(static_cast<int>(kj.size()), 6);
        for (int r = 0; r < k.rows(); ++r)
          for (int c = 0; c < 6; ++c) k(r, c) = kj[r][c].get<double>();
        cons = attach_constraint(std::move(cons), tree, link,
                                 ConstraintKind::Custom, &k);
      } else {
        throw Error(ErrorCode::InvalidArgument,
                    "unknown constraint type '" + type + "'");
      }
    }
  }
  return {std::move(tree), std::move(cons)};
}

std::pair<KinematicTree, ConstraintSet> load_model_json_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_model_json(ss.str());
}

std::string save_model_json(const KinematicTree& tree,
                            const ConstraintSet& cons) {
  json doc;
  doc["links"] = json::array();
  for (int i = 1; i <= tree.n_links(); ++i) {
    const auto& l = tree.link(i);
    json lj;
    lj["name"] = l.name;
    lj["parent"] = l.parent;
    json jj;
    jj["type"] = joint_kind_name(l.joint.kind);
    if (l.joint.kind == JointKind::Revolute ||
        l.joint.kind == JointKind::Prismatic)
      jj["axis"] = {l.joint.axis.x, l.joint.axis.y, l.joint.axis.z};
    lj["joint"] = jj;
    json pj;
    pj["translation"] = {l.placement.p.x, l.placement.p.y, l.placement.p.z};
    pj["rotation"] = json::array();
    for (int r = 0; r < 3; ++r)
      pj["rotation"].push_back({l.placement.R(r, 0), l.placement.R(r, 1),
                                l.placement.R(r, 2)});
    lj["placement"] = pj;
    json ij;
    ij["mass"] = l.inertia.mass;
    ij["com"] = {l.inertia.com.x, l.inertia.com.y, l.inertia.com.z};
    ij["moments"] = {l.inertia.rot_inertia(0, 0), l.inertia.rot_inertia(1, 1),
                     l.inertia.rot_inertia(2, 2), l.inertia.rot_inertia(0, 1),
                     l.inertia.rot_inertia(0, 2), l.inertia.rot_inertia(1, 2)};
    lj["inertia"] = ij;
    doc["links"].push_back(lj);
  }
  doc["constraints"] = json::array();
  for (int e = 0; e < cons.size(); ++e) {
    const auto& c = cons[e];
    json cj;
    cj["link"] = c.link;
    switch (c.kind) {
      case ConstraintKind::Weld:
        cj["type"] = "weld";
        break;
      case ConstraintKind::Connect:
        cj["type"] = "connect";
        break;
      default: {
        cj["type"] = "custom";
        cj["K"] = json::array();
        for (int r = 0; r < c.K.rows(); ++r) {
          json row = json::array();
          for (int col = 0; col < 6; ++col) row.push_back(c.K(r, col));
          cj["K"].push_back(row);
        }
      }
    }
    doc["constraints"].push_back(cj);
  }
  return doc.dump(2);
}

}  // namespace delassus
