#include "delassus/urdf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

namespace delassus {

namespace {

namespace pt = boost::property_tree;

Vec3<double> parse_triplet(const std::string& s, const char* what) {
  std::istringstream is(s);
  Vec3<double> v;
  if (!(is >> v.x >> v.y >> v.z))
    throw Error(ErrorCode::MalformedXml,
                std::string("cannot parse ") + what + " '" + s + "'");
  return v;
}

TransTag trans_tag_of(const Vec3<double>& p) {
  const bool x = p.x != 0.0, y = p.y != 0.0, z = p.z != 0.0;
  if (!x && !y && !z) return TransTag::Zero;
  if (x && !y && !z) return TransTag::AxisX;
  if (!x && y && !z) return TransTag::AxisY;
  if (!x && !y && z) return TransTag::AxisZ;
  return TransTag::General;
}

Transform<double> parse_origin(const pt::ptree& node) {
  Transform<double> x;
  if (auto xyz = node.get_optional<std::string>("<xmlattr>.xyz")) {
    x.p = parse_triplet(*xyz, "origin xyz");
    x.ttag = trans_tag_of(x.p);
  }
  if (auto rpy = node.get_optional<std::string>("<xmlattr>.rpy")) {
    const Vec3<double> v = parse_triplet(*rpy, "origin rpy");
    if (v.x != 0.0 || v.y != 0.0 || v.z != 0.0) {
      const double cr = std::cos(v.x), sr = std::sin(v.x);
      const double cp = std::cos(v.y), sp = std::sin(v.y);
      const double cy = std::cos(v.z), sy = std::sin(v.z);
      x.R(0, 0) = cy * cp;
      x.R(0, 1) = cy * sp * sr - sy * cr;
      x.R(0, 2) = cy * sp * cr + sy * sr;
      x.R(1, 0) = sy * cp;
      x.R(1, 1) = sy * sp * sr + cy * cr;
      x.R(1, 2) = sy * sp * cr - cy * sr;
      x.R(2, 0) = -sp;
      x.R(2, 1) = cp * sr;
      x.R(2, 2) = cp * cr;
      x.rtag = RotTag::General;
    }
  }
  return x;
}

}  // namespace

UrdfDocument parse_urdf(const std::string& xml_text) {
  pt::ptree root;
  try {
    std::istringstream is(xml_text);
    pt::read_xml(is, root);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorCode::MalformedXml, e.what());
  }
  auto robot = root.get_child_optional("robot");
  if (!robot)
    throw Error(ErrorCode::MalformedXml, "missing <robot> root element");

  UrdfDocument doc;
  for (const auto& [tag, node] : *robot) {
    if (tag == "link") {
      UrdfDocument::Link l;
      l.name = node.get<std::string>("<xmlattr>.name", "");
      if (l.name.empty())
        throw Error(ErrorCode::MalformedXml, "link without a name");
      if (auto inertial = node.get_child_optional("inertial")) {
        l.inertial.present = true;
        l.inertial.mass =
            inertial->get<double>("mass.<xmlattr>.value", 0.0);
        if (auto origin = inertial->get_child_optional("origin"))
          l.inertial.origin = parse_origin(*origin);
        if (auto in = inertial->get_child_optional("inertia")) {
          auto g = [&](const char* a) {
            return in->get<double>(std::string("<xmlattr>.") + a, 0.0);
          };
          l.inertial.inertia(0, 0) = g("ixx");
          l.inertial.inertia(1, 1) = g("iyy");
          l.inertial.inertia(2, 2) = g("izz");
          l.inertial.inertia(0, 1) = l.inertial.inertia(1, 0) = g("ixy");
          l.inertial.inertia(0, 2) = l.inertial.inertia(2, 0) = g("ixz");
          l.inertial.inertia(1, 2) = l.inertial.inertia(2, 1) = g("iyz");
        }
      }
      for (const auto& [sub, subnode] : node) {
        (void)subnode;
        if (sub == "visual" || sub == "collision")
          doc.warnings.push_back("ignored <" + sub + "> on link " + l.name);
      }
      doc.links.push_back(std::move(l));
    } else if (tag == "joint") {
      UrdfDocument::Joint j;
      j.name = node.get<std::string>("<xmlattr>.name", "");
      j.type = node.get<std::string>("<xmlattr>.type", "");
      j.parent = node.get<std::string>("parent.<xmlattr>.link", "");
      j.child = node.get<std::string>("child.<xmlattr>.link", "");
      if (j.parent.empty() || j.child.empty())
        throw Error(ErrorCode::MalformedXml,
                    "joint '" + j.name + "' without parent/child");
      if (j.type != "revolute" && j.type != "continuous" &&
          j.type != "prismatic" && j.type != "fixed" && j.type != "floating")
        throw Error(ErrorCode::UnsupportedJointType,
                    "joint '" + j.name + "' of type '" + j.type + "'");
      if (auto origin = node.get_child_optional("origin"))
        j.origin = parse_origin(*origin);
      if (auto axis = node.get_optional<std::string>("axis.<xmlattr>.xyz"))
        j.axis = parse_triplet(*axis, "joint axis");
      for (const auto& [sub, subnode] : node) {
        (void)subnode;
        if (sub == "mimic" || sub == "dynamics" || sub == "limit" ||
            sub == "safety_controller" || sub == "calibration")
          doc.warnings.push_back("ignored <" + sub + "> on joint " + j.name);
      }
      doc.joints.push_back(std::move(j));
    } else if (tag == "transmission" || tag == "gazebo" || tag == "material") {
      doc.warnings.push_back("ignored <" + tag + "> element");
    }
  }

  if (doc.links.empty())
    throw Error(ErrorCode::MalformedXml, "URDF defines no links");

  // Root detection and tree checks.
  std::map<std::string, int> by_name;
  for (std::size_t i = 0; i < doc.links.size(); ++i) {
    if (by_name.count(doc.links[i].name))
      throw Error(ErrorCode::MalformedXml,
                  "duplicate link name '" + doc.links[i].name + "'");
    by_name[doc.links[i].name] = static_cast<int>(i);
  }
  std::map<std::string, int> child_count;
  for (const auto& j : doc.joints) {
    if (!by_name.count(j.parent))
      throw Error(ErrorCode::MalformedXml,
                  "joint '" + j.name + "' references unknown link '" +
                      j.parent + "'");
    if (!by_name.count(j.child))
      throw Error(ErrorCode::MalformedXml,
                  "joint '" + j.name + "' references unknown link '" +
                      j.child + "'");
    if (++child_count[j.child] > 1)
      throw Error(ErrorCode::CyclicJointGraph,
                  "link '" + j.child + "' has multiple parent joints");
  }
  std::vector<std::string> roots;
  for (const auto& l : doc.links)
    if (!child_count.count(l.name)) roots.push_back(l.name);
  if (roots.empty())
    throw Error(ErrorCode::CyclicJointGraph, "joint graph has no root");
  if (roots.size() > 1) {
    std::string list;
    for (const auto& r : roots) list += " " + r;
    throw Error(ErrorCode::MultipleRoots, "root candidates:" + list);
  }
  doc.root = roots.front();

  // A connected tree has exactly links - 1 joints; fewer roots with equal
  // joint count means a cycle among the remaining links.
  if (doc.joints.size() != doc.links.size() - 1)
    throw Error(ErrorCode::CyclicJointGraph,
                "joint graph is not a tree (" +
                    std::to_string(doc.joints.size()) + " joints for " +
                    std::to_string(doc.links.size()) + " links)");
  return doc;
}

namespace {

struct NodeInertia {
  double mass = 0.0;
  Vec3<double> com;
  Mat3<double> about_com;
};

NodeInertia inertia_of(const UrdfDocument::Inertial& in) {
  NodeInertia ni;
  if (!in.present) return ni;
  ni.mass = in.mass;
  // URDF gives the tensor about the inertial-origin frame, aligned with it.
  // Express about the CoM in the link frame: rotate, CoM is the origin
  // position.
  ni.com = in.origin.p;
  const Mat3<double>& r = in.origin.R;
  ni.about_com = r * in.inertia * r.transposed();
  return ni;
}

// a += b where b's frame is placed at x in a's frame.
void merge_inertia(NodeInertia& a, const NodeInertia& b,
                   const Transform<double>& x) {
  if (b.mass == 0.0) return;
  const Vec3<double> bcom = x.R * b.com + x.p;
  const Mat3<double> brot = x.R * b.about_com * x.R.transposed();
  const double total = a.mass + b.mass;
  const Vec3<double> com{(a.com.x * a.mass + bcom.x * b.mass) / total,
                         (a.com.y * a.mass + bcom.y * b.mass) / total,
                         (a.com.z * a.mass + bcom.z * b.mass) / total};
  auto shift = [](const Mat3<double>& i, double m, const Vec3<double>& d) {
    // Parallel axis: inertia about a point displaced by d from the CoM.
    Mat3<double> out = i;
    const double d2 = d.x * d.x + d.y * d.y + d.z * d.z;
    out(0, 0) += m * (d2 - d.x * d.x);
    out(1, 1) += m * (d2 - d.y * d.y);
    out(2, 2) += m * (d2 - d.z * d.z);
    out(0, 1) -= m * d.x * d.y;
    out(1, 0) -= m * d.x * d.y;
    out(0, 2) -= m * d.x * d.z;
    out(2, 0) -= m * d.x * d.z;
    out(1, 2) -= m * d.y * d.z;
    out(2, 1) -= m * d.y * d.z;
    return out;
  };
  Mat3<double> ia = shift(a.about_com, a.mass, a.com - com);
  Mat3<double> ib = shift(brot, b.mass, bcom - com);
  NodeInertia merged;
  merged.mass = total;
  merged.com = com;
  merged.about_com = ia;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) merged.about_com(i, j) += ib(i, j);
  a = merged;
}

RotTag rot_tag_of(const Mat3<double>& r) {
  bool ident = true;
  for (int i = 0; i < 3 && ident; ++i)
    for (int j = 0; j < 3 && ident; ++j)
      if (std::abs(r(i, j) - (i == j ? 1.0 : 0.0)) > 1e-15) ident = false;
  return ident ? RotTag::Identity : RotTag::General;
}

}  // namespace

UrdfModel to_tree(const UrdfDocument& doc, BaseKind base) {
  std::map<std::string, int> by_name;
  for (std::size_t i = 0; i < doc.links.size(); ++i)
    by_name[doc.links[i].name] = static_cast<int>(i);

  std::map<std::string, std::vector<const UrdfDocument::Joint*>> kids;
  for (const auto& j : doc.joints) kids[j.parent].push_back(&j);

  UrdfModel out;
  struct Pending {
    std::string link_name;
    const UrdfDocument::Joint* joint;  // null for the root
    int tree_parent;                   // tree index, 0 for world
    Transform<double> extra;           // composition of merged fixed joints
  };
  std::vector<Pending> queue;
  queue.push_back({doc.root, nullptr, 0, Transform<double>::identity()});

  // Mutable movable-link records so fixed children can fold in later.
  struct Movable {
    KinematicTree::Link link;
    int tree_index = 0;
    NodeInertia inertia;
  };
  std::vector<Movable> movable;
  std::map<std::string, std::size_t> movable_of_name;
  // Fixed-base root: its inertia is welded to the world and drops out.
  bool root_welded = base == BaseKind::Fixed;

  while (!queue.empty()) {
    Pending cur = queue.front();
    queue.erase(queue.begin());
    const auto& url = doc.links[by_name.at(cur.link_name)];
    const NodeInertia ni = inertia_of(url.inertial);

    const bool is_root = cur.joint == nullptr;
    const bool fixed_here = !is_root && cur.joint->type == "fixed";
    const bool welded_root = is_root && root_welded;

    if (fixed_here || welded_root) {
      // Merge into the owning movable link (or drop for a welded root).
      const Transform<double> place =
          fixed_here ? compose(cur.extra, cur.joint->origin) : cur.extra;
      if (fixed_here && cur.tree_parent > 0) {
        for (auto& mv : movable)
          if (mv.tree_index == cur.tree_parent) {
            merge_inertia(mv.inertia, ni, place);
            break;
          }
      }
      out.link_index[cur.link_name] = cur.tree_parent;
      for (const auto* j : kids.count(cur.link_name)
                               ? kids.at(cur.link_name)
                               : std::vector<const UrdfDocument::Joint*>{})
        queue.push_back({j->child, j, cur.tree_parent, place});
      continue;
    }

    // Movable link (or floating root).
    Movable mv;
    mv.link.name = cur.link_name;
    mv.link.parent = cur.tree_parent;
    if (is_root) {
      mv.link.joint = JointModel::free_flyer();
      mv.link.placement = Transform<double>::identity();
    } else {
      const std::string& t = cur.joint->type;
      if (t == "revolute" || t == "continuous") {
        Vec3<double> a = cur.joint->axis;
        const double n =
            std::sqrt(a.x * a.x + a.y * a.y + a.z * a.z);
        if (n < 1e-12)
          throw Error(ErrorCode::BadAxis,
                      "joint '" + cur.joint->name + "' has a zero axis");
        mv.link.joint = JointModel::revolute({a.x / n, a.y / n, a.z / n});
      } else if (t == "prismatic") {
        Vec3<double> a = cur.joint->axis;
        const double n =
            std::sqrt(a.x * a.x + a.y * a.y + a.z * a.z);
        if (n < 1e-12)
          throw Error(ErrorCode::BadAxis,
                      "joint '" + cur.joint->name + "' has a zero axis");
        mv.link.joint = JointModel::prismatic({a.x / n, a.y / n, a.z / n});
      } else if (t == "floating") {
        mv.link.joint = JointModel::free_flyer();
      }
      mv.link.placement = compose(cur.extra, cur.joint->origin);
    }
    mv.link.placement.rtag = rot_tag_of(mv.link.placement.R);
    mv.link.placement.ttag = trans_tag_of(mv.link.placement.p);
    mv.inertia = ni;
    mv.tree_index = static_cast<int>(movable.size()) + 1;
    out.link_index[cur.link_name] = mv.tree_index;
    movable_of_name[cur.link_name] = movable.size();
    const int parent_index = mv.tree_index;
    movable.push_back(std::move(mv));
    for (const auto* j : kids.count(cur.link_name)
                             ? kids.at(cur.link_name)
                             : std::vector<const UrdfDocument::Joint*>{})
      queue.push_back({j->child, j, parent_index,
                       Transform<double>::identity()});
  }

  for (auto& mv : movable) {
    if (!(mv.inertia.mass > 0.0))
      throw Error(ErrorCode::NonPositiveMass,
                  "link '" + mv.link.name + "' has no positive mass after "
                  "fixed-joint merging");
    mv.link.inertia.mass = mv.inertia.mass;
    mv.link.inertia.com = mv.inertia.com;
    mv.link.inertia.rot_inertia = mv.inertia.about_com;
    out.tree.add_link(std::move(mv.link));
  }
  if (out.tree.n_links() == 0)
    throw Error(ErrorCode::NonPositiveMass,
                "model has no movable links (all fixed to the world)");
  return out;
}

UrdfModel load_urdf_file(const std::string& path, BaseKind base) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return to_tree(parse_urdf(ss.str()), base);
}

}  // namespace delassus
