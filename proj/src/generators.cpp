#include "delassus/generators.hpp"

#include <cmath>
#include <random>
#include <string>

namespace delassus {

SpatialInertia<double> default_link_inertia() {
  SpatialInertia<double> in;
  in.mass = 1.0;
  in.com = {0.5, 0.0, 0.0};
  // Box 1.0 x 0.1 x 0.1 about the CoM.
  const double a = 1.0, b = 0.1, c = 0.1;
  in.rot_inertia(0, 0) = in.mass * (b * b + c * c) / 12.0;
  in.rot_inertia(1, 1) = in.mass * (a * a + c * c) / 12.0;
  in.rot_inertia(2, 2) = in.mass * (a * a + b * b) / 12.0;
  return in;
}

namespace {

TransTag axis_tag(const Vec3<double>& p) {
  const bool x = p.x != 0.0, y = p.y != 0.0, z = p.z != 0.0;
  if (!x && !y && !z) return TransTag::Zero;
  if (x && !y && !z) return TransTag::AxisX;
  if (!x && y && !z) return TransTag::AxisY;
  if (!x && !y && z) return TransTag::AxisZ;
  return TransTag::General;
}

Transform<double> translation(const Vec3<double>& p) {
  Transform<double> t;
  t.p = p;
  t.ttag = axis_tag(p);
  return t;
}

KinematicTree::Link make_link(const std::string& name, int parent,
                              const JointModel& joint,
                              const Transform<double>& placement) {
  KinematicTree::Link l;
  l.name = name;
  l.parent = parent;
  l.joint = joint;
  l.placement = placement;
  l.inertia = default_link_inertia();
  return l;
}

}  // namespace

KinematicTree gen_chain(int n, const JointModel& joint, BaseKind base) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "chain needs n >= 1");
  KinematicTree tree;
  for (int i = 1; i <= n; ++i) {
    const JointModel j = (i == 1 && base == BaseKind::Floating)
                             ? JointModel::free_flyer()
                             : joint;
    const Transform<double> x =
        i == 1 ? Transform<double>::identity() : translation({1.0, 0.0, 0.0});
    tree.add_link(make_link("link" + std::to_string(i), i - 1, j, x));
  }
  return tree;
}

std::pair<KinematicTree, ConstraintSet> gen_stem_branches(
    int stem_len, int branches_per_side, int branch_len) {
  if (branches_per_side < 1)
    throw Error(ErrorCode::InvalidGeometry,
                "need at least one branch per side");
  if (stem_len < branches_per_side)
    throw Error(ErrorCode::InvalidGeometry,
                "stem of " + std::to_string(stem_len) +
                    " links cannot host " + std::to_string(branches_per_side) +
                    " branches per side");
  if (branch_len < 1)
    throw Error(ErrorCode::InvalidGeometry, "branches need at least one link");

  KinematicTree tree;
  const JointModel rev = JointModel::revolute({0.0, 0.0, 1.0});
  for (int i = 1; i <= stem_len; ++i) {
    const JointModel j =
        i == 1 ? JointModel::free_flyer() : rev;
    const Transform<double> x =
        i == 1 ? Transform<double>::identity() : translation({1.0, 0.0, 0.0});
    tree.add_link(make_link("stem" + std::to_string(i), i - 1, j, x));
  }

  // Attachment stem links: evenly spread, ties broken toward the root.
  const int nbranch = 2 * branches_per_side;
  std::vector<int> attach(nbranch);
  if (nbranch == 1) {
    attach[0] = stem_len;
  } else {
    for (int b = 0; b < nbranch; ++b)
      attach[b] = 1 + static_cast<int>((static_cast<long long>(b) *
                                        (stem_len - 1)) /
                                       (nbranch - 1));
  }

  ConstraintSet cons;
  for (int b = 0; b < nbranch; ++b) {
    const double side = (b % 2 == 0) ? 1.0 : -1.0;
    int parent = attach[b];
    for (int k = 1; k <= branch_len; ++k) {
      const Transform<double> x = translation({0.0, side * 1.0, 0.0});
      parent = tree.add_link(make_link("branch" + std::to_string(b + 1) + "_" +
                                           std::to_string(k),
                                       parent, rev, x));
    }
    cons = attach_constraint(std::move(cons), tree, parent,
                             ConstraintKind::Weld);
  }
  return {std::move(tree), std::move(cons)};
}

std::pair<KinematicTree, ConstraintSet> gen_fig1() {
  KinematicTree tree;
  const Vec3<double> az{0.0, 0.0, 1.0};
  const Vec3<double> ay{0.0, 1.0, 0.0};
  // 1 <- 2 <- {3, 6}; 3 <- 4 <- 5. Constraints on 6, 3 and 5.
  tree.add_link(make_link("link1", 0, JointModel::revolute(az),
                          Transform<double>::identity()));
  tree.add_link(make_link("link2", 1, JointModel::revolute(ay),
                          translation({1.0, 0.0, 0.0})));
  tree.add_link(make_link("link3", 2, JointModel::revolute(az),
                          translation({1.0, 0.0, 0.0})));
  tree.add_link(make_link("link4", 3, JointModel::revolute(ay),
                          translation({1.0, 0.0, 0.0})));
  tree.add_link(make_link("link5", 4, JointModel::revolute(az),
                          translation({1.0, 0.0, 0.0})));
  tree.add_link(make_link("link6", 2, JointModel::revolute(az),
                          translation({0.0, 1.0, 0.0})));
  ConstraintSet cons;
  cons = attach_constraint(std::move(cons), tree, 6, ConstraintKind::Weld);
  cons = attach_constraint(std::move(cons), tree, 3, ConstraintKind::Connect);
  cons = attach_constraint(std::move(cons), tree, 5, ConstraintKind::Weld);
  return {std::move(tree), std::move(cons)};
}

namespace {

MatX<double> point_contact_k(const Vec3<double>& r) {
  // Linear acceleration of the body-fixed point r: v + omega x r,
  // so K = [-skew(r) | I3].
  MatX<double> k(3, 6);
  k(0, 1) = r.z;
  k(0, 2) = -r.y;
  k(1, 0) = -r.z;
  k(1, 2) = r.x;
  k(2, 0) = r.y;
  k(2, 1) = -r.x;
  k(0, 3) = 1.0;
  k(1, 4) = 1.0;
  k(2, 5) = 1.0;
  return k;
}

}  // namespace

std::pair<KinematicTree, ConstraintSet> gen_humanoid() {
  KinematicTree tree;
  const Vec3<double> ax{1.0, 0.0, 0.0}, ay{0.0, 1.0, 0.0}, az{0.0, 0.0, 1.0};
  auto rev = [](const Vec3<double>& a) { return JointModel::revolute(a); };

  const int pelvis = tree.add_link(make_link(
      "pelvis", 0, JointModel::free_flyer(), Transform<double>::identity()));

  // Torso and head.
  int up = pelvis;
  const Vec3<double> axes[3] = {az, ay, ax};
  for (int i = 0; i < 3; ++i)
    up = tree.add_link(make_link("torso" + std::to_string(i + 1), up,
                                 rev(axes[i % 3]),
                                 translation({0.0, 0.0, 0.3})));
  const int chest = up;
  int head = chest;
  for (int i = 0; i < 2; ++i)
    head = tree.add_link(make_link("head" + std::to_string(i + 1), head,
                                   rev(i == 0 ? az : ay),
                                   translation({0.0, 0.0, 0.2})));

  // Arms from the chest.
  for (int side = 0; side < 2; ++side) {
    const double s = side == 0 ? 1.0 : -1.0;
    int a = chest;
    for (int i = 0; i < 5; ++i) {
      const Vec3<double> axis = (i % 3 == 0) ? ax : (i % 3 == 1 ? ay : az);
      a = tree.add_link(
          make_link((side == 0 ? "left_arm" : "right_arm") +
                        std::to_string(i + 1),
                    a, rev(axis),
                    translation(i == 0 ? Vec3<double>{0.0, s * 0.3, 0.0}
                                       : Vec3<double>{0.0, s * 0.25, 0.0})));
    }
  }

  // Legs from the pelvis; feet are the sixth leg links.
  ConstraintSet cons;
  for (int side = 0; side < 2; ++side) {
    const double s = side == 0 ? 1.0 : -1.0;
    int a = pelvis;
    for (int i = 0; i < 6; ++i) {
      const Vec3<double> axis = (i % 3 == 0) ? ax : (i % 3 == 1 ? ay : az);
      const Vec3<double> step = i == 0 ? Vec3<double>{0.0, s * 0.15, -0.1}
                                       : Vec3<double>{0.0, 0.0, -0.35};
      a = tree.add_link(make_link(
          (side == 0 ? "left_leg" : "right_leg") + std::to_string(i + 1), a,
          rev(axis), translation(step)));
    }
    // Four contact corners under the foot.
    for (double cx : {0.12, -0.08})
      for (double cy : {0.05, -0.05}) {
        const MatX<double> k = point_contact_k({cx, s * cy, -0.05});
        cons = attach_constraint(std::move(cons), tree, a,
                                 ConstraintKind::Custom, &k);
      }
  }
  return {std::move(tree), std::move(cons)};
}

namespace {

double runif(std::mt19937_64& g, double lo, double hi) {
  const double u = static_cast<double>(g() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

Mat3<double> random_rotation(std::mt19937_64& g) {
  // Axis-angle with a random unit axis.
  double x = runif(g, -1, 1), y = runif(g, -1, 1), z = runif(g, -1, 1);
  double n = std::sqrt(x * x + y * y + z * z);
  if (n < 1e-6) {
    x = 1;
    y = z = 0;
    n = 1;
  }
  x /= n;
  y /= n;
  z /= n;
  const double th = runif(g, -3.14159, 3.14159);
  const double c = std::cos(th), s = std::sin(th), v = 1.0 - c;
  Mat3<double> r;
  r(0, 0) = c + v * x * x;
  r(0, 1) = v * x * y - s * z;
  r(0, 2) = v * x * z + s * y;
  r(1, 0) = v * x * y + s * z;
  r(1, 1) = c + v * y * y;
  r(1, 2) = v * y * z - s * x;
  r(2, 0) = v * x * z - s * y;
  r(2, 1) = v * y * z + s * x;
  r(2, 2) = c + v * z * z;
  return r;
}

}  // namespace

std::pair<KinematicTree, ConstraintSet> gen_random_model(std::uint64_t seed) {
  std::mt19937_64 g(seed);
  const int nb = 3 + static_cast<int>(g() % 38);  // 3..40
  KinematicTree tree;
  for (int i = 1; i <= nb; ++i) {
    KinematicTree::Link l;
    l.name = "link" + std::to_string(i);
    l.parent = i == 1 ? 0 : 1 + static_cast<int>(g() % (i - 1));
    auto random_axis = [&g]() {
      double x = 1, y = 0, z = 0, n = 1;
      do {
        x = runif(g, -1, 1);
        y = runif(g, -1, 1);
        z = runif(g, -1, 1);
        n = std::sqrt(x * x + y * y + z * z);
      } while (n < 0.1);
      return Vec3<double>{x / n, y / n, z / n};
    };
    const int jk = static_cast<int>(g() % 10);
    if (i == 1 && jk < 4) {
      l.joint = JointModel::free_flyer();
    } else if (jk < 5) {
      l.joint = JointModel::revolute(random_axis());
    } else if (jk < 7) {
      l.joint = JointModel::prismatic(random_axis());
    } else if (jk < 9) {
      l.joint = JointModel::spherical();
    } else {
      l.joint = JointModel::free_flyer();
    }
    l.placement.R = random_rotation(g);
    l.placement.rtag = RotTag::General;
    l.placement.p = {runif(g, -1, 1), runif(g, -1, 1), runif(g, -1, 1)};
    l.placement.ttag = TransTag::General;
    l.inertia.mass = runif(g, 0.8, 2.0);
    l.inertia.com = {runif(g, -0.3, 0.3), runif(g, -0.3, 0.3),
                     runif(g, -0.3, 0.3)};
    // SPD rotational inertia: A A^T + eps I.
    Mat3<double> a;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) a(r, c) = runif(g, -0.4, 0.4);
    Mat3<double> spd = a * a.transposed();
    for (int r = 0; r < 3; ++r) spd(r, r) += 0.05;
    l.inertia.rot_inertia = spd;
    tree.add_link(std::move(l));
  }

  const int ncons = 1 + static_cast<int>(g() % 6);
  std::vector<int> candidates(nb);
  for (int i = 0; i < nb; ++i) candidates[i] = i + 1;
  // Partial shuffle for distinct constrained links.
  for (int i = 0; i < ncons && i < nb; ++i) {
    const int j = i + static_cast<int>(g() % (nb - i));
    std::swap(candidates[i], candidates[j]);
  }
  ConstraintSet cons;
  for (int i = 0; i < ncons && i < nb; ++i) {
    const ConstraintKind kind =
        (g() % 2 == 0) ? ConstraintKind::Weld : ConstraintKind::Connect;
    cons = attach_constraint(std::move(cons), tree, candidates[i], kind);
  }
  return {std::move(tree), std::move(cons)};
}

std::pair<KinematicTree, ConstraintSet> gen_chain_md(int k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "chain_md needs k >= 1");
  KinematicTree tree =
      gen_chain(k * k, JointModel::revolute({0.0, 0.0, 1.0}), BaseKind::Fixed);
  ConstraintSet cons;
  for (int j = k; j <= k * k; j += k)
    cons = attach_constraint(std::move(cons), tree, j, ConstraintKind::Weld);
  return {std::move(tree), std::move(cons)};
}

std::pair<KinematicTree, ConstraintSet> gen_chain_all_constrained(int n) {
  KinematicTree tree =
      gen_chain(n, JointModel::revolute({0.0, 0.0, 1.0}), BaseKind::Fixed);
  ConstraintSet cons;
  for (int j = 1; j <= n; ++j)
    cons = attach_constraint(std::move(cons), tree, j, ConstraintKind::Weld);
  return {std::move(tree), std::move(cons)};
}

}  // namespace delassus
