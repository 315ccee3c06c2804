#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "delassus/error.hpp"
#include "delassus/linalg.hpp"
#include "delassus/spatial.hpp"

namespace delassus {

enum class JointKind : std::uint8_t {
  Revolute,
  Prismatic,
  Spherical,
  FreeFlyer,
  Fixed,  // transient, merged away before algorithm use
};

struct JointModel {
  JointKind kind = JointKind::Revolute;
  Vec3<double> axis{0.0, 0.0, 1.0};  // revolute/prismatic only, unit norm

  static JointModel revolute(const Vec3<double>& a) {
    return {JointKind::Revolute, a};
  }
  static JointModel prismatic(const Vec3<double>& a) {
    return {JointKind::Prismatic, a};
  }
  static JointModel spherical() { return {JointKind::Spherical, {}}; }
  static JointModel free_flyer() { return {JointKind::FreeFlyer, {}}; }
  static JointModel fixed() { return {JointKind::Fixed, {}}; }

  int dof() const {
    switch (kind) {
      case JointKind::Revolute:
      case JointKind::Prismatic:
        return 1;
      case JointKind::Spherical:
        return 3;
      case JointKind::FreeFlyer:
        return 6;
      default:
        return 0;
    }
  }

  /// Generalized-position size: quaternions for spherical/free-flyer.
  int nq() const {
    switch (kind) {
      case JointKind::Spherical:
        return 4;
      case JointKind::FreeFlyer:
        return 7;
      default:
        return dof();
    }
  }
};

const char* joint_kind_name(JointKind k);

/// Kinematic tree. Links are indexed 1..n_links(); index 0 is the fixed
/// world. parent[i] < i for every link, so ascending index order is a
/// root-to-leaves topological order. Arrays are 0-based internally; link i
/// lives at array slot i-1.
class KinematicTree {
 public:
  struct Link {
    std::string name;
    int parent = 0;  // link index, 0 = world
    JointModel joint;
    Transform<double> placement;  // joint frame in the parent frame
    SpatialInertia<double> inertia;
  };

  int n_links() const { return static_cast<int>(links_.size()); }
  int n_dof() const { return n_dof_; }

  const Link& link(int i) const { return links_[i - 1]; }
  int parent(int i) const { return links_[i - 1].parent; }
  const std::vector<int>& children(int i) const { return children_[i]; }

  /// First DoF index (0-based, into q-dot space) of link i's joint.
  int dof_offset(int i) const { return dof_offset_[i - 1]; }
  /// First generalized-position index of link i's joint.
  int q_offset(int i) const { return q_offset_[i - 1]; }
  int n_q() const { return n_q_; }

  int add_link(Link l);
  /// Rebuilds children lists and DoF/position offsets. Called by add_link;
  /// cheap enough to keep models always consistent.
  void refresh();

  const std::vector<Link>& links() const { return links_; }
  Link& mutable_link(int i) { return links_[i - 1]; }

  /// Depth of link i (root links have depth 1).
  int depth(int i) const;
  int max_depth() const;

 private:
  std::vector<Link> links_;
  std::vector<std::vector<int>> children_;  // children_[0] = roots
  std::vector<int> dof_offset_, q_offset_;
  int n_dof_ = 0, n_q_ = 0;
};

struct ValidationIssue {
  ErrorCode code;
  int link;  // offending link, 0 if not link specific
  std::string message;
};

/// Checks topological ordering, positive masses and unit joint axes.
/// Returns the first violation found, or nullopt for a valid tree.
std::optional<ValidationIssue> validate(const KinematicTree& tree);

/// Throws Error if the tree is invalid.
void validate_or_throw(const KinematicTree& tree);

enum class ConstraintKind : std::uint8_t { Weld, Connect, Custom };

/// One motion constraint: a fictitious zero-inertia end-effector link
/// rigidly attached to `link` with coinciding frames, restricting K * a to
/// a prescribed value. K is expressed in the link frame, angular
/// components first.
struct Constraint {
  int link = 0;
  ConstraintKind kind = ConstraintKind::Weld;
  MatX<double> K;  // m_e x 6, full row rank

  int rows() const { return K.rows(); }
};

class ConstraintSet {
 public:
  int size() const { return static_cast<int>(items_.size()); }
  const Constraint& operator[](int i) const { return items_[i]; }

  int total_rows() const {
    int m = 0;
    for (const auto& c : items_) m += c.rows();
    return m;
  }

  /// Row offset of constraint block i in the stacked constraint space.
  int row_offset(int i) const {
    int off = 0;
    for (int k = 0; k < i; ++k) off += items_[k].rows();
    return off;
  }

  void push(Constraint c) { items_.push_back(std::move(c)); }

  const std::vector<Constraint>& items() const { return items_; }

 private:
  std::vector<Constraint> items_;
};

/// Appends a constraint on `link`. Weld pins all 6 directions (K = I6);
/// connect pins the linear acceleration of the link origin (K = [0 I3]).
/// Custom K must have full row rank.
ConstraintSet attach_constraint(ConstraintSet cons, const KinematicTree& tree,
                                int link, ConstraintKind kind,
                                const MatX<double>* custom_k = nullptr);

/// Index machinery over the constrained tree. End-effectors are the
/// fictitious links n_b+1 .. n_b+m_b, the e-th attached to
/// cons[e-n_b-1].link. Branching links are the world, the end-effectors,
/// and every link whose end-effector support set strictly contains each
/// child's.
struct IndexSets {
  int n_links = 0;
  int n_ee = 0;

  /// es[i] for 1 <= i <= n_links: sorted end-effector indices supported by
  /// link i. es[0] is the full set.
  std::vector<std::vector<int>> es;

  /// cca(a, b) over end-effector ordinals (0-based): the physical closest
  /// common ancestor link of the two attachment links; the end-effector's
  /// own index on the diagonal. 0 means the constraints only meet at the
  /// world.
  MatX<int> cca;

  /// Ascending branching-link indices; always contains 0 and all
  /// end-effectors.
  std::vector<int> branching;
  std::vector<char> is_branching;  // indexed 0..n_links+n_ee

  /// Closest strictly ancestral branching link, for 1..n_links+n_ee.
  /// anc_branch[0] is unused (-1).
  std::vector<int> anc_branch;

  /// Closest descendant branching link for links supporting at least one
  /// end-effector; -1 elsewhere. desc_branch[e] == e for end-effectors.
  std::vector<int> desc_branch;

  /// depth[i] for 0..n_links: world has depth 0.
  std::vector<int> depth;

  bool supports(int link) const { return !es[link].empty(); }
  int ee_link(int e) const { return e - n_links - 1; }  // ordinal of e
};

IndexSets compute_index_sets(const KinematicTree& tree,
                             const ConstraintSet& cons);

/// Flat generalized position. Layout per joint: revolute/prismatic one
/// scalar, spherical a unit quaternion (w, x, y, z), free-flyer a unit
/// quaternion followed by a translation.
struct Configuration {
  std::vector<double> q;
};

Configuration neutral_configuration(const KinematicTree& tree);

/// Deterministic seeded random configuration: angles uniform in [-pi, pi],
/// quaternions uniform on the sphere, translations uniform in [-1, 1].
Configuration random_configuration(const KinematicTree& tree,
                                   std::uint64_t seed);

/// Throws DimensionMismatch / InvalidArgument when q does not match the
/// tree's layout or a quaternion is far from unit norm.
void check_configuration(const KinematicTree& tree, const Configuration& q);

}  // namespace delassus
