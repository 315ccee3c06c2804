#include "delassus/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace delassus {

const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonTopologicalOrder:
      return "NonTopologicalOrder";
    case ErrorCode::NonPositiveMass:
      return "NonPositiveMass";
    case ErrorCode::BadAxis:
      return "BadAxis";
    case ErrorCode::UnmergedFixedJoint:
      return "UnmergedFixedJoint";
    case ErrorCode::RankDeficientK:
      return "RankDeficientK";
    case ErrorCode::BadLinkIndex:
      return "BadLinkIndex";
    case ErrorCode::InvalidGeometry:
      return "InvalidGeometry";
    case ErrorCode::MalformedXml:
      return "MalformedXml";
    case ErrorCode::MultipleRoots:
      return "MultipleRoots";
    case ErrorCode::CyclicJointGraph:
      return "CyclicJointGraph";
    case ErrorCode::UnsupportedJointType:
      return "UnsupportedJointType";
    case ErrorCode::SingularJsim:
      return "SingularJsim";
    case ErrorCode::SingularD:
      return "SingularD";
    case ErrorCode::DimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::ChainMismatch:
      return "ChainMismatch";
    case ErrorCode::NotAncestor:
      return "NotAncestor";
    case ErrorCode::InsufficientPoints:
      return "InsufficientPoints";
    case ErrorCode::NonPositiveValue:
      return "NonPositiveValue";
    default:
      return "InvalidArgument";
  }
}

const char* joint_kind_name(JointKind k) {
  switch (k) {
    case JointKind::Revolute:
      return "revolute";
    case JointKind::Prismatic:
      return "prismatic";
    case JointKind::Spherical:
      return "spherical";
    case JointKind::FreeFlyer:
      return "free_flyer";
    default:
      return "fixed";
  }
}

int KinematicTree::add_link(Link l) {
  if (l.parent < 0 || l.parent > n_links())
    throw Error(ErrorCode::BadLinkIndex,
                "parent " + std::to_string(l.parent) + " out of range");
  links_.push_back(std::move(l));
  refresh();
  return n_links();
}

void KinematicTree::refresh() {
  const int nb = n_links();
  children_.assign(nb + 1, {});
  dof_offset_.assign(nb, 0);
  q_offset_.assign(nb, 0);
  n_dof_ = 0;
  n_q_ = 0;
  for (int i = 1; i <= nb; ++i) {
    const Link& l = links_[i - 1];
    if (l.parent >= 0 && l.parent < i) children_[l.parent].push_back(i);
    dof_offset_[i - 1] = n_dof_;
    q_offset_[i - 1] = n_q_;
    n_dof_ += l.joint.dof();
    n_q_ += l.joint.nq();
  }
}

int KinematicTree::depth(int i) const {
  int d = 0;
  while (i > 0) {
    d += 1;
    i = parent(i);
  }
  return d;
}

int KinematicTree::max_depth() const {
  int d = 0;
  for (int i = 1; i <= n_links(); ++i) d = std::max(d, depth(i));
  return d;
}

std::optional<ValidationIssue> validate(const KinematicTree& tree) {
  for (int i = 1; i <= tree.n_links(); ++i) {
    const auto& l = tree.link(i);
    if (l.parent < 0 || l.parent >= i)
      return ValidationIssue{ErrorCode::NonTopologicalOrder, i,
                             "link " + std::to_string(i) + " has parent " +
                                 std::to_string(l.parent)};
    if (!(l.inertia.mass > 0.0))
      return ValidationIssue{ErrorCode::NonPositiveMass, i,
                             "link " + std::to_string(i) + " has mass " +
                                 std::to_string(l.inertia.mass)};
    if (l.joint.kind == JointKind::Fixed)
      return ValidationIssue{ErrorCode::UnmergedFixedJoint, i,
                             "link " + std::to_string(i) +
                                 " still carries a fixed joint"};
    if (l.joint.kind == JointKind::Revolute ||
        l.joint.kind == JointKind::Prismatic) {
      const auto a = l.joint.axis;
      const double n2 = a.x * a.x + a.y * a.y + a.z * a.z;
      if (std::abs(n2 - 1.0) > 1e-12 * 2.0 + 1e-12)
        return ValidationIssue{ErrorCode::BadAxis, i,
                               "joint axis of link " + std::to_string(i) +
                                   " is not unit norm"};
    }
  }
  return std::nullopt;
}

void validate_or_throw(const KinematicTree& tree) {
  if (auto issue = validate(tree)) throw Error(issue->code, issue->message);
}

namespace {

// Row rank check for a m x 6 constraint matrix via the Gram matrix.
bool full_row_rank(const MatX<double>& k) {
  const int m = k.rows();
  MatX<double> g(m, m);
  double scale = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double s = 0.0;
      for (int c = 0; c < 6; ++c) s += k(i, c) * k(j, c);
      g(i, j) = s;
      scale = std::max(scale, std::abs(s));
    }
  if (scale == 0.0) return false;
  // Cholesky with a relative pivot floor.
  for (int j = 0; j < m; ++j) {
    double d = g(j, j);
    for (int c = 0; c < j; ++c) d -= g(j, c) * g(j, c);
    if (d <= 1e-12 * scale) return false;
    const double l = std::sqrt(d);
    g(j, j) = l;
    for (int i = j + 1; i < m; ++i) {
      double s = g(i, j);
      for (int c = 0; c < j; ++c) s -= g(i, c) * g(j, c);
      g(i, j) = s / l;
    }
  }
  return true;
}

}  // namespace

ConstraintSet attach_constraint(ConstraintSet cons, const KinematicTree& tree,
                                int link, ConstraintKind kind,
                                const MatX<double>* custom_k) {
  if (link < 1 || link > tree.n_links())
    throw Error(ErrorCode::BadLinkIndex,
                "constraint on nonexistent link " + std::to_string(link));
  Constraint c;
  c.link = link;
  c.kind = kind;
  switch (kind) {
    case ConstraintKind::Weld:
      c.K = MatX<double>::identity(6);
      break;
    case ConstraintKind::Connect:
      c.K = MatX<double>(3, 6);
      c.K(0, 3) = 1.0;
      c.K(1, 4) = 1.0;
      c.K(2, 5) = 1.0;
      break;
    case ConstraintKind::Custom:
      if (!custom_k || custom_k->cols() != 6 || custom_k->rows() < 1 ||
          custom_k->rows() > 6)
        throw Error(ErrorCode::InvalidArgument,
                    "custom constraint needs an m x 6 matrix, 1 <= m <= 6");
      if (!full_row_rank(*custom_k))
        throw Error(ErrorCode::RankDeficientK,
                    "custom constraint matrix is row rank deficient");
      c.K = *custom_k;
      break;
  }
  cons.push(std::move(c));
  return cons;
}

IndexSets compute_index_sets(const KinematicTree& tree,
                             const ConstraintSet& cons) {
  IndexSets out;
  const int nb = tree.n_links();
  const int me = cons.size();
  out.n_links = nb;
  out.n_ee = me;

  // Augmented children lists: physical children plus attached end-effectors.
  std::vector<std::vector<int>> kids(nb + 1);
  std::vector<int> ee_parent(me);
  for (int i = 0; i <= nb; ++i) kids[i] = tree.children(i);
  for (int e = 0; e < me; ++e) {
    ee_parent[e] = cons[e].link;
    kids[cons[e].link].push_back(nb + 1 + e);
  }

  // Support sets bottom-up. End-effector e supports itself.
  out.es.assign(nb + 1, {});
  std::vector<std::vector<int>> es_aug(nb + me + 1);
  for (int e = 0; e < me; ++e) es_aug[nb + 1 + e] = {nb + 1 + e};
  for (int i = nb; i >= 0; --i) {
    std::vector<int> s;
    for (int c : kids[i]) {
      const auto& cs = c > nb ? es_aug[c] : out.es[c];
      s.insert(s.end(), cs.begin(), cs.end());
    }
    std::sort(s.begin(), s.end());
    if (i > 0)
      out.es[i] = s;
    else
      out.es[0] = s;
  }

  // Branching links: world, end-effectors, and links where at least two
  // children (end-effectors included) carry support.
  out.is_branching.assign(nb + me + 1, 0);
  out.is_branching[0] = 1;
  for (int e = 0; e < me; ++e) out.is_branching[nb + 1 + e] = 1;
  for (int i = 1; i <= nb; ++i) {
    int supported_kids = 0;
    for (int c : kids[i]) {
      const bool sup = c > nb || !out.es[c].empty();
      if (sup) ++supported_kids;
    }
    if (supported_kids >= 2) out.is_branching[i] = 1;
  }
  for (int i = 0; i <= nb + me; ++i)
    if (out.is_branching[i]) out.branching.push_back(i);

  // Closest ancestral branching link.
  out.anc_branch.assign(nb + me + 1, -1);
  for (int i = 1; i <= nb; ++i) {
    const int p = tree.parent(i);
    out.anc_branch[i] = out.is_branching[p] ? p : out.anc_branch[p];
  }
  for (int e = 0; e < me; ++e) {
    const int p = ee_parent[e];
    out.anc_branch[nb + 1 + e] =
        out.is_branching[p] ? p : out.anc_branch[p];
  }

  // Closest descendant branching link, defined on supporting links.
  out.desc_branch.assign(nb + me + 1, -1);
  for (int e = 0; e < me; ++e) out.desc_branch[nb + 1 + e] = nb + 1 + e;
  for (int i = nb; i >= 1; --i) {
    if (out.is_branching[i]) {
      out.desc_branch[i] = i;
      continue;
    }
    if (out.es[i].empty()) continue;
    // Exactly one supported child below a non-branching supporting link.
    for (int c : kids[i]) {
      const bool sup = c > nb || !out.es[c].empty();
      if (sup) {
        out.desc_branch[i] = out.desc_branch[c];
        break;
      }
    }
  }

  // Depths.
  out.depth.assign(nb + 1, 0);
  for (int i = 1; i <= nb; ++i) out.depth[i] = out.depth[tree.parent(i)] + 1;

  // cca over end-effector pairs, via ancestor chains of the attachment
  // links. Diagonal holds the end-effector's own index.
  out.cca = MatX<int>(me, me);
  for (int a = 0; a < me; ++a) {
    for (int b = 0; b <= a; ++b) {
      if (a == b) {
        out.cca(a, a) = nb + 1 + a;
        continue;
      }
      int u = ee_parent[a], v = ee_parent[b];
      while (u != v) {
        if (u > v)
          u = tree.parent(u);
        else
          v = tree.parent(v);
      }
      out.cca(a, b) = u;
      out.cca(b, a) = u;
    }
  }
  return out;
}

Configuration neutral_configuration(const KinematicTree& tree) {
  Configuration c;
  c.q.assign(tree.n_q(), 0.0);
  for (int i = 1; i <= tree.n_links(); ++i) {
    const auto k = tree.link(i).joint.kind;
    if (k == JointKind::Spherical || k == JointKind::FreeFlyer)
      c.q[tree.q_offset(i)] = 1.0;  // identity quaternion (w, x, y, z)
  }
  return c;
}

namespace {
// Explicit bit mapping keeps streams identical across standard libraries.
double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}
double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * uniform01(g);
}
double gauss(std::mt19937_64& g) {
  // Box-Muller, deterministic given the stream.
  const double u1 = std::max(uniform01(g), 1e-300);
  const double u2 = uniform01(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}
}  // namespace

Configuration random_configuration(const KinematicTree& tree,
                                   std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Configuration c;
  c.q.assign(tree.n_q(), 0.0);
  for (int i = 1; i <= tree.n_links(); ++i) {
    const auto& j = tree.link(i).joint;
    const int off = tree.q_offset(i);
    switch (j.kind) {
      case JointKind::Revolute:
      case JointKind::Prismatic:
        c.q[off] = uniform(gen, -3.141592653589793, 3.141592653589793);
        break;
      case JointKind::Spherical:
      case JointKind::FreeFlyer: {
        double w = gauss(gen), x = gauss(gen), y = gauss(gen), z = gauss(gen);
        const double n = std::sqrt(w * w + x * x + y * y + z * z);
        c.q[off] = w / n;
        c.q[off + 1] = x / n;
        c.q[off + 2] = y / n;
        c.q[off + 3] = z / n;
        if (j.kind == JointKind::FreeFlyer)
          for (int t = 0; t < 3; ++t)
            c.q[off + 4 + t] = uniform(gen, -1.0, 1.0);
        break;
      }
      default:
        break;
    }
  }
  return c;
}

void check_configuration(const KinematicTree& tree, const Configuration& q) {
  if (static_cast<int>(q.q.size()) != tree.n_q())
    throw Error(ErrorCode::DimensionMismatch,
                "configuration has " + std::to_string(q.q.size()) +
                    " values, model needs " + std::to_string(tree.n_q()));
  for (int i = 1; i <= tree.n_links(); ++i) {
    const auto k = tree.link(i).joint.kind;
    if (k == JointKind::Spherical || k == JointKind::FreeFlyer) {
      const int off = tree.q_offset(i);
      const double n2 = q.q[off] * q.q[off] + q.q[off + 1] * q.q[off + 1] +
                        q.q[off + 2] * q.q[off + 2] +
                        q.q[off + 3] * q.q[off + 3];
      if (std::abs(n2 - 1.0) > 2e-9)
        throw Error(ErrorCode::InvalidArgument,
                    "quaternion of joint " + std::to_string(i) +
                        " is not unit norm");
    }
  }
}

}  // namespace delassus
