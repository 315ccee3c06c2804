#pragma once

#include <string>
#include <vector>

#include "delassus/linalg.hpp"
#include "delassus/model.hpp"
#include "delassus/spatial.hpp"

namespace delassus {

enum class Algo { Naive, Ltl, PvOsim, Efpa, PvOsimr };

const char* algo_name(Algo a);
Algo algo_from_name(const std::string& name);
std::vector<Algo> all_algos();

/// World placements of every link (index 0 is the identity world frame).
std::vector<Transform<double>> forward_kinematics(const KinematicTree& tree,
                                                  const Configuration& q);

/// Joint-space inertia matrix with the expanded per-DoF parent array that
/// encodes its branching-induced sparsity.
struct Jsim {
  Matrix M;
  std::vector<int> dof_parent;  // -1 marks a root DoF
};

Jsim crba_jsim(const KinematicTree& tree, const Configuration& q);

/// Stacked m x n constraint Jacobian; row block e maps joint velocities to
/// the constraint-space velocity of end-effector e, expressed in the
/// attachment link's frame.
Matrix constraint_jacobian(const KinematicTree& tree, const ConstraintSet& cons,
                           const Configuration& q);

Matrix naive_delassus(const KinematicTree& tree, const ConstraintSet& cons,
                      const Configuration& q);
Matrix ltl_delassus(const KinematicTree& tree, const ConstraintSet& cons,
                    const Configuration& q);
Matrix pv_osim(const KinematicTree& tree, const ConstraintSet& cons,
               const Configuration& q);
Matrix efpa(const KinematicTree& tree, const ConstraintSet& cons,
            const Configuration& q);
Matrix pv_osimr(const KinematicTree& tree, const ConstraintSet& cons,
                const Configuration& q);

Matrix compute_delassus(const KinematicTree& tree, const ConstraintSet& cons,
                        const Configuration& q, Algo algo);

/// Links visited by the PV-OSIMr phases after the first backward sweep;
/// exposed for structural tests.
struct PvOsimrVisitLog {
  std::vector<int> phase_b_nodes;
  std::vector<int> phase_c_links;
  std::vector<int> phase_d_links;
};
Matrix pv_osimr_traced(const KinematicTree& tree, const ConstraintSet& cons,
                       const Configuration& q, PvOsimrVisitLog& log);

/// Per-joint articulated-body data from the shared backward sweep, all
/// expressed in the owning link's frame. p is the pure joint projection
/// I - H^A S D^-1 S^T (idempotent, annihilated by S^T); x is the local
/// joint transform at q.
struct JointAbiData {
  std::vector<Mat6<double>> habi;   // 1-based, H^A_i
  std::vector<Matrix> d;            // S^T H^A S per joint
  std::vector<Matrix> dinv;
  std::vector<Mat6<double>> p;      // local force projection
  std::vector<Mat6<double>> omega;  // S D^-1 S^T
  std::vector<Transform<double>> x;
};

JointAbiData abi_backward(const KinematicTree& tree, const Configuration& q);

/// Force propagator between two links' frames: maps a force expressed in
/// the source link's frame to the transmitted force in the target link's
/// frame.
struct ExtendedPropagator {
  int source = 0;
  int target = 0;
  Matrix p;  // 6 x 6
};

/// Single-edge propagator from link i to its parent (includes the edge
/// transform), built from abi_backward data.
ExtendedPropagator joint_propagator(const KinematicTree& tree,
                                    const JointAbiData& abi, int i);

/// Composition along a path: given p1 from i to k and p2 from k to j,
/// returns the propagator from i to j. Throws ChainMismatch when the
/// endpoints do not line up.
ExtendedPropagator efp_compose(const ExtendedPropagator& p1,
                               const ExtendedPropagator& p2);

/// Apparent spatial inverse inertia of link i with ancestor j grounded,
/// expressed in link i's frame: the sum over joints strictly below j down
/// to and including i of the back-propagated joint compliances. j may be 0
/// (the world). Throws NotAncestor otherwise.
Mat6<double> path_inverse_inertia(const KinematicTree& tree,
                                  const JointAbiData& abi, int j, int i);

}  // namespace delassus
