#pragma once

#include <cstdint>
#include <utility>

#include "delassus/model.hpp"

namespace delassus {

enum class BaseKind : std::uint8_t { Fixed, Floating };

/// Serial chain of n equal links. Each link is a 1 m rod along its local x
/// axis with mass 1 kg and a slender-box inertia about its center of mass.
/// With a floating base the first joint is a free-flyer; remaining joints
/// follow `joint`.
KinematicTree gen_chain(int n, const JointModel& joint, BaseKind base);

/// Default benchmark link inertia (1 kg rod along x, 1 m long, 0.1 m square
/// cross section).
SpatialInertia<double> default_link_inertia();

/// Stem with `2 * branches_per_side` branches of `branch_len` links each,
/// attached at evenly spaced stem links (ties toward the root, sides
/// alternating), each branch tip carrying a 6-D weld. The first stem link
/// is a floating base.
std::pair<KinematicTree, ConstraintSet> gen_stem_branches(
    int stem_len, int branches_per_side, int branch_len = 7);

/// Six-link sample tree with three constrained links (indices 6, 3 and 5),
/// exercising every index-set case. Fixed base, revolute joints.
std::pair<KinematicTree, ConstraintSet> gen_fig1();

/// Floating-base humanoid-like tree: pelvis, torso, head, two arms and two
/// six-joint legs whose feet each carry four 3-D point contacts (33 DoF,
/// 24 constraint rows).
std::pair<KinematicTree, ConstraintSet> gen_humanoid();

/// Seeded random constrained model for agreement and property tests:
/// 3..40 links, mixed joint kinds, general placements, 1..6 weld/connect
/// constraints on distinct links.
std::pair<KinematicTree, ConstraintSet> gen_random_model(std::uint64_t seed);

/// Serial fixed-base revolute chain of k*k links with a weld on every k-th
/// link.
std::pair<KinematicTree, ConstraintSet> gen_chain_md(int k);

/// Serial fixed-base revolute chain of n links with a weld on every link.
std::pair<KinematicTree, ConstraintSet> gen_chain_all_constrained(int n);

}  // namespace delassus
