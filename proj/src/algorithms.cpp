#include "delassus/algorithms.hpp"

#include "delassus/detail/sweeps.hpp"

namespace delassus {

const char* algo_name(Algo a) {
  switch (a) {
    case Algo::Naive:
      return "naive";
    case Algo::Ltl:
      return "ltl";
    case Algo::PvOsim:
      return "pv-osim";
    case Algo::Efpa:
      return "efpa";
    default:
      return "pv-osimr";
  }
}

Algo algo_from_name(const std::string& name) {
  for (Algo a : all_algos())
    if (name == algo_name(a)) return a;
  // Accept underscores as separators too.
  if (name == "pv_osim") return Algo::PvOsim;
  if (name == "pv_osimr") return Algo::PvOsimr;
  throw Error(ErrorCode::InvalidArgument, "unknown algorithm '" + name + "'");
}

std::vector<Algo> all_algos() {
  return {Algo::Naive, Algo::Ltl, Algo::PvOsim, Algo::Efpa, Algo::PvOsimr};
}

namespace {

detail::ModelArrays<double> arrays_for(const KinematicTree& tree,
                                       const ConstraintSet& cons,
                                       const IndexSets& idx,
                                       const Configuration& q) {
  validate_or_throw(tree);
  check_configuration(tree, q);
  return detail::build_model_arrays<double>(tree, cons, idx);
}

}  // namespace

std::vector<Transform<double>> forward_kinematics(const KinematicTree& tree,
                                                  const Configuration& q) {
  validate_or_throw(tree);
  check_configuration(tree, q);
  std::vector<Transform<double>> world(tree.n_links() + 1);
  for (int i = 1; i <= tree.n_links(); ++i) {
    const auto js = detail::make_joint_spec(tree.link(i).joint,
                                            tree.q_offset(i),
                                            tree.dof_offset(i));
    const auto local = compose(
        detail::convert_transform<double>(tree.link(i).placement),
        detail::joint_transform<double>(js, q.q.data()));
    world[i] = compose(world[tree.parent(i)], local);
  }
  return world;
}

Jsim crba_jsim(const KinematicTree& tree, const Configuration& q) {
  ConstraintSet none;
  const IndexSets idx = compute_index_sets(tree, none);
  auto m = arrays_for(tree, none, idx, q);
  const auto x = detail::fk_local(m, q.q.data());
  return Jsim{detail::crba_t(m, x), m.dof_parent};
}

Matrix constraint_jacobian(const KinematicTree& tree, const ConstraintSet& cons,
                           const Configuration& q) {
  const IndexSets idx = compute_index_sets(tree, cons);
  auto m = arrays_for(tree, cons, idx, q);
  const auto x = detail::fk_local(m, q.q.data());
  return detail::jacobian_t(m, x);
}

Matrix naive_delassus(const KinematicTree& tree, const ConstraintSet& cons,
                      const Configuration& q) {
  const IndexSets idx = compute_index_sets(tree, cons);
  auto m = arrays_for(tree, cons, idx, q);
  return detail::naive_delassus_t(m, q.q.data());
}

Matrix ltl_delassus(const KinematicTree& tree, const ConstraintSet& cons,
                    const Configuration& q) {
  const IndexSets idx = compute_index_sets(tree, cons);
  auto m = arrays_for(tree, cons, idx, q);
  return detail::ltl_delassus_t(m, q.q.data());
}

Matrix pv_osim(const KinematicTree& tree, const ConstraintSet& cons,
               const Configuration& q) {
  const IndexSets idx = compute_index_sets(tree, cons);
  auto m = arrays_for(tree, cons, idx, q);
  return detail::pv_osim_t(m, q.q.data());
}

Matrix efpa(const KinematicTree& tree, const ConstraintSet& cons,
            const Configuration& q) {
  const IndexSets idx = compute_index_sets(tree, cons);
  auto m = arrays_for(tree, cons, idx, q);
  return detail::efpa_t(m, q.q.data());
}

Matrix pv_osimr(const KinematicTree& tree, const ConstraintSet& cons,
                const Configuration& q) {
  const IndexSets idx = compute_index_sets(tree, cons);
  auto m = arrays_for(tree, cons, idx, q);
  return detail::pv_osimr_t(m, q.q.data());
}

Matrix pv_osimr_traced(const KinematicTree& tree, const ConstraintSet& cons,
                       const Configuration& q, PvOsimrVisitLog& log) {
  const IndexSets idx = compute_index_sets(tree, cons);
  auto m = arrays_for(tree, cons, idx, q);
  detail::OsimrTrace trace;
  Matrix lam = detail::pv_osimr_t(m, q.q.data(), &trace);
  log.phase_b_nodes = std::move(trace.phase_b_nodes);
  log.phase_c_links = std::move(trace.phase_c_links);
  log.phase_d_links = std::move(trace.phase_d_links);
  return lam;
}

Matrix compute_delassus(const KinematicTree& tree, const ConstraintSet& cons,
                        const Configuration& q, Algo algo) {
  switch (algo) {
    case Algo::Naive:
      return naive_delassus(tree, cons, q);
    case Algo::Ltl:
      return ltl_delassus(tree, cons, q);
    case Algo::PvOsim:
      return pv_osim(tree, cons, q);
    case Algo::Efpa:
      return efpa(tree, cons, q);
    default:
      return pv_osimr(tree, cons, q);
  }
}

JointAbiData abi_backward(const KinematicTree& tree, const Configuration& q) {
  ConstraintSet none;
  const IndexSets idx = compute_index_sets(tree, none);
  auto m = arrays_for(tree, none, idx, q);
  const auto x = detail::fk_local(m, q.q.data());
  auto w = detail::abi_init(m);
  JointAbiData out;
  const int nb = tree.n_links();
  out.habi.resize(nb + 1);
  out.d.resize(nb + 1);
  out.dinv.resize(nb + 1);
  out.p.resize(nb + 1);
  out.omega.resize(nb + 1);
  out.x.resize(nb + 1);
  for (int i = nb; i >= 1; --i) {
    // abi_step consumes habi[i] before the parent update, so record after.
    detail::abi_step(m, x, i, w);
    out.habi[i] = w.habi[i];
    out.dinv[i] = w.dinv[i];
    out.d[i] = detail::project_D(w.u[i], m.jspec[i]);
    out.x[i] = x[i];
    // P = I - Ud S^T and Omega = S Dinv S^T, materialized densely.
    const MatX<double> st = detail::st_matrix<double>(m.jspec[i]);
    Mat6<double> p = Mat6<double>::identity();
    Mat6<double> om;
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 6; ++c) {
        double pu = 0.0, o = 0.0;
        for (int k = 0; k < m.jspec[i].dof; ++k) {
          pu += w.ud[i](r, k) * st(k, c);
          for (int k2 = 0; k2 < m.jspec[i].dof; ++k2)
            o += st(k, r) * w.dinv[i](k, k2) * st(k2, c);
        }
        p(r, c) -= pu;
        om(r, c) = o;
      }
    out.p[i] = p;
    out.omega[i] = om;
  }
  return out;
}

ExtendedPropagator joint_propagator(const KinematicTree& tree,
                                    const JointAbiData& abi, int i) {
  if (i < 1 || i > tree.n_links())
    throw Error(ErrorCode::BadLinkIndex, "link " + std::to_string(i));
  MatX<double> p = abi.p[i].to_matx();
  cols_transform_force(abi.x[i], p);
  return ExtendedPropagator{i, tree.parent(i), std::move(p)};
}

ExtendedPropagator efp_compose(const ExtendedPropagator& p1,
                               const ExtendedPropagator& p2) {
  if (p1.target != p2.source)
    throw Error(ErrorCode::ChainMismatch,
                "cannot compose propagator into " +
                    std::to_string(p1.target) + " with one out of " +
                    std::to_string(p2.source));
  return ExtendedPropagator{p1.source, p2.target, p2.p * p1.p};
}

Mat6<double> path_inverse_inertia(const KinematicTree& tree,
                                  const JointAbiData& abi, int j, int i) {
  if (i < 1 || i > tree.n_links())
    throw Error(ErrorCode::BadLinkIndex, "link " + std::to_string(i));
  // Confirm j is an ancestor of i (or the world).
  {
    int k = i;
    while (k > 0 && k != j) k = tree.parent(k);
    if (k != j)
      throw Error(ErrorCode::NotAncestor,
                  std::to_string(j) + " is not an ancestor of " +
                      std::to_string(i));
  }
  MatX<double> cur = MatX<double>::identity(6);  // propagator from i to k
  MatX<double> acc(6, 6);
  int k = i;
  while (k != j) {
    // Term of joint k: cur^T Omega_k cur.
    const MatX<double> t = abi.omega[k].to_matx() * cur;
    detail::add_sym_atb(acc, cur, t);
    cur = joint_propagator(tree, abi, k).p * cur;
    k = tree.parent(k);
  }
  return Mat6<double>::from_matx(acc);
}

}  // namespace delassus
