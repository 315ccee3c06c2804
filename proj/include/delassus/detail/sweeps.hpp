#pragma once

// Shared templated sweeps behind the public Delassus algorithms. Everything
// here is instantiated both with double (plain runs) and with Metered
// (operation-counted runs); all floating arithmetic on the scalar type S is
// what a metered run records. Model conversion, index bookkeeping and
// result permutation deliberately stay in double/int and are free.
//
// All link quantities live in the link's own frame. Per-edge transforms are
// applied during propagation, so the per-joint force propagator used below
// is the rank-dof update f -> f - U Dinv S^T f followed by the Plucker force
// action onto the parent frame.

#include <algorithm>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "delassus/detail/joint_ops.hpp"
#include "delassus/error.hpp"
#include "delassus/linalg.hpp"
#include "delassus/model.hpp"
#include "delassus/spatial.hpp"

namespace delassus::detail {

// ---------------------------------------------------------------------------
// Small dense helpers (explicit loops; S-arithmetic only).

// c = a b (c freshly sized by the caller). Dot loops assign their first
// term rather than accumulating onto a zero seed, so metered counts carry
// no spurious additions.
template <typename S>
void set_ab(MatX<S>& c, const MatX<S>& a, const MatX<S>& b) {
  if (a.cols() == 0) return;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) {
      S s = a(i, 0) * b(0, j);
      for (int k = 1; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
}

template <typename S>
void add_ab(MatX<S>& c, const MatX<S>& a, const MatX<S>& b) {
  if (a.cols() == 0) return;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) {
      S s = a(i, 0) * b(0, j);
      for (int k = 1; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) += s;
    }
}

template <typename S>
void sub_ab(MatX<S>& c, const MatX<S>& a, const MatX<S>& b) {
  if (a.cols() == 0) return;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) {
      S s = a(i, 0) * b(0, j);
      for (int k = 1; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) -= s;
    }
}

// c -= a b^T
template <typename S>
void sub_abt(MatX<S>& c, const MatX<S>& a, const MatX<S>& b) {
  if (a.cols() == 0) return;
  for (int i = 0; i < c.rows(); ++i)
    for (int j = 0; j < c.cols(); ++j) {
      S s = a(i, 0) * b(j, 0);
      for (int k = 1; k < a.cols(); ++k) s += a(i, k) * b(j, k);
      c(i, j) -= s;
    }
}

// a^T b
template <typename S>
MatX<S> product_atb(const MatX<S>& a, const MatX<S>& b) {
  MatX<S> c(a.cols(), b.cols());
  if (a.rows() == 0) return c;
  for (int i = 0; i < c.rows(); ++i)
    for (int j = 0; j < c.cols(); ++j) {
      S s = a(0, i) * b(0, j);
      for (int k = 1; k < a.rows(); ++k) s += a(k, i) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

// a b^T
template <typename S>
MatX<S> product_abt(const MatX<S>& a, const MatX<S>& b) {
  MatX<S> c(a.rows(), b.rows());
  if (a.cols() == 0) return c;
  for (int i = 0; i < c.rows(); ++i)
    for (int j = 0; j < c.cols(); ++j) {
      S s = a(i, 0) * b(j, 0);
      for (int k = 1; k < a.cols(); ++k) s += a(i, k) * b(j, k);
      c(i, j) = s;
    }
  return c;
}

// l += a b^T, symmetric result written as lower triangle plus mirror.
template <typename S>
void add_sym_abt(MatX<S>& l, const MatX<S>& a, const MatX<S>& b) {
  if (a.cols() == 0) return;
  for (int i = 0; i < l.rows(); ++i)
    for (int j = 0; j <= i; ++j) {
      S s = a(i, 0) * b(j, 0);
      for (int k = 1; k < a.cols(); ++k) s += a(i, k) * b(j, k);
      const S v = l(i, j) + s;
      l(i, j) = v;
      l(j, i) = v;
    }
}

// l += a^T b, symmetric result (a and b are k x m).
template <typename S>
void add_sym_atb(MatX<S>& l, const MatX<S>& a, const MatX<S>& b) {
  if (a.rows() == 0) return;
  for (int i = 0; i < l.rows(); ++i)
    for (int j = 0; j <= i; ++j) {
      S s = a(0, i) * b(0, j);
      for (int k = 1; k < a.rows(); ++k) s += a(k, i) * b(k, j);
      const S v = l(i, j) + s;
      l(i, j) = v;
      l(j, i) = v;
    }
}

// lam = z^T z, symmetric, assigned (no prior contents).
template <typename S>
void set_sym_ztz(MatX<S>& lam, const MatX<S>& z) {
  if (z.rows() == 0) return;
  for (int i = 0; i < lam.rows(); ++i)
    for (int j = 0; j <= i; ++j) {
      S s = z(0, i) * z(0, j);
      for (int k = 1; k < z.rows(); ++k) s += z(k, i) * z(k, j);
      lam(i, j) = s;
      lam(j, i) = s;
    }
}

// ---------------------------------------------------------------------------
// Converted model data. Built outside the metering boundary.

template <typename S>
Transform<S> convert_transform(const Transform<double>& x) {
  Transform<S> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.R(i, j) = S(x.R(i, j));
  r.p = {S(x.p.x), S(x.p.y), S(x.p.z)};
  r.rtag = x.rtag;
  r.ttag = x.ttag;
  return r;
}

template <typename S>
struct ModelArrays {
  const KinematicTree* tree = nullptr;
  const ConstraintSet* cons = nullptr;
  const IndexSets* idx = nullptr;

  int nb = 0, ndof = 0, mtot = 0;
  std::vector<Transform<S>> placement;  // 1-based
  std::vector<JointSpec> jspec;         // 1-based
  std::vector<Mat6<S>> h6;              // 1-based local spatial inertias
  std::vector<MatX<S>> cons_k;          // per constraint ordinal
  std::vector<std::vector<int>> attached;  // link -> constraint ordinals
  std::vector<int> cons_row;               // row offsets per ordinal
  std::vector<int> dof_parent;             // expanded per-DoF parent, -1 root
};

template <typename S>
ModelArrays<S> build_model_arrays(const KinematicTree& tree,
                                  const ConstraintSet& cons,
                                  const IndexSets& idx) {
  ModelArrays<S> m;
  m.tree = &tree;
  m.cons = &cons;
  m.idx = &idx;
  m.nb = tree.n_links();
  m.ndof = tree.n_dof();
  m.mtot = cons.total_rows();
  m.placement.resize(m.nb + 1);
  m.jspec.resize(m.nb + 1);
  m.h6.resize(m.nb + 1);
  for (int i = 1; i <= m.nb; ++i) {
    const auto& l = tree.link(i);
    m.placement[i] = convert_transform<S>(l.placement);
    m.jspec[i] = make_joint_spec(l.joint, tree.q_offset(i), tree.dof_offset(i));
    const Mat6<double> h = l.inertia.to_mat6();
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 6; ++c) m.h6[i](r, c) = S(h(r, c));
  }
  m.cons_k.resize(cons.size());
  m.attached.assign(m.nb + 1, {});
  m.cons_row.resize(cons.size());
  for (int e = 0; e < cons.size(); ++e) {
    const auto& c = cons[e];
    m.cons_k[e] = MatX<S>(c.K.rows(), 6);
    for (int r = 0; r < c.K.rows(); ++r)
      for (int j = 0; j < 6; ++j) m.cons_k[e](r, j) = S(c.K(r, j));
    m.attached[c.link].push_back(e);
    m.cons_row[e] = cons.row_offset(e);
  }
  // Expanded per-DoF parent array (root-to-leaves DoF numbering).
  m.dof_parent.assign(m.ndof, -1);
  for (int i = 1; i <= m.nb; ++i) {
    const int off = tree.dof_offset(i);
    const int nd = tree.link(i).joint.dof();
    for (int t = 1; t < nd; ++t) m.dof_parent[off + t] = off + t - 1;
    int p = tree.parent(i);
    m.dof_parent[off] =
        p == 0 ? -1 : tree.dof_offset(p) + tree.link(p).joint.dof() - 1;
  }
  return m;
}

template <typename S>
std::vector<Transform<S>> fk_local(const ModelArrays<S>& m, const double* q) {
  std::vector<Transform<S>> x(m.nb + 1);
  for (int i = 1; i <= m.nb; ++i)
    x[i] = compose(m.placement[i], joint_transform<S>(m.jspec[i], q));
  return x;
}

// ---------------------------------------------------------------------------
// Articulated-body backward data shared by the propagator algorithms.

template <typename S>
struct AbiWork {
  std::vector<Mat6<S>> habi;
  std::vector<MatX<S>> u;     // H^A S
  std::vector<MatX<S>> dinv;  // (S^T H^A S)^-1
  std::vector<MatX<S>> ud;    // U Dinv
};

template <typename S>
AbiWork<S> abi_init(const ModelArrays<S>& m) {
  AbiWork<S> w;
  w.habi = m.h6;
  w.u.resize(m.nb + 1);
  w.dinv.resize(m.nb + 1);
  w.ud.resize(m.nb + 1);
  return w;
}

/// Joint-space work at link i plus projected-ABI accumulation into the
/// parent. Call in reverse topological order.
template <typename S>
void abi_step(const ModelArrays<S>& m, const std::vector<Transform<S>>& x,
              int i, AbiWork<S>& w) {
  const JointSpec& js = m.jspec[i];
  w.u[i] = mul_H_S(w.habi[i], js);
  const MatX<S> d = project_D(w.u[i], js);
  if (!sym_pd_inverse(d, w.dinv[i]))
    throw Error(ErrorCode::SingularD,
                "apparent joint inertia not positive definite at link " +
                    std::to_string(i));
  w.ud[i] = MatX<S>(6, js.dof);
  set_ab(w.ud[i], w.u[i], w.dinv[i]);
  const int parent = m.tree->parent(i);
  if (parent > 0) {
    // Projected ABI H - Ud U^T (symmetric), then pushed through the edge.
    Mat6<S> hp;
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c <= r; ++c) {
        S s(0);
        for (int k = 0; k < js.dof; ++k) s += w.ud[i](r, k) * w.u[i](c, k);
        const S v = w.habi[i](r, c) - s;
        hp(r, c) = v;
        hp(c, r) = v;
      }
    add_abi_to_parent(x[i], hp, w.habi[parent]);
  }
}

// ---------------------------------------------------------------------------
// Joint-space baseline: CRBA, constraint Jacobian, naive and LTL.

template <typename S>
MatX<S> crba_t(const ModelArrays<S>& m, const std::vector<Transform<S>>& x) {
  std::vector<Mat6<S>> ic = m.h6;
  for (int i = m.nb; i >= 1; --i) {
    const int p = m.tree->parent(i);
    if (p > 0) add_abi_to_parent(x[i], ic[i], ic[p]);
  }
  MatX<S> jsim(m.ndof, m.ndof);
  for (int i = 1; i <= m.nb; ++i) {
    const JointSpec& jsi = m.jspec[i];
    MatX<S> f = mul_H_S(ic[i], jsi);
    const MatX<S> mii = st_mul(f, jsi);
    for (int r = 0; r < jsi.dof; ++r)
      for (int c = 0; c < jsi.dof; ++c)
        jsim(jsi.dof_offset + r, jsi.dof_offset + c) = mii(r, c);
    int j = i;
    while (m.tree->parent(j) > 0) {
      cols_transform_force(x[j], f);
      j = m.tree->parent(j);
      const JointSpec& jsj = m.jspec[j];
      const MatX<S> blk = st_mul(f, jsj);  // dof_j x dof_i
      for (int r = 0; r < jsj.dof; ++r)
        for (int c = 0; c < jsi.dof; ++c) {
          jsim(jsj.dof_offset + r, jsi.dof_offset + c) = blk(r, c);
          jsim(jsi.dof_offset + c, jsj.dof_offset + r) = blk(r, c);
        }
    }
  }
  return jsim;
}

template <typename S>
MatX<S> jacobian_t(const ModelArrays<S>& m,
                   const std::vector<Transform<S>>& x) {
  MatX<S> jac(m.mtot, m.ndof);
  for (int e = 0; e < m.cons->size(); ++e) {
    MatX<S> k = m.cons_k[e];
    const int row0 = m.cons_row[e];
    int j = (*m.cons)[e].link;
    while (true) {
      const JointSpec& js = m.jspec[j];
      const MatX<S> blk = mul_K_S(k, js);  // m_e x dof_j
      for (int r = 0; r < blk.rows(); ++r)
        for (int c = 0; c < js.dof; ++c)
          jac(row0 + r, js.dof_offset + c) = blk(r, c);
      if (m.tree->parent(j) == 0) break;
      rows_transform_force(x[j], k);
      j = m.tree->parent(j);
    }
  }
  return jac;
}

template <typename S>
MatX<S> naive_delassus_t(const ModelArrays<S>& m, const double* q) {
  const auto x = fk_local(m, q);
  MatX<S> jsim = crba_t(m, x);
  const MatX<S> jac = jacobian_t(m, x);
  if (!llt_in_place(jsim))
    throw Error(ErrorCode::SingularJsim,
                "joint-space inertia matrix is not positive definite");
  MatX<S> z = jac.transposed();  // n x m
  forward_solve_in_place(jsim, z);
  MatX<S> lam(m.mtot, m.mtot);
  set_sym_ztz(lam, z);
  return lam;
}

/// Sparsity-exploiting factorization L^T L = M over the expanded per-DoF
/// parent array; entries outside M's pattern are never touched.
template <typename S>
MatX<S> ltl_factor_t(MatX<S> l, const std::vector<int>& lambda) {
  const int n = l.rows();
  for (int k = n - 1; k >= 0; --k) {
    if (!(to_double(l(k, k)) > 0.0))
      throw Error(ErrorCode::SingularJsim,
                  "nonpositive pivot in LTL factorization");
    using std::sqrt;
    l(k, k) = sqrt(l(k, k));
    int i = lambda[k];
    while (i >= 0) {
      l(k, i) = l(k, i) / l(k, k);
      i = lambda[i];
    }
    i = lambda[k];
    while (i >= 0) {
      int j = i;
      while (j >= 0) {
        l(i, j) = l(i, j) - l(k, i) * l(k, j);
        j = lambda[j];
      }
      i = lambda[i];
    }
  }
  // The strictly upper triangle still holds untouched copies of M; clear it
  // so the result is a plain lower-triangular factor.
  for (int r = 0; r < n; ++r)
    for (int c = r + 1; c < n; ++c) l(r, c) = S(0);
  return l;
}

template <typename S>
MatX<S> ltl_delassus_t(const ModelArrays<S>& m, const double* q) {
  const auto x = fk_local(m, q);
  const MatX<S> jsim = crba_t(m, x);
  const MatX<S> jac = jacobian_t(m, x);
  const MatX<S> l = ltl_factor_t(jsim, m.dof_parent);

  // Per-constraint supported DoF lists (ascending), integer bookkeeping.
  const int ne = m.cons->size();
  std::vector<std::vector<int>> support(ne);
  for (int e = 0; e < ne; ++e) {
    for (int j = (*m.cons)[e].link; j > 0; j = m.tree->parent(j)) {
      const JointSpec& js = m.jspec[j];
      for (int t = js.dof - 1; t >= 0; --t)
        support[e].push_back(js.dof_offset + t);
    }
    std::reverse(support[e].begin(), support[e].end());
  }

  // Y = J L^-1 block by block, touching only supported columns. Columns are
  // processed leaf-to-root; the lambda chain of a supported DoF stays inside
  // the support set.
  MatX<S> y = jac;
  for (int e = 0; e < ne; ++e) {
    const int r0 = m.cons_row[e];
    const int mr = m.cons_k[e].rows();
    for (auto it = support[e].rbegin(); it != support[e].rend(); ++it) {
      const int k = *it;
      for (int r = 0; r < mr; ++r) y(r0 + r, k) = y(r0 + r, k) / l(k, k);
      int i = m.dof_parent[k];
      while (i >= 0) {
        for (int r = 0; r < mr; ++r)
          y(r0 + r, i) = y(r0 + r, i) - y(r0 + r, k) * l(k, i);
        i = m.dof_parent[i];
      }
    }
  }

  // Lambda^-1 = Y Y^T, restricted per block pair to the DoFs both blocks
  // share, i.e. the root path of the pair's closest common ancestor.
  MatX<S> lam(m.mtot, m.mtot);
  for (int a = 0; a < ne; ++a) {
    const int ra = m.cons_row[a], ma = m.cons_k[a].rows();
    for (int b = 0; b <= a; ++b) {
      const int rb = m.cons_row[b], mb = m.cons_k[b].rows();
      const std::vector<int>* common = nullptr;
      std::vector<int> cca_dofs;
      if (a == b) {
        common = &support[a];
      } else {
        const int c = m.idx->cca(a, b);
        if (c == 0) continue;  // coupled only through the world: zero block
        for (int j = c; j > 0; j = m.tree->parent(j)) {
          const JointSpec& js = m.jspec[j];
          for (int t = js.dof - 1; t >= 0; --t)
            cca_dofs.push_back(js.dof_offset + t);
        }
        common = &cca_dofs;
      }
      if (a == b) {
        for (int r = 0; r < ma; ++r)
          for (int s = 0; s <= r; ++s) {
            S acc(0);
            for (int k : *common) acc += y(ra + r, k) * y(rb + s, k);
            lam(ra + r, rb + s) = acc;
            lam(rb + s, ra + r) = acc;
          }
      } else {
        for (int r = 0; r < ma; ++r)
          for (int s = 0; s < mb; ++s) {
            S acc(0);
            for (int k : *common) acc += y(ra + r, k) * y(rb + s, k);
            lam(ra + r, rb + s) = acc;
            lam(rb + s, ra + r) = acc;
          }
      }
    }
  }
  return lam;
}

// ---------------------------------------------------------------------------
// PV-OSIM: two sweeps with stacked constraint-space propagators.

template <typename S>
MatX<S> pv_osim_t(const ModelArrays<S>& m, const double* q) {
  const auto x = fk_local(m, q);
  AbiWork<S> w = abi_init(m);

  struct Stack {
    MatX<S> k;            // stacked CEMPs relative to the current link
    MatX<S> l;            // accumulated constraint-space inverse inertia
    std::vector<int> ee;  // constraint ordinals, stack order
  };
  std::vector<std::vector<Stack>> pending(m.nb + 1);
  std::vector<Stack> roots;

  for (int i = m.nb; i >= 1; --i) {
    abi_step(m, x, i, w);
    // Merge attached constraints and propagated child stacks.
    std::vector<Stack>& inbox = pending[i];
    const auto& att = m.attached[i];
    int rows = 0;
    for (int e : att) rows += m.cons_k[e].rows();
    for (const auto& s : inbox) rows += s.k.rows();
    if (rows == 0) continue;

    Stack st;
    st.k = MatX<S>(rows, 6);
    st.l = MatX<S>(rows, rows);
    int r = 0;
    for (int e : att) {
      st.k.set_block(r, 0, m.cons_k[e]);
      st.ee.push_back(e);
      r += m.cons_k[e].rows();
    }
    for (auto& s : inbox) {
      st.k.set_block(r, 0, s.k);
      st.l.set_block(r, r, s.l);
      for (int e : s.ee) st.ee.push_back(e);
      r += s.k.rows();
    }
    pending[i].clear();

    const JointSpec& js = m.jspec[i];
    const MatX<S> wk = mul_K_S(st.k, js);  // K S
    MatX<S> wd(rows, js.dof);
    set_ab(wd, wk, w.dinv[i]);
    add_sym_abt(st.l, wd, wk);  // L += (K S) Dinv (K S)^T

    const int parent = m.tree->parent(i);
    if (parent > 0) {
      sub_abt(st.k, wk, w.ud[i]);  // K <- K (I - S Ud^T)
      rows_transform_force(x[i], st.k);
      pending[parent].push_back(std::move(st));
    } else {
      roots.push_back(std::move(st));
    }
  }

  // Assemble into global constraint ordering (copies only).
  MatX<S> lam(m.mtot, m.mtot);
  for (const auto& st : roots) {
    std::vector<int> offs(st.ee.size());
    int r = 0;
    for (std::size_t a = 0; a < st.ee.size(); ++a) {
      offs[a] = r;
      r += m.cons_k[st.ee[a]].rows();
    }
    for (std::size_t a = 0; a < st.ee.size(); ++a)
      for (std::size_t b = 0; b < st.ee.size(); ++b) {
        const int ga = m.cons_row[st.ee[a]], gb = m.cons_row[st.ee[b]];
        for (int rr = 0; rr < m.cons_k[st.ee[a]].rows(); ++rr)
          for (int cc = 0; cc < m.cons_k[st.ee[b]].rows(); ++cc)
            lam(ga + rr, gb + cc) = st.l(offs[a] + rr, offs[b] + cc);
      }
  }
  return lam;
}

// ---------------------------------------------------------------------------
// EFPA: three sweeps with per-end-effector propagators.

template <typename S>
MatX<S> efpa_t(const ModelArrays<S>& m, const double* q) {
  const auto x = fk_local(m, q);
  AbiWork<S> w = abi_init(m);

  struct Entry {
    int e;
    MatX<S> mat;
  };
  auto find = [](const std::vector<Entry>& v, int e) -> const MatX<S>& {
    for (const auto& it : v)
      if (it.e == e) return it.mat;
    throw Error(ErrorCode::InvalidArgument, "propagator lookup failed");
  };

  // cemp[i]: K relative to link i per supported end-effector; kept for
  // assembly. ks[i]: cached K S per entry, reused by the second forward
  // sweep.
  std::vector<std::vector<Entry>> cemp(m.nb + 1), ks(m.nb + 1),
      tfwd(m.nb + 1);
  for (int i = 1; i <= m.nb; ++i)
    for (int e : m.attached[i]) cemp[i].push_back({e, m.cons_k[e]});

  for (int i = m.nb; i >= 1; --i) {
    abi_step(m, x, i, w);
    if (cemp[i].empty()) continue;
    const JointSpec& js = m.jspec[i];
    const int parent = m.tree->parent(i);
    for (const auto& entry : cemp[i]) {
      MatX<S> wk = mul_K_S(entry.mat, js);
      if (parent > 0) {
        MatX<S> k2 = entry.mat;
        sub_abt(k2, wk, w.ud[i]);
        rows_transform_force(x[i], k2);
        cemp[parent].push_back({entry.e, std::move(k2)});
      }
      ks[i].push_back({entry.e, std::move(wk)});
    }
  }

  // Second forward sweep: T(i,e) = Omega(0,i) K(i,e)^T recursively.
  for (int i = 1; i <= m.nb; ++i) {
    if (cemp[i].empty()) continue;
    const JointSpec& js = m.jspec[i];
    const int parent = m.tree->parent(i);
    for (const auto& entry : cemp[i]) {
      const MatX<S>& wk = find(ks[i], entry.e);
      MatX<S> t;
      MatX<S> b(js.dof, entry.mat.rows());
      set_ab(b, w.dinv[i], wk.transposed());
      if (parent > 0) {
        t = find(tfwd[parent], entry.e);
        cols_inv_transform_motion(x[i], t);
        const MatX<S> a = product_atb(w.ud[i], t);  // Ud^T t
        s_mul_acc(a, js, t, AccMode::Sub);          // motion propagator part
        s_mul_acc(b, js, t, AccMode::Add);          // joint compliance part
      } else {
        t = MatX<S>(6, entry.mat.rows());
        s_mul_acc(b, js, t, AccMode::Set);
      }
      tfwd[i].push_back({entry.e, std::move(t)});
    }
  }

  // Assembly from the closest common ancestors.
  MatX<S> lam(m.mtot, m.mtot);
  const int ne = m.cons->size();
  for (int a = 0; a < ne; ++a)
    for (int b = a; b < ne; ++b) {
      const int c = (a == b) ? (*m.cons)[a].link : m.idx->cca(a, b);
      if (c == 0) continue;
      const MatX<S> blk = find(cemp[c], a) * find(tfwd[c], b);
      const int ra = m.cons_row[a], rb = m.cons_row[b];
      if (a == b) {
        for (int r = 0; r < blk.rows(); ++r)
          for (int s = 0; s < blk.cols(); ++s) lam(ra + r, ra + s) = blk(r, s);
      } else {
        for (int r = 0; r < blk.rows(); ++r)
          for (int s = 0; s < blk.cols(); ++s) {
            lam(ra + r, rb + s) = blk(r, s);
            lam(rb + s, ra + r) = blk(r, s);
          }
      }
    }
  return lam;
}

// ---------------------------------------------------------------------------
// PV-OSIMr: propagators composed only between branching links.

/// Links touched after the first backward sweep; used to verify that the
/// later phases never visit unsupporting links.
struct OsimrTrace {
  std::vector<int> phase_b_nodes;
  std::vector<int> phase_c_links;
  std::vector<int> phase_d_links;
};

template <typename S>
MatX<S> pv_osimr_t(const ModelArrays<S>& m, const double* q,
                   OsimrTrace* trace = nullptr) {
  const auto x = fk_local(m, q);
  AbiWork<S> w = abi_init(m);
  const IndexSets& idx = *m.idx;
  const int nb = m.nb;
  const int ne = m.cons->size();
  const int nnode = nb + ne + 1;

  // Skeleton edge of node d: force propagator from d to its closest
  // ancestral branching link plus the inverse inertia of d grounded there.
  // Edges spanning exactly one joint stay factored as (Ud, S, X) of that
  // joint; identity edges are welds seeded directly at their branching
  // link.
  struct Edge {
    MatX<S> p;            // dense 6 x w when joint < 0 and not ident
    MatX<S> om;           // w x w
    int joint = -1;       // single-joint factored form
    bool ident = false;
  };
  std::vector<Edge> edge(nnode);
  std::vector<MatX<S>> omega0(nnode), tcache(nnode);

  auto materialize = [&](int j) {
    MatX<S> p = p_loc_matrix(w.ud[j], m.jspec[j]);
    cols_transform_force(x[j], p);
    return p;
  };

  struct Cur {
    MatX<S> p;
    MatX<S> om;
    int node = -1;
    int joint = -1;       // factored single-joint propagator
    bool ident = false;
  };
  std::vector<std::vector<Cur>> pend(nb + 1);

  // First backward sweep: articulated inertias everywhere, skeleton
  // propagators along end-effector supporting paths only.
  for (int i = nb; i >= 1; --i) {
    abi_step(m, x, i, w);
    std::vector<Cur> sources;
    for (int e : m.attached[i]) {
      Cur c;
      c.node = nb + 1 + e;
      const int me = m.cons_k[e].rows();
      c.om = MatX<S>(me, me);
      if ((*m.cons)[e].kind == ConstraintKind::Weld) {
        c.ident = true;
      } else {
        c.p = m.cons_k[e].transposed();
      }
      sources.push_back(std::move(c));
    }
    for (auto& c : pend[i]) sources.push_back(std::move(c));
    pend[i].clear();
    if (sources.empty()) continue;

    Cur cur;
    if (idx.is_branching[i]) {
      for (auto& s : sources) {
        Edge& ed = edge[s.node];
        ed.p = std::move(s.p);
        ed.om = std::move(s.om);
        ed.joint = s.joint;
        ed.ident = s.ident;
      }
      cur.node = i;
      cur.om = MatX<S>(6, 6);
      cur.ident = true;
    } else {
      if (sources.size() != 1)
        throw Error(ErrorCode::InvalidArgument,
                    "support merge at a non-branching link");
      cur = std::move(sources.front());
    }

    const JointSpec& js = m.jspec[i];
    const int parent = m.tree->parent(i);
    if (cur.ident) {
      // Joint compliance lands directly on the joint's support pattern.
      add_omega_local(cur.om, w.dinv[i], js);
      Cur nxt;
      nxt.om = std::move(cur.om);
      nxt.node = cur.node;
      nxt.joint = i;
      if (parent > 0)
        pend[parent].push_back(std::move(nxt));
      else
        omega0[nxt.node] = std::move(nxt.om);
      continue;
    }
    if (cur.joint >= 0) {
      cur.p = materialize(cur.joint);
      cur.joint = -1;
    }
    const MatX<S> wj = st_mul(cur.p, js);  // S^T P
    MatX<S> wd(js.dof, wj.cols());
    set_ab(wd, w.dinv[i], wj);
    add_sym_atb(cur.om, wj, wd);  // Om += P^T S Dinv S^T P
    if (parent > 0) {
      sub_ab(cur.p, w.ud[i], wj);  // P <- (I - Ud S^T) P
      cols_transform_force(x[i], cur.p);
      pend[parent].push_back(std::move(cur));
    } else {
      omega0[cur.node] = std::move(cur.om);
    }
  }

  // Forward sweep over branching nodes: ground every node at the world.
  for (int node : idx.branching) {
    if (node == 0) continue;
    const int a = idx.anc_branch[node];
    if (a <= 0) continue;  // grounded during the backward sweep already
    if (trace) trace->phase_b_nodes.push_back(node);
    const Edge& ed = edge[node];
    MatX<S> t;  // omega0[a] * edgeP
    if (ed.ident) {
      t = omega0[a];
    } else if (ed.joint >= 0) {
      const JointSpec& js = m.jspec[ed.joint];
      t = omega0[a];
      rows_inv_transform_motion(x[ed.joint], t);  // t <- t actF
      const MatX<S> tu = t * w.ud[ed.joint];
      st_cols_acc(tu, js, t, AccMode::Sub);       // t <- t (I - Ud S^T)
    } else {
      t = MatX<S>(6, ed.p.cols());
      set_ab(t, omega0[a], ed.p);
    }
    // omega0[node] = edge om + edgeP^T t, symmetric.
    MatX<S> pt;
    if (ed.ident) {
      pt = t;
    } else if (ed.joint >= 0) {
      const JointSpec& js = m.jspec[ed.joint];
      pt = t;
      cols_inv_transform_motion(x[ed.joint], pt);
      const MatX<S> a2 = product_atb(w.ud[ed.joint], pt);
      s_mul_acc(a2, js, pt, AccMode::Sub);
    } else {
      pt = product_atb(ed.p, t);
    }
    MatX<S> om = ed.om;
    for (int r = 0; r < om.rows(); ++r)
      for (int c = 0; c <= r; ++c) {
        const S v = om(r, c) + pt(r, c);
        om(r, c) = v;
        om(c, r) = v;
      }
    omega0[node] = std::move(om);
    tcache[node] = std::move(t);
  }

  // Backward sweep over branching links: constraint-space propagators of
  // each end-effector at every ancestral branching link.
  struct KEntry {
    int link;
    MatX<S> k;
    bool ident;
  };
  std::vector<std::vector<KEntry>> kmap(ne);
  for (int e = 0; e < ne; ++e) {
    const int node = nb + 1 + e;
    int j = idx.anc_branch[node];
    if (j <= 0) continue;
    KEntry cur;
    cur.link = j;
    cur.ident = edge[node].ident;
    if (!cur.ident)
      cur.k = edge[node].joint >= 0 ? materialize(edge[node].joint).transposed()
                                    : edge[node].p.transposed();
    if (trace) trace->phase_c_links.push_back(j);
    kmap[e].push_back(cur);
    while (idx.anc_branch[j] > 0) {
      const int up = idx.anc_branch[j];
      const Edge& ej = edge[j];
      KEntry nxt;
      nxt.link = up;
      nxt.ident = false;
      if (cur.ident) {
        nxt.k = ej.joint >= 0 ? materialize(ej.joint).transposed()
                              : ej.p.transposed();
      } else if (ej.joint >= 0) {
        const JointSpec& js = m.jspec[ej.joint];
        nxt.k = cur.k;
        const MatX<S> wk = mul_K_S(nxt.k, js);
        sub_abt(nxt.k, wk, w.ud[ej.joint]);  // K <- K (I - S Ud^T)
        rows_transform_force(x[ej.joint], nxt.k);
      } else {
        nxt.k = product_abt(cur.k, ej.p);  // K P^T
      }
      if (trace) trace->phase_c_links.push_back(up);
      kmap[e].push_back(nxt);
      cur = kmap[e].back();
      j = up;
    }
  }

  auto kfind = [&](int e, int link) -> const KEntry& {
    for (const auto& it : kmap[e])
      if (it.link == link) return it;
    throw Error(ErrorCode::InvalidArgument, "missing branching propagator");
  };

  // Assemble the Delassus matrix. The grounded-acceleration maps
  // omega0[c] K^T repeat across block pairs that share the column
  // constraint and the common ancestor, so they are computed once.
  std::map<std::pair<int, int>, MatX<S>> tmap;  // (link, ee ordinal) -> t
  auto grounded_t = [&](int c, int b) -> const MatX<S>& {
    const auto key = std::make_pair(c, b);
    auto it = tmap.find(key);
    if (it != tmap.end()) return it->second;
    const KEntry& kb = kfind(b, c);
    MatX<S> t(6, m.cons_k[b].rows());
    if (kb.ident) {
      t = omega0[c];
    } else {
      set_ab(t, omega0[c], kb.k.transposed());
    }
    return tmap.emplace(key, std::move(t)).first->second;
  };

  MatX<S> lam(m.mtot, m.mtot);
  for (int a = 0; a < ne; ++a) {
    const int ra = m.cons_row[a], ma = m.cons_k[a].rows();
    // Diagonal block: the end-effector's grounded inverse inertia.
    const MatX<S>& oa = omega0[nb + 1 + a];
    for (int r = 0; r < ma; ++r)
      for (int c = 0; c < ma; ++c) lam(ra + r, ra + c) = oa(r, c);
    for (int b = a + 1; b < ne; ++b) {
      const int c = idx.cca(a, b);
      if (c == 0) continue;
      if (trace) trace->phase_d_links.push_back(c);
      const int rb = m.cons_row[b], mb = m.cons_k[b].rows();
      MatX<S> blk;
      if (c == idx.anc_branch[nb + 1 + b] && !tcache[nb + 1 + b].empty()) {
        const KEntry& ka = kfind(a, c);
        blk = ka.ident ? tcache[nb + 1 + b] : ka.k * tcache[nb + 1 + b];
      } else if (c == idx.anc_branch[nb + 1 + a] &&
                 !tcache[nb + 1 + a].empty()) {
        const KEntry& kb = kfind(b, c);
        const MatX<S> tmp =
            kb.ident ? tcache[nb + 1 + a] : kb.k * tcache[nb + 1 + a];
        blk = tmp.transposed();
      } else {
        const KEntry& ka = kfind(a, c);
        const MatX<S>& t = grounded_t(c, b);
        blk = ka.ident ? t : ka.k * t;
      }
      for (int r = 0; r < ma; ++r)
        for (int s = 0; s < mb; ++s) {
          lam(ra + r, rb + s) = blk(r, s);
          lam(rb + s, ra + r) = blk(r, s);
        }
    }
  }
  return lam;
}

}  // namespace delassus::detail
