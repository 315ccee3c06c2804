#pragma once

#include <vector>

#include "delassus/model.hpp"
#include "delassus/spatial.hpp"

namespace delassus::detail {

/// Prepared per-link joint info. axis_idx/axis_sign capture axis-aligned
/// revolute/prismatic joints whose motion-subspace products reduce to row
/// or column selection. All of this is configuration independent.
struct JointSpec {
  JointKind kind = JointKind::Revolute;
  Vec3<double> axis{0, 0, 1};
  int axis_idx = -1;    // 0/1/2 when axis == +-e_k, else -1
  double axis_sign = 1.0;
  int dof = 1;
  int q_offset = 0;
  int dof_offset = 0;
};

inline JointSpec make_joint_spec(const JointModel& j, int q_off, int dof_off) {
  JointSpec s;
  s.kind = j.kind;
  s.axis = j.axis;
  s.dof = j.dof();
  s.q_offset = q_off;
  s.dof_offset = dof_off;
  if (j.kind == JointKind::Revolute || j.kind == JointKind::Prismatic) {
    const auto a = j.axis;
    auto near = [](double v, double t) { return std::abs(v - t) < 1e-14; };
    if (near(a.y, 0) && near(a.z, 0) && near(std::abs(a.x), 1)) {
      s.axis_idx = 0;
      s.axis_sign = a.x > 0 ? 1.0 : -1.0;
    } else if (near(a.x, 0) && near(a.z, 0) && near(std::abs(a.y), 1)) {
      s.axis_idx = 1;
      s.axis_sign = a.y > 0 ? 1.0 : -1.0;
    } else if (near(a.x, 0) && near(a.y, 0) && near(std::abs(a.z), 1)) {
      s.axis_idx = 2;
      s.axis_sign = a.z > 0 ? 1.0 : -1.0;
    }
  }
  return s;
}

template <typename S>
Mat3<S> quat_to_rot(S w, S x, S y, S z) {
  Mat3<S> r;
  const S two(2);
  const S xx = x * x, yy = y * y, zz = z * z;
  const S xy = x * y, xz = x * z, yz = y * z;
  const S wx = w * x, wy = w * y, wz = w * z;
  r(0, 0) = S(1) - two * (yy + zz);
  r(0, 1) = two * (xy - wz);
  r(0, 2) = two * (xz + wy);
  r(1, 0) = two * (xy + wz);
  r(1, 1) = S(1) - two * (xx + zz);
  r(1, 2) = two * (yz - wx);
  r(2, 0) = two * (xz - wy);
  r(2, 1) = two * (yz + wx);
  r(2, 2) = S(1) - two * (xx + yy);
  return r;
}

/// Joint transform (child frame in the joint's fixed frame) at q.
template <typename S>
Transform<S> joint_transform(const JointSpec& js, const double* q) {
  Transform<S> x;
  using std::cos;
  using std::sin;
  switch (js.kind) {
    case JointKind::Revolute: {
      if (js.axis_idx >= 0) {
        // Angle folding of the axis sign costs nothing at run time.
        const double ang = js.axis_sign * q[js.q_offset];
        const S c = cos(S(ang)), s = sin(S(ang));
        x.R = Mat3<S>::identity();
        const int k = js.axis_idx;
        const int u = (k + 1) % 3, v = (k + 2) % 3;
        x.R(u, u) = c;
        x.R(u, v) = -s;
        x.R(v, u) = s;
        x.R(v, v) = c;
        x.rtag = (k == 2) ? RotTag::AxisZ : RotTag::General;
      } else {
        const S c = cos(S(q[js.q_offset])), s = sin(S(q[js.q_offset]));
        const S vq = S(1) - c;
        const S ax(js.axis.x), ay(js.axis.y), az(js.axis.z);
        x.R(0, 0) = c + vq * ax * ax;
        x.R(0, 1) = vq * ax * ay - s * az;
        x.R(0, 2) = vq * ax * az + s * ay;
        x.R(1, 0) = vq * ax * ay + s * az;
        x.R(1, 1) = c + vq * ay * ay;
        x.R(1, 2) = vq * ay * az - s * ax;
        x.R(2, 0) = vq * ax * az - s * ay;
        x.R(2, 1) = vq * ay * az + s * ax;
        x.R(2, 2) = c + vq * az * az;
        x.rtag = RotTag::General;
      }
      break;
    }
    case JointKind::Prismatic: {
      if (js.axis_idx >= 0) {
        const double d = js.axis_sign * q[js.q_offset];
        if (js.axis_idx == 0) {
          x.p.x = S(d);
          x.ttag = TransTag::AxisX;
        } else if (js.axis_idx == 1) {
          x.p.y = S(d);
          x.ttag = TransTag::AxisY;
        } else {
          x.p.z = S(d);
          x.ttag = TransTag::AxisZ;
        }
      } else {
        const S d(q[js.q_offset]);
        x.p = Vec3<S>{S(js.axis.x) * d, S(js.axis.y) * d, S(js.axis.z) * d};
        x.ttag = TransTag::General;
      }
      break;
    }
    case JointKind::Spherical: {
      const double* p = q + js.q_offset;
      x.R = quat_to_rot(S(p[0]), S(p[1]), S(p[2]), S(p[3]));
      x.rtag = RotTag::General;
      break;
    }
    case JointKind::FreeFlyer: {
      const double* p = q + js.q_offset;
      x.R = quat_to_rot(S(p[0]), S(p[1]), S(p[2]), S(p[3]));
      x.rtag = RotTag::General;
      x.p = Vec3<S>{S(p[4]), S(p[5]), S(p[6])};
      x.ttag = TransTag::General;
      break;
    }
    default:
      break;
  }
  return x;
}

/// U = H S, 6 x dof. Axis-aligned single-DoF joints are column picks.
template <typename S>
MatX<S> mul_H_S(const Mat6<S>& h, const JointSpec& js) {
  MatX<S> u(6, js.dof);
  switch (js.kind) {
    case JointKind::Revolute:
    case JointKind::Prismatic: {
      const int base = js.kind == JointKind::Revolute ? 0 : 3;
      if (js.axis_idx >= 0) {
        const int c = base + js.axis_idx;
        if (js.axis_sign > 0)
          for (int r = 0; r < 6; ++r) u(r, 0) = h(r, c);
        else
          for (int r = 0; r < 6; ++r) u(r, 0) = -h(r, c);
      } else {
        const S ax(js.axis.x), ay(js.axis.y), az(js.axis.z);
        for (int r = 0; r < 6; ++r)
          u(r, 0) = h(r, base) * ax + h(r, base + 1) * ay + h(r, base + 2) * az;
      }
      break;
    }
    case JointKind::Spherical:
      for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 3; ++c) u(r, c) = h(r, c);
      break;
    case JointKind::FreeFlyer:
      for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) u(r, c) = h(r, c);
      break;
    default:
      break;
  }
  return u;
}

/// D = S^T U, dof x dof (symmetric since U = H S with H symmetric).
template <typename S>
MatX<S> project_D(const MatX<S>& u, const JointSpec& js) {
  MatX<S> d(js.dof, js.dof);
  switch (js.kind) {
    case JointKind::Revolute:
    case JointKind::Prismatic: {
      const int base = js.kind == JointKind::Revolute ? 0 : 3;
      if (js.axis_idx >= 0) {
        d(0, 0) = js.axis_sign > 0 ? u(base + js.axis_idx, 0)
                                   : -u(base + js.axis_idx, 0);
      } else {
        d(0, 0) = S(js.axis.x) * u(base, 0) + S(js.axis.y) * u(base + 1, 0) +
                  S(js.axis.z) * u(base + 2, 0);
      }
      break;
    }
    case JointKind::Spherical:
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) d(r, c) = u(r, c);
      break;
    case JointKind::FreeFlyer:
      for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) d(r, c) = u(r, c);
      break;
    default:
      break;
  }
  return d;
}

/// S^T A for a 6 x w matrix, giving dof x w.
template <typename S>
MatX<S> st_mul(const MatX<S>& a, const JointSpec& js) {
  const int w = a.cols();
  MatX<S> r(js.dof, w);
  switch (js.kind) {
    case JointKind::Revolute:
    case JointKind::Prismatic: {
      const int base = js.kind == JointKind::Revolute ? 0 : 3;
      if (js.axis_idx >= 0) {
        const int row = base + js.axis_idx;
        if (js.axis_sign > 0)
          for (int c = 0; c < w; ++c) r(0, c) = a(row, c);
        else
          for (int c = 0; c < w; ++c) r(0, c) = -a(row, c);
      } else {
        const S ax(js.axis.x), ay(js.axis.y), az(js.axis.z);
        for (int c = 0; c < w; ++c)
          r(0, c) =
              ax * a(base, c) + ay * a(base + 1, c) + az * a(base + 2, c);
      }
      break;
    }
    case JointKind::Spherical:
      for (int i = 0; i < 3; ++i)
        for (int c = 0; c < w; ++c) r(i, c) = a(i, c);
      break;
    case JointKind::FreeFlyer:
      for (int i = 0; i < 6; ++i)
        for (int c = 0; c < w; ++c) r(i, c) = a(i, c);
      break;
    default:
      break;
  }
  return r;
}

/// K S for an m x 6 matrix, giving m x dof.
template <typename S>
MatX<S> mul_K_S(const MatX<S>& k, const JointSpec& js) {
  const int m = k.rows();
  MatX<S> r(m, js.dof);
  switch (js.kind) {
    case JointKind::Revolute:
    case JointKind::Prismatic: {
      const int base = js.kind == JointKind::Revolute ? 0 : 3;
      if (js.axis_idx >= 0) {
        const int col = base + js.axis_idx;
        if (js.axis_sign > 0)
          for (int i = 0; i < m; ++i) r(i, 0) = k(i, col);
        else
          for (int i = 0; i < m; ++i) r(i, 0) = -k(i, col);
      } else {
        const S ax(js.axis.x), ay(js.axis.y), az(js.axis.z);
        for (int i = 0; i < m; ++i)
          r(i, 0) =
              k(i, base) * ax + k(i, base + 1) * ay + k(i, base + 2) * az;
      }
      break;
    }
    case JointKind::Spherical:
      for (int i = 0; i < m; ++i)
        for (int c = 0; c < 3; ++c) r(i, c) = k(i, c);
      break;
    case JointKind::FreeFlyer:
      for (int i = 0; i < m; ++i)
        for (int c = 0; c < 6; ++c) r(i, c) = k(i, c);
      break;
    default:
      break;
  }
  return r;
}

/// S^T as an explicit dof x 6 matrix (constants only).
template <typename S>
MatX<S> st_matrix(const JointSpec& js) {
  MatX<S> r(js.dof, 6);
  switch (js.kind) {
    case JointKind::Revolute:
    case JointKind::Prismatic: {
      const int base = js.kind == JointKind::Revolute ? 0 : 3;
      if (js.axis_idx >= 0) {
        r(0, base + js.axis_idx) = S(js.axis_sign);
      } else {
        r(0, base) = S(js.axis.x);
        r(0, base + 1) = S(js.axis.y);
        r(0, base + 2) = S(js.axis.z);
      }
      break;
    }
    case JointKind::Spherical:
      for (int i = 0; i < 3; ++i) r(i, i) = S(1);
      break;
    case JointKind::FreeFlyer:
      for (int i = 0; i < 6; ++i) r(i, i) = S(1);
      break;
    default:
      break;
  }
  return r;
}

enum class AccMode { Add, Sub, Set };

/// out (+=|-=|=) S N for a dof x w matrix N; touches only the support rows
/// of S. Set mode assumes the untouched rows are already correct.
template <typename S>
void s_mul_acc(const MatX<S>& n, const JointSpec& js, MatX<S>& out,
               AccMode mode) {
  const int w = n.cols();
  auto acc = [&](int row, int nr, bool neg) {
    for (int c = 0; c < w; ++c) {
      switch (mode) {
        case AccMode::Add:
          if (neg)
            out(row, c) -= n(nr, c);
          else
            out(row, c) += n(nr, c);
          break;
        case AccMode::Sub:
          if (neg)
            out(row, c) += n(nr, c);
          else
            out(row, c) -= n(nr, c);
          break;
        case AccMode::Set:
          out(row, c) = neg ? -n(nr, c) : n(nr, c);
          break;
      }
    }
  };
  auto acc_scaled = [&](int row, const S& f, int nr) {
    for (int c = 0; c < w; ++c) {
      switch (mode) {
        case AccMode::Add:
          out(row, c) += f * n(nr, c);
          break;
        case AccMode::Sub:
          out(row, c) -= f * n(nr, c);
          break;
        case AccMode::Set:
          out(row, c) = f * n(nr, c);
          break;
      }
    }
  };
  switch (js.kind) {
    case JointKind::Revolute:
    case JointKind::Prismatic: {
      const int base = js.kind == JointKind::Revolute ? 0 : 3;
      if (js.axis_idx >= 0) {
        acc(base + js.axis_idx, 0, js.axis_sign < 0);
      } else {
        acc_scaled(base, S(js.axis.x), 0);
        acc_scaled(base + 1, S(js.axis.y), 0);
        acc_scaled(base + 2, S(js.axis.z), 0);
      }
      break;
    }
    case JointKind::Spherical:
      for (int i = 0; i < 3; ++i) acc(i, i, false);
      break;
    case JointKind::FreeFlyer:
      for (int i = 0; i < 6; ++i) acc(i, i, false);
      break;
    default:
      break;
  }
}

/// out (+=|-=) N S^T for an r x dof matrix N; touches only the support
/// columns of S.
template <typename S>
void st_cols_acc(const MatX<S>& n, const JointSpec& js, MatX<S>& out,
                 AccMode mode) {
  const int r = n.rows();
  auto acc = [&](int col, int nc, bool neg) {
    for (int i = 0; i < r; ++i) {
      const bool minus = (mode == AccMode::Sub) != neg;
      if (minus)
        out(i, col) -= n(i, nc);
      else
        out(i, col) += n(i, nc);
    }
  };
  auto acc_scaled = [&](int col, const S& f, int nc) {
    for (int i = 0; i < r; ++i) {
      if (mode == AccMode::Sub)
        out(i, col) -= f * n(i, nc);
      else
        out(i, col) += f * n(i, nc);
    }
  };
  switch (js.kind) {
    case JointKind::Revolute:
    case JointKind::Prismatic: {
      const int base = js.kind == JointKind::Revolute ? 0 : 3;
      if (js.axis_idx >= 0) {
        acc(base + js.axis_idx, 0, js.axis_sign < 0);
      } else {
        acc_scaled(base, S(js.axis.x), 0);
        acc_scaled(base + 1, S(js.axis.y), 0);
        acc_scaled(base + 2, S(js.axis.z), 0);
      }
      break;
    }
    case JointKind::Spherical:
      for (int i = 0; i < 3; ++i) acc(i, i, false);
      break;
    case JointKind::FreeFlyer:
      for (int i = 0; i < 6; ++i) acc(i, i, false);
      break;
    default:
      break;
  }
}

/// om += S Dinv S^T, exploiting the joint's support pattern.
template <typename S>
void add_omega_local(MatX<S>& om, const MatX<S>& dinv, const JointSpec& js) {
  switch (js.kind) {
    case JointKind::Revolute:
    case JointKind::Prismatic: {
      const int base = js.kind == JointKind::Revolute ? 0 : 3;
      if (js.axis_idx >= 0) {
        const int r = base + js.axis_idx;
        om(r, r) += dinv(0, 0);  // sign squared
      } else {
        const S da[3] = {dinv(0, 0) * S(js.axis.x), dinv(0, 0) * S(js.axis.y),
                         dinv(0, 0) * S(js.axis.z)};
        const S ax[3] = {S(js.axis.x), S(js.axis.y), S(js.axis.z)};
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j <= i; ++j) {
            const S v = om(base + i, base + j) + da[i] * ax[j];
            om(base + i, base + j) = v;
            om(base + j, base + i) = v;
          }
      }
      break;
    }
    case JointKind::Spherical:
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j <= i; ++j) {
          const S v = om(i, j) + dinv(i, j);
          om(i, j) = v;
          om(j, i) = v;
        }
      break;
    case JointKind::FreeFlyer:
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j <= i; ++j) {
          const S v = om(i, j) + dinv(i, j);
          om(i, j) = v;
          om(j, i) = v;
        }
      break;
    default:
      break;
  }
}

/// I - Ud S^T materialized as a dense 6x6, exploiting S's pattern.
template <typename S>
MatX<S> p_loc_matrix(const MatX<S>& ud, const JointSpec& js) {
  MatX<S> p = MatX<S>::identity(6);
  switch (js.kind) {
    case JointKind::Revolute:
    case JointKind::Prismatic: {
      const int base = js.kind == JointKind::Revolute ? 0 : 3;
      if (js.axis_idx >= 0) {
        const int c = base + js.axis_idx;
        if (js.axis_sign > 0)
          for (int r = 0; r < 6; ++r)
            if (r == c)
              p(r, c) = S(1) - ud(r, 0);
            else
              p(r, c) = -ud(r, 0);
        else
          for (int r = 0; r < 6; ++r)
            if (r == c)
              p(r, c) = S(1) + ud(r, 0);
            else
              p(r, c) = ud(r, 0);
      } else {
        const S ax[3] = {S(js.axis.x), S(js.axis.y), S(js.axis.z)};
        for (int c = 0; c < 3; ++c)
          for (int r = 0; r < 6; ++r) {
            const S term = ud(r, 0) * ax[c];
            if (r == base + c)
              p(r, base + c) = S(1) - term;
            else
              p(r, base + c) = -term;
          }
      }
      break;
    }
    case JointKind::Spherical:
      for (int c = 0; c < 3; ++c)
        for (int r = 0; r < 6; ++r) {
          if (r == c)
            p(r, c) = S(1) - ud(r, c);
          else
            p(r, c) = -ud(r, c);
        }
      break;
    case JointKind::FreeFlyer:
      for (int c = 0; c < 6; ++c)
        for (int r = 0; r < 6; ++r) {
          if (r == c)
            p(r, c) = S(1) - ud(r, c);
          else
            p(r, c) = -ud(r, c);
        }
      break;
    default:
      break;
  }
  return p;
}

}  // namespace delassus::detail
