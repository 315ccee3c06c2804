#pragma once

#include <cstdint>

#include "delassus/linalg.hpp"
#include "delassus/scalar.hpp"

namespace delassus {

// 6-D spatial algebra, angular components first, linear second. A motion
// vector is (omega, v) and a force vector is (moment, force); the dual
// pairing <f, m> = moment.omega + force.v is frame invariant.

template <typename S>
struct Vec3 {
  S x{0}, y{0}, z{0};

  Vec3() = default;
  Vec3(S a, S b, S c) : x(a), y(b), z(c) {}

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(S s) const { return {x * s, y * s, z * s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }

  S dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
};

template <typename S>
struct Mat3 {
  S m[3][3] = {{S(0), S(0), S(0)}, {S(0), S(0), S(0)}, {S(0), S(0), S(0)}};

  static Mat3 identity() {
    Mat3 r;
    r.m[0][0] = r.m[1][1] = r.m[2][2] = S(1);
    return r;
  }

  S& operator()(int i, int j) { return m[i][j]; }
  const S& operator()(int i, int j) const { return m[i][j]; }

  Mat3 transposed() const {
    Mat3 t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t.m[i][j] = m[j][i];
    return t;
  }

  Vec3<S> operator*(const Vec3<S>& v) const {
    return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
  }

  Mat3 operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        r.m[i][j] =
            m[i][0] * o.m[0][j] + m[i][1] * o.m[1][j] + m[i][2] * o.m[2][j];
    return r;
  }
};

template <typename S>
struct Motion {
  Vec3<S> ang, lin;
};

template <typename S>
struct Force {
  Vec3<S> ang, lin;  // ang = moment about the frame origin
};

template <typename S>
S dual_pairing(const Force<S>& f, const Motion<S>& m) {
  return f.ang.dot(m.ang) + f.lin.dot(m.lin);
}

/// Structural pattern of a rotation matrix, fixed by topology (never by q),
/// so metered operation counts stay configuration independent.
enum class RotTag : std::uint8_t {
  Identity,
  AxisZ,  // rotation about z: last row/column are (0,0,1)
  General
};

/// Structural pattern of a translation vector.
enum class TransTag : std::uint8_t { Zero, AxisX, AxisY, AxisZ, General };

/// Rigid placement of a child frame in a parent frame: x_parent = R x_child + p.
template <typename S>
struct Transform {
  Mat3<S> R = Mat3<S>::identity();
  Vec3<S> p;
  RotTag rtag = RotTag::Identity;
  TransTag ttag = TransTag::Zero;

  static Transform identity() { return {}; }
};

namespace tags {
inline RotTag combine(RotTag a, RotTag b) {
  if (a == RotTag::Identity) return b;
  if (b == RotTag::Identity) return a;
  if (a == RotTag::AxisZ && b == RotTag::AxisZ) return RotTag::AxisZ;
  return RotTag::General;
}
}  // namespace tags

template <typename S>
Vec3<S> rotate(const Transform<S>& x, const Vec3<S>& v) {
  switch (x.rtag) {
    case RotTag::Identity:
      return v;
    case RotTag::AxisZ:
      return {x.R(0, 0) * v.x + x.R(0, 1) * v.y,
              x.R(1, 0) * v.x + x.R(1, 1) * v.y, v.z};
    default:
      return x.R * v;
  }
}

template <typename S>
Vec3<S> rotate_transpose(const Transform<S>& x, const Vec3<S>& v) {
  switch (x.rtag) {
    case RotTag::Identity:
      return v;
    case RotTag::AxisZ:
      return {x.R(0, 0) * v.x + x.R(1, 0) * v.y,
              x.R(0, 1) * v.x + x.R(1, 1) * v.y, v.z};
    default:
      return {x.R(0, 0) * v.x + x.R(1, 0) * v.y + x.R(2, 0) * v.z,
              x.R(0, 1) * v.x + x.R(1, 1) * v.y + x.R(2, 1) * v.z,
              x.R(0, 2) * v.x + x.R(1, 2) * v.y + x.R(2, 2) * v.z};
  }
}

/// io += p x v, skipping the structurally zero component for axis patterns.
template <typename S>
void add_cross_p(const Transform<S>& x, const Vec3<S>& v, Vec3<S>& io) {
  switch (x.ttag) {
    case TransTag::Zero:
      return;
    case TransTag::AxisX:
      io.y -= x.p.x * v.z;
      io.z += x.p.x * v.y;
      return;
    case TransTag::AxisY:
      io.x += x.p.y * v.z;
      io.z -= x.p.y * v.x;
      return;
    case TransTag::AxisZ:
      io.x -= x.p.z * v.y;
      io.y += x.p.z * v.x;
      return;
    default:
      io.x += x.p.y * v.z - x.p.z * v.y;
      io.y += x.p.z * v.x - x.p.x * v.z;
      io.z += x.p.x * v.y - x.p.y * v.x;
      return;
  }
}

template <typename S>
void sub_cross_p(const Transform<S>& x, const Vec3<S>& v, Vec3<S>& io) {
  switch (x.ttag) {
    case TransTag::Zero:
      return;
    case TransTag::AxisX:
      io.y += x.p.x * v.z;
      io.z -= x.p.x * v.y;
      return;
    case TransTag::AxisY:
      io.x -= x.p.y * v.z;
      io.z += x.p.y * v.x;
      return;
    case TransTag::AxisZ:
      io.x += x.p.z * v.y;
      io.y -= x.p.z * v.x;
      return;
    default:
      io.x -= x.p.y * v.z - x.p.z * v.y;
      io.y -= x.p.z * v.x - x.p.x * v.z;
      io.z -= x.p.x * v.y - x.p.y * v.x;
      return;
  }
}

/// Motion vector of the child frame expressed in the parent frame.
template <typename S>
Motion<S> transform_motion(const Transform<S>& x, const Motion<S>& m) {
  Motion<S> r;
  r.ang = rotate(x, m.ang);
  r.lin = rotate(x, m.lin);
  add_cross_p(x, r.ang, r.lin);
  return r;
}

/// Force acting at the child frame expressed in the parent frame.
template <typename S>
Force<S> transform_force(const Transform<S>& x, const Force<S>& f) {
  Force<S> r;
  r.lin = rotate(x, f.lin);
  r.ang = rotate(x, f.ang);
  add_cross_p(x, r.lin, r.ang);
  return r;
}

/// Inverse action: parent-frame motion expressed in the child frame.
template <typename S>
Motion<S> inv_transform_motion(const Transform<S>& x, const Motion<S>& m) {
  Vec3<S> t = m.lin;
  sub_cross_p(x, m.ang, t);
  return {rotate_transpose(x, m.ang), rotate_transpose(x, t)};
}

template <typename S>
Force<S> inv_transform_force(const Transform<S>& x, const Force<S>& f) {
  Vec3<S> t = f.ang;
  sub_cross_p(x, f.lin, t);
  return {rotate_transpose(x, t), rotate_transpose(x, f.lin)};
}

/// Composition: placement of c in a given c-in-b (x2) and b-in-a (x1).
template <typename S>
Transform<S> compose(const Transform<S>& x1, const Transform<S>& x2) {
  Transform<S> r;
  switch (tags::combine(x1.rtag, x2.rtag)) {
    case RotTag::Identity:
      r.R = Mat3<S>::identity();
      r.rtag = RotTag::Identity;
      break;
    case RotTag::AxisZ: {
      if (x1.rtag == RotTag::Identity) {
        r.R = x2.R;
      } else if (x2.rtag == RotTag::Identity) {
        r.R = x1.R;
      } else {
        r.R = Mat3<S>::identity();
        r.R(0, 0) = x1.R(0, 0) * x2.R(0, 0) + x1.R(0, 1) * x2.R(1, 0);
        r.R(0, 1) = x1.R(0, 0) * x2.R(0, 1) + x1.R(0, 1) * x2.R(1, 1);
        r.R(1, 0) = x1.R(1, 0) * x2.R(0, 0) + x1.R(1, 1) * x2.R(1, 0);
        r.R(1, 1) = x1.R(1, 0) * x2.R(0, 1) + x1.R(1, 1) * x2.R(1, 1);
        r.R(2, 2) = S(1);
      }
      r.rtag = RotTag::AxisZ;
      break;
    }
    default:
      r.R = x1.R * x2.R;
      r.rtag = RotTag::General;
      break;
  }
  if (x2.ttag == TransTag::Zero) {
    r.p = x1.p;
    r.ttag = x1.ttag;
  } else if (x1.ttag == TransTag::Zero && x1.rtag == RotTag::Identity) {
    r.p = x2.p;
    r.ttag = x2.ttag;
  } else {
    r.p = x1.p + rotate(x1, x2.p);
    r.ttag = TransTag::General;
  }
  return r;
}

template <typename S>
Transform<S> inverse(const Transform<S>& x) {
  Transform<S> r;
  r.R = x.R.transposed();
  r.rtag = x.rtag;
  if (x.ttag == TransTag::Zero) {
    r.ttag = TransTag::Zero;
    return r;
  }
  r.p = -rotate_transpose(x, x.p);
  if (x.rtag == RotTag::Identity) {
    r.ttag = x.ttag;
  } else if (x.rtag == RotTag::AxisZ && x.ttag == TransTag::AxisZ) {
    r.ttag = TransTag::AxisZ;
  } else {
    r.ttag = TransTag::General;
  }
  return r;
}

/// Symmetric 6x6 used for articulated-body inertias and inverse inertias.
/// Stored dense; symmetric update helpers write the lower triangle and
/// mirror by copy.
template <typename S>
struct Mat6 {
  S m[6][6] = {};

  static Mat6 identity() {
    Mat6 r;
    for (int i = 0; i < 6; ++i) r.m[i][i] = S(1);
    return r;
  }

  S& operator()(int i, int j) { return m[i][j]; }
  const S& operator()(int i, int j) const { return m[i][j]; }

  Mat6 operator+(const Mat6& o) const {
    Mat6 r;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) r.m[i][j] = m[i][j] + o.m[i][j];
    return r;
  }

  Mat6 operator-(const Mat6& o) const {
    Mat6 r;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) r.m[i][j] = m[i][j] - o.m[i][j];
    return r;
  }

  Mat6 operator*(const Mat6& o) const {
    Mat6 r;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        S s = m[i][0] * o.m[0][j];
        for (int k = 1; k < 6; ++k) s += m[i][k] * o.m[k][j];
        r.m[i][j] = s;
      }
    return r;
  }

  Mat6 transposed() const {
    Mat6 t;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) t.m[i][j] = m[j][i];
    return t;
  }

  MatX<S> to_matx() const {
    MatX<S> a(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) a(i, j) = m[i][j];
    return a;
  }

  static Mat6 from_matx(const MatX<S>& a) {
    Mat6 r;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) r.m[i][j] = a(i, j);
    return r;
  }
};

/// Rigid-body inertia: mass, center of mass in the link frame, rotational
/// inertia about the center of mass.
template <typename S>
struct SpatialInertia {
  S mass{0};
  Vec3<S> com;
  Mat3<S> rot_inertia;  // symmetric, about the CoM

  /// Dense 6x6 about the frame origin (angular-first):
  ///   [ I_c - m cx cx   m cx ]
  ///   [ -m cx           m 1  ]
  Mat6<S> to_mat6() const {
    Mat6<S> h;
    const S mx = mass * com.x, my = mass * com.y, mz = mass * com.z;
    const S cxx = com.x * mx, cyy = com.y * my, czz = com.z * mz;
    const S cxy = com.x * my, cxz = com.x * mz, cyz = com.y * mz;
    // I_c - m cx cx  (cx is skew(com))
    h(0, 0) = rot_inertia(0, 0) + cyy + czz;
    h(1, 1) = rot_inertia(1, 1) + cxx + czz;
    h(2, 2) = rot_inertia(2, 2) + cxx + cyy;
    h(0, 1) = rot_inertia(0, 1) - cxy;
    h(0, 2) = rot_inertia(0, 2) - cxz;
    h(1, 2) = rot_inertia(1, 2) - cyz;
    h(1, 0) = h(0, 1);
    h(2, 0) = h(0, 2);
    h(2, 1) = h(1, 2);
    // m cx and its transpose
    h(0, 4) = -mz;
    h(0, 5) = my;
    h(1, 3) = mz;
    h(1, 5) = -mx;
    h(2, 3) = -my;
    h(2, 4) = mx;
    h(4, 0) = -mz;
    h(5, 0) = my;
    h(3, 1) = mz;
    h(5, 1) = -mx;
    h(3, 2) = -my;
    h(4, 2) = mx;
    h(3, 3) = mass;
    h(4, 4) = mass;
    h(5, 5) = mass;
    return h;
  }
};

namespace detail {
// q = p x M (cross product applied to each column of a 3x3), tag aware.
template <typename S>
Mat3<S> crossmat_mul(const Transform<S>& x, const Mat3<S>& a) {
  Mat3<S> r;
  for (int j = 0; j < 3; ++j) {
    Vec3<S> col{a(0, j), a(1, j), a(2, j)};
    Vec3<S> out;
    add_cross_p(x, col, out);
    r(0, j) = out.x;
    r(1, j) = out.y;
    r(2, j) = out.z;
  }
  return r;
}

template <typename S>
Mat3<S> rot_mat3(const Transform<S>& x, const Mat3<S>& a) {
  Mat3<S> r;
  for (int j = 0; j < 3; ++j) {
    Vec3<S> col = rotate(x, Vec3<S>{a(0, j), a(1, j), a(2, j)});
    r(0, j) = col.x;
    r(1, j) = col.y;
    r(2, j) = col.z;
  }
  return r;
}

// a R^T for the transform's rotation, tag aware (columns of the result are
// R applied to the rows of a^T, i.e. result = (R a^T)^T).
template <typename S>
Mat3<S> mat3_rot_t(const Transform<S>& x, const Mat3<S>& a) {
  Mat3<S> r;
  for (int i = 0; i < 3; ++i) {
    Vec3<S> row = rotate(x, Vec3<S>{a(i, 0), a(i, 1), a(i, 2)});
    r(i, 0) = row.x;
    r(i, 1) = row.y;
    r(i, 2) = row.z;
  }
  return r;
}
}  // namespace detail

/// Congruence transform of a symmetric 6x6 inertia-like matrix from the
/// child frame to the parent frame, accumulated into dst:
///   dst += Xf H Xm^-1
/// where Xm/Xf are the motion/force actions of x. Used by both the
/// articulated-body and composite-rigid-body sweeps.
template <typename S>
void add_abi_to_parent(const Transform<S>& x, const Mat6<S>& h, Mat6<S>& dst) {
  // Blocks of h: [A B; B^T C], A and C symmetric.
  Mat3<S> a, b, c;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      a(i, j) = h(i, j);
      b(i, j) = h(i, j + 3);
      c(i, j) = h(i + 3, j + 3);
    }
  // Rotate: X -> R X R^T.
  if (x.rtag != RotTag::Identity) {
    a = detail::mat3_rot_t(x, detail::rot_mat3(x, a));
    b = detail::mat3_rot_t(x, detail::rot_mat3(x, b));
    c = detail::mat3_rot_t(x, detail::rot_mat3(x, c));
  }
  // Translate: A += px B^T + (px B^T)^T + px C px^T, B += px C.
  if (x.ttag != TransTag::Zero) {
    const Mat3<S> z = detail::crossmat_mul(x, b.transposed());
    const Mat3<S> w = detail::crossmat_mul(x, c);
    const Mat3<S> v = detail::crossmat_mul(x, w.transposed());
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j <= i; ++j) {
        const S val = a(i, j) + z(i, j) + z(j, i) + v(j, i);
        a(i, j) = val;
        a(j, i) = val;
      }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) b(i, j) += w(i, j);
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      dst(i, j) += a(i, j);
      dst(i, j + 3) += b(i, j);
      dst(j + 3, i) += b(i, j);
      dst(i + 3, j + 3) += c(i, j);
    }
}

/// Applies the force action of x to every row of a (rows are spatial force
/// covectors, layout [ang | lin]).
template <typename S>
void rows_transform_force(const Transform<S>& x, MatX<S>& a) {
  assert(a.cols() == 6);
  for (int r = 0; r < a.rows(); ++r) {
    S* d = a.row_ptr(r);
    Force<S> f{{d[0], d[1], d[2]}, {d[3], d[4], d[5]}};
    f = transform_force(x, f);
    d[0] = f.ang.x;
    d[1] = f.ang.y;
    d[2] = f.ang.z;
    d[3] = f.lin.x;
    d[4] = f.lin.y;
    d[5] = f.lin.z;
  }
}

/// Applies the force action of x to every column of a (6 x w).
template <typename S>
void cols_transform_force(const Transform<S>& x, MatX<S>& a) {
  assert(a.rows() == 6);
  for (int c = 0; c < a.cols(); ++c) {
    Force<S> f{{a(0, c), a(1, c), a(2, c)}, {a(3, c), a(4, c), a(5, c)}};
    f = transform_force(x, f);
    a(0, c) = f.ang.x;
    a(1, c) = f.ang.y;
    a(2, c) = f.ang.z;
    a(3, c) = f.lin.x;
    a(4, c) = f.lin.y;
    a(5, c) = f.lin.z;
  }
}

/// Applies the inverse motion action of x to every column of a (6 x w).
template <typename S>
void cols_inv_transform_motion(const Transform<S>& x, MatX<S>& a) {
  assert(a.rows() == 6);
  for (int c = 0; c < a.cols(); ++c) {
    Motion<S> m{{a(0, c), a(1, c), a(2, c)}, {a(3, c), a(4, c), a(5, c)}};
    m = inv_transform_motion(x, m);
    a(0, c) = m.ang.x;
    a(1, c) = m.ang.y;
    a(2, c) = m.ang.z;
    a(3, c) = m.lin.x;
    a(4, c) = m.lin.y;
    a(5, c) = m.lin.z;
  }
}

/// Applies the inverse motion action of x to every row of a (w x 6), i.e.
/// right-multiplies a by the force action of x.
template <typename S>
void rows_inv_transform_motion(const Transform<S>& x, MatX<S>& a) {
  assert(a.cols() == 6);
  for (int r = 0; r < a.rows(); ++r) {
    S* d = a.row_ptr(r);
    Motion<S> m{{d[0], d[1], d[2]}, {d[3], d[4], d[5]}};
    m = inv_transform_motion(x, m);
    d[0] = m.ang.x;
    d[1] = m.ang.y;
    d[2] = m.ang.z;
    d[3] = m.lin.x;
    d[4] = m.lin.y;
    d[5] = m.lin.z;
  }
}

using Real = double;
using Matrix = MatX<double>;

}  // namespace delassus
