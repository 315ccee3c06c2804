#pragma once

#include <Eigen/Dense>
#include <random>

#include "delassus/model.hpp"
#include "delassus/spatial.hpp"

namespace testutil {

using delassus::Matrix;

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  return e;
}

inline Eigen::MatrixXd to_eigen(const delassus::Mat6<double>& m) {
  Eigen::MatrixXd e(6, 6);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) e(r, c) = m(r, c);
  return e;
}

inline Eigen::Matrix3d to_eigen(const delassus::Mat3<double>& m) {
  Eigen::Matrix3d e;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) e(r, c) = m(r, c);
  return e;
}

inline Eigen::Vector3d to_eigen(const delassus::Vec3<double>& v) {
  return {v.x, v.y, v.z};
}

/// Dense 6x6 motion action of a placement: [R 0; px R R], angular first.
inline Eigen::MatrixXd motion_matrix(const delassus::Transform<double>& x) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(6, 6);
  const Eigen::Matrix3d r = to_eigen(x.R);
  Eigen::Matrix3d px;
  px << 0, -x.p.z, x.p.y, x.p.z, 0, -x.p.x, -x.p.y, x.p.x, 0;
  m.topLeftCorner(3, 3) = r;
  m.bottomLeftCorner(3, 3) = px * r;
  m.bottomRightCorner(3, 3) = r;
  return m;
}

/// Dense 6x6 force action: [R px R; 0 R] = motion^-T.
inline Eigen::MatrixXd force_matrix(const delassus::Transform<double>& x) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(6, 6);
  const Eigen::Matrix3d r = to_eigen(x.R);
  Eigen::Matrix3d px;
  px << 0, -x.p.z, x.p.y, x.p.z, 0, -x.p.x, -x.p.y, x.p.x, 0;
  m.topLeftCorner(3, 3) = r;
  m.topRightCorner(3, 3) = px * r;
  m.bottomRightCorner(3, 3) = r;
  return m;
}

inline double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale =
      std::max({a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(), 1e-300});
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

inline double rel_diff(const Matrix& a, const Matrix& b) {
  return rel_diff(to_eigen(a), to_eigen(b));
}

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
  }
};

inline delassus::Transform<double> random_transform(Rng& rng) {
  delassus::Transform<double> x;
  const double a = rng.uniform(-3.0, 3.0);
  double ux = 1, uy = 0, uz = 0, n = 1;
  do {
    ux = rng.uniform(-1, 1);
    uy = rng.uniform(-1, 1);
    uz = rng.uniform(-1, 1);
    n = std::sqrt(ux * ux + uy * uy + uz * uz);
  } while (n < 0.1);
  ux /= n;
  uy /= n;
  uz /= n;
  const double c = std::cos(a), s = std::sin(a), v = 1 - c;
  auto& r = x.R;
  r(0, 0) = c + v * ux * ux;
  r(0, 1) = v * ux * uy - s * uz;
  r(0, 2) = v * ux * uz + s * uy;
  r(1, 0) = v * ux * uy + s * uz;
  r(1, 1) = c + v * uy * uy;
  r(1, 2) = v * uy * uz - s * ux;
  r(2, 0) = v * ux * uz - s * uy;
  r(2, 1) = v * uy * uz + s * ux;
  r(2, 2) = c + v * uz * uz;
  x.rtag = delassus::RotTag::General;
  x.p = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
  x.ttag = delassus::TransTag::General;
  return x;
}

inline delassus::Mat6<double> random_sym6(Rng& rng, bool psd) {
  Eigen::MatrixXd a(6, 6);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) a(r, c) = rng.uniform(-1, 1);
  Eigen::MatrixXd s = psd ? Eigen::MatrixXd(a * a.transpose())
                          : Eigen::MatrixXd(0.5 * (a + a.transpose()));
  delassus::Mat6<double> m;
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) m(r, c) = s(r, c);
  return m;
}

}  // namespace testutil
