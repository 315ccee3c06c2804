#include <doctest.h>

#include "delassus/spatial.hpp"
#include "test_helpers.hpp"

using namespace delassus;
using testutil::Rng;

TEST_CASE("identity transform leaves motion and force unchanged") {
  const Transform<double> id;
  const Motion<double> v{{1, 2, 3}, {4, 5, 6}};
  const Force<double> f{{-1, 0.5, 2}, {3, -4, 0.25}};
  const auto vm = transform_motion(id, v);
  const auto ff = transform_force(id, f);
  CHECK(vm.ang.x == 1.0);
  CHECK(vm.lin.z == 6.0);
  CHECK(ff.ang.y == 0.5);
  CHECK(ff.lin.y == -4.0);
}

TEST_CASE("pure translation couples angular into linear") {
  Transform<double> x;
  x.p = {0.0, 0.0, 2.0};
  x.ttag = TransTag::AxisZ;
  const Motion<double> v{{0, 1, 0}, {0, 0, 0}};
  const auto vm = transform_motion(x, v);
  // p x omega = (2 e_z) x e_y = -2 e_x
  CHECK(vm.ang.y == doctest::Approx(1.0));
  CHECK(vm.lin.x == doctest::Approx(-2.0));
  CHECK(vm.lin.y == doctest::Approx(0.0));
  CHECK(vm.lin.z == doctest::Approx(0.0));
}

TEST_CASE("transforms match their dense 6x6 matrix forms") {
  Rng rng(11);
  for (int it = 0; it < 50; ++it) {
    const auto x = testutil::random_transform(rng);
    const Eigen::MatrixXd xm = testutil::motion_matrix(x);
    const Eigen::MatrixXd xf = testutil::force_matrix(x);

    Eigen::VectorXd v(6), f(6);
    for (int i = 0; i < 6; ++i) {
      v(i) = rng.uniform(-2, 2);
      f(i) = rng.uniform(-2, 2);
    }
    const Motion<double> mv{{v(0), v(1), v(2)}, {v(3), v(4), v(5)}};
    const Force<double> ff{{f(0), f(1), f(2)}, {f(3), f(4), f(5)}};

    const auto mv2 = transform_motion(x, mv);
    const Eigen::VectorXd ref = xm * v;
    CHECK(mv2.ang.x == doctest::Approx(ref(0)).epsilon(1e-12));
    CHECK(mv2.ang.y == doctest::Approx(ref(1)).epsilon(1e-12));
    CHECK(mv2.ang.z == doctest::Approx(ref(2)).epsilon(1e-12));
    CHECK(mv2.lin.x == doctest::Approx(ref(3)).epsilon(1e-12));
    CHECK(mv2.lin.y == doctest::Approx(ref(4)).epsilon(1e-12));
    CHECK(mv2.lin.z == doctest::Approx(ref(5)).epsilon(1e-12));

    const auto ff2 = transform_force(x, ff);
    const Eigen::VectorXd reff = xf * f;
    CHECK(ff2.ang.x == doctest::Approx(reff(0)).epsilon(1e-12));
    CHECK(ff2.lin.z == doctest::Approx(reff(5)).epsilon(1e-12));

    // Round trips through the inverse action.
    const auto back = inv_transform_motion(x, mv2);
    CHECK(back.ang.x == doctest::Approx(mv.ang.x).epsilon(1e-12));
    CHECK(back.lin.y == doctest::Approx(mv.lin.y).epsilon(1e-12));
    const auto backf = inv_transform_force(x, ff2);
    CHECK(backf.ang.z == doctest::Approx(ff.ang.z).epsilon(1e-12));
    CHECK(backf.lin.x == doctest::Approx(ff.lin.x).epsilon(1e-12));
  }
}

TEST_CASE("dual pairing is preserved by simultaneous transforms") {
  Rng rng(23);
  for (int it = 0; it < 100; ++it) {
    const auto x = testutil::random_transform(rng);
    const Motion<double> v{{rng.uniform(-2, 2), rng.uniform(-2, 2),
                            rng.uniform(-2, 2)},
                           {rng.uniform(-2, 2), rng.uniform(-2, 2),
                            rng.uniform(-2, 2)}};
    const Force<double> f{{rng.uniform(-2, 2), rng.uniform(-2, 2),
                           rng.uniform(-2, 2)},
                          {rng.uniform(-2, 2), rng.uniform(-2, 2),
                           rng.uniform(-2, 2)}};
    const double before = dual_pairing(f, v);
    const double after =
        dual_pairing(transform_force(x, f), transform_motion(x, v));
    CHECK(after == doctest::Approx(before).epsilon(1e-12));
  }
}

TEST_CASE("composition is associative and matches matrix products") {
  Rng rng(37);
  for (int it = 0; it < 30; ++it) {
    const auto x1 = testutil::random_transform(rng);
    const auto x2 = testutil::random_transform(rng);
    const auto x3 = testutil::random_transform(rng);
    const auto a = compose(compose(x1, x2), x3);
    const auto b = compose(x1, compose(x2, x3));
    CHECK(testutil::rel_diff(testutil::motion_matrix(a),
                             testutil::motion_matrix(b)) < 1e-12);
    CHECK(testutil::rel_diff(
              testutil::motion_matrix(compose(x1, x2)),
              Eigen::MatrixXd(testutil::motion_matrix(x1) *
                              testutil::motion_matrix(x2))) < 1e-12);
  }
}

TEST_CASE("inverse composes to the identity") {
  Rng rng(41);
  for (int it = 0; it < 30; ++it) {
    const auto x = testutil::random_transform(rng);
    const auto id = compose(inverse(x), x);
    const Motion<double> v{{1, -2, 0.5}, {0.25, 3, -1}};
    const auto v2 = transform_motion(id, v);
    CHECK(v2.ang.x == doctest::Approx(v.ang.x).epsilon(1e-12));
    CHECK(v2.lin.z == doctest::Approx(v.lin.z).epsilon(1e-12));
    const Force<double> f{{0.5, 1, 2}, {-1, 0, 1}};
    const auto f2 = transform_force(id, f);
    CHECK(f2.ang.y == doctest::Approx(f.ang.y).epsilon(1e-12));
  }
}

TEST_CASE("axis-z tagged rotations agree with the general path") {
  Rng rng(53);
  for (int it = 0; it < 20; ++it) {
    const double a = rng.uniform(-3, 3);
    Transform<double> z;
    z.R(0, 0) = std::cos(a);
    z.R(0, 1) = -std::sin(a);
    z.R(1, 0) = std::sin(a);
    z.R(1, 1) = std::cos(a);
    z.R(2, 2) = 1.0;
    z.rtag = RotTag::AxisZ;
    z.p = {rng.uniform(-1, 1), 0, 0};
    z.ttag = TransTag::AxisX;
    Transform<double> g = z;
    g.rtag = RotTag::General;
    g.ttag = TransTag::General;
    const Motion<double> v{{rng.uniform(-1, 1), rng.uniform(-1, 1),
                            rng.uniform(-1, 1)},
                           {rng.uniform(-1, 1), rng.uniform(-1, 1),
                            rng.uniform(-1, 1)}};
    const auto a1 = transform_motion(z, v);
    const auto a2 = transform_motion(g, v);
    CHECK(a1.ang.x == doctest::Approx(a2.ang.x).epsilon(1e-14));
    CHECK(a1.lin.y == doctest::Approx(a2.lin.y).epsilon(1e-14));
    CHECK(a1.lin.z == doctest::Approx(a2.lin.z).epsilon(1e-14));
  }
}

TEST_CASE("spatial inertia expands to a symmetric PSD 6x6") {
  Rng rng(61);
  for (int it = 0; it < 25; ++it) {
    SpatialInertia<double> in;
    in.mass = rng.uniform(0.2, 3.0);
    in.com = {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
              rng.uniform(-0.5, 0.5)};
    Eigen::Matrix3d a;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) a(r, c) = rng.uniform(-0.5, 0.5);
    const Eigen::Matrix3d spd =
        a * a.transpose() + 0.01 * Eigen::Matrix3d::Identity();
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) in.rot_inertia(r, c) = spd(r, c);

    const Eigen::MatrixXd h = testutil::to_eigen(in.to_mat6());
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::VectorXd ev =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues();
    CHECK(ev.minCoeff() > -1e-12 * h.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("inertia congruence preserves kinetic energy and round trips") {
  Rng rng(71);
  for (int it = 0; it < 25; ++it) {
    const auto x = testutil::random_transform(rng);
    const Mat6<double> h = testutil::random_sym6(rng, /*psd=*/true);

    Mat6<double> hp;
    add_abi_to_parent(x, h, hp);
    const Eigen::MatrixXd he = testutil::to_eigen(h);
    const Eigen::MatrixXd hpe = testutil::to_eigen(hp);

    // Against the dense congruence Xf H Xm^-1.
    const Eigen::MatrixXd xm = testutil::motion_matrix(x);
    const Eigen::MatrixXd ref =
        testutil::force_matrix(x) * he * xm.inverse();
    CHECK(testutil::rel_diff(hpe, ref) < 1e-10);

    // Energy: v' H' v' = v H v when v transforms along.
    Eigen::VectorXd v(6);
    for (int i = 0; i < 6; ++i) v(i) = rng.uniform(-1, 1);
    const Eigen::VectorXd vp = xm * v;
    const double e0 = v.dot(he * v);
    const double e1 = vp.dot(hpe * vp);
    CHECK(std::abs(e1 - e0) <
          1e-10 * std::max(1.0, he.cwiseAbs().maxCoeff()));

    // Round trip through the inverse placement.
    Mat6<double> back;
    add_abi_to_parent(inverse(x), hp, back);
    CHECK(testutil::rel_diff(testutil::to_eigen(back), he) < 1e-10);
  }
}
