#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "mabuchi/quadrature.hpp"

using namespace mabuchi;

namespace {

Facet facet(int a, int b, double offset) {
  Facet f;
  f.normal = Eigen::Vector2i(a, b);
  f.offset = offset;
  return f;
}

}  // namespace

TEST_CASE("named models") {
  auto p1 = make_polytope("P1");
  CHECK(p1.dimension() == 1);
  CHECK(p1.volume() == doctest::Approx(1.0));
  CHECK(p1.vertices()[0](0) == 0.0);
  CHECK(p1.vertices()[1](0) == 1.0);

  auto p2 = make_polytope("P2");
  CHECK(p2.volume() == doctest::Approx(0.5));
  CHECK(p2.boundary_volume() == doctest::Approx(3.0));
  CHECK(p2.average_scalar_curvature() == doctest::Approx(12.0));

  // area of {0 <= x <= 1, 0 <= y <= 2 - x} is the integral of (2 - x) over [0, 1]
  auto pf = make_polytope("PF1");
  CHECK(pf.volume() == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(pf.vertices().size() == 4);
  CHECK(pf.boundary_volume() == doctest::Approx(5.0));
  CHECK(pf.centroid()(0) == doctest::Approx(4.0 / 9.0));
  CHECK(pf.centroid()(1) == doctest::Approx(7.0 / 9.0));
}

TEST_CASE("validation rejects bad facet lists") {
  // vertex (0, 1) of {x >= 0, y >= 0, x + 2y <= 2} has normals (1,0), (-1,-2): det -2
  CHECK_THROWS_AS(make_polytope("bad", {facet(1, 0, 0), facet(0, 1, 0), facet(-1, -2, -2)}), Error);
  try {
    make_polytope("bad", {facet(1, 0, 0), facet(0, 1, 0), facet(-1, -2, -2)});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotDelzant);
  }
  try {
    make_polytope("strip", {facet(1, 0, 0), facet(-1, 0, -1), facet(0, 1, 0)});
    FAIL("unbounded accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Unbounded);
  }
  try {
    make_polytope("fat", {facet(2, 1, 0), facet(0, 1, 0), facet(-1, -1, -2)});
    FAIL("non-primitive accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotDelzant);
  }
  try {
    make_polytope("redundant", {facet(1, 0, 0), facet(0, 1, 0), facet(-1, -1, -1), facet(-1, 0, -5)});
    FAIL("redundant facet accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotDelzant);
  }
}

TEST_CASE("random unimodular images of P2 are Delzant") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> pick(0, 3);
  const auto p2 = make_polytope("P2");
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::Matrix2i A = Eigen::Matrix2i::Identity();
    for (int step = 0; step < 6; ++step) {
      Eigen::Matrix2i E = Eigen::Matrix2i::Identity();
      switch (pick(rng)) {
        case 0: E(0, 1) = 1; break;
        case 1: E(1, 0) = -1; break;
        case 2: E << 0, 1, 1, 0; break;
        default: E(0, 0) = -1; break;
      }
      A = E * A;
    }
    Eigen::Vector2i b(pick(rng) - 1, pick(rng) - 2);
    auto q = transformed(p2, A, b);
    CHECK(q.volume() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(q.boundary_volume() == doctest::Approx(3.0).epsilon(1e-12));
  }
}

TEST_CASE("interior quadrature") {
  auto d1 = make_discretization("P1");
  CHECK(d1->grid().total_weight() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(integrate_interior(*d1, [](const Vec& x) { return x(0); }) == doctest::Approx(0.5).epsilon(1e-12));

  auto df = make_discretization("PF1");
  const double area = df->grid().total_weight();
  CHECK(std::abs(area - 1.5) < 1e-12);
  CHECK(std::abs(integrate_interior(*df, [](const Vec& x) { return x(0); }) - 2.0 / 3.0) < 1e-12);
  CHECK(std::abs(integrate_interior(*df, [](const Vec& x) { return x(1); }) - 7.0 / 6.0) < 1e-12);
  CHECK(std::abs(integrate_interior(*df, [](const Vec& x) { return x(0) * x(1); }) - 11.0 / 24.0) < 1e-12);

  for (const auto& x : df->grid().points) CHECK(df->polytope().min_facet_value(x) > 0);
  for (const auto& x : df->grid().nodes) CHECK(df->polytope().min_facet_value(x) > 0);

  std::vector<double> wrong(3, 1.0);
  CHECK_THROWS_AS(integrate_interior(df->polytope(), df->grid(), wrong), Error);
}

TEST_CASE("boundary measure") {
  auto d1 = make_discretization("P1");
  CHECK(integrate_boundary(*d1, [](const Vec&) { return 1.0; }) == 2.0);

  auto df = make_discretization("PF1");
  CHECK(std::abs(integrate_boundary(*df, [](const Vec&) { return 1.0; }) - 5.0) < 1e-12);
  // per facet: 1/2 on y = 0, 0 on x = 0, 1 on x = 1, 1/2 on x + y = 2
  CHECK(std::abs(integrate_boundary(*df, [](const Vec& x) { return x(0); }) - 2.0) < 1e-12);
  const auto& bm = df->boundary();
  const double lengths[] = {2.0, 1.0, 1.0, 1.0};
  for (int i = 0; i < 4; ++i) CHECK(bm.facet_total(i) == doctest::Approx(lengths[i]));
  std::vector<double> wrong(2, 1.0);
  CHECK_THROWS_AS(integrate_boundary(df->polytope(), bm, wrong), Error);
}

TEST_CASE("refinement consistency on a smooth integrand") {
  auto f = [](const Vec& x) { return std::exp(x(0)) * std::cos(2 * x(1)); };
  auto coarse = make_discretization("PF1", {1.0 / 24, 1});
  auto mid = make_discretization("PF1", {1.0 / 48, 1});
  auto fine = make_discretization("PF1", {1.0 / 96, 1});
  const double e1 = std::abs(integrate_interior(*coarse, f) - integrate_interior(*mid, f));
  const double e2 = std::abs(integrate_interior(*mid, f) - integrate_interior(*fine, f));
  MESSAGE("midpoint-rule refinement constant C = " << e1 * 24 * 24);
  CHECK(e2 < e1 / 3.0);
  CHECK(e1 <= 1.0 * (1.0 / 24) * (1.0 / 24));
}

TEST_CASE("integrals are invariant under unimodular maps") {
  const auto p = make_polytope("PF1");
  Eigen::Matrix2i A;
  A << 1, 1, 0, 1;
  Eigen::Vector2i b(-1, 2);
  const auto q = transformed(p, A, b);
  auto dp = make_discretization(p);
  auto dq = make_discretization(q);
  // f(y) = g(A^{-1}(y - b)) with g(x) = x0^2 + x1
  Eigen::Matrix2d Ainv = A.cast<double>().inverse();
  auto g = [](const Vec& x) { return x(0) * x(0) + x(1); };
  auto f = [&](const Vec& y) {
    Eigen::Vector2d x = Ainv * (Eigen::Vector2d(y(0), y(1)) - b.cast<double>());
    return g(make_vec(x(0), x(1)));
  };
  CHECK(std::abs(integrate_interior(*dp, g) - integrate_interior(*dq, f)) < 1e-8);
  CHECK(std::abs(integrate_boundary(*dp, g) - integrate_boundary(*dq, f)) < 1e-8);
}
