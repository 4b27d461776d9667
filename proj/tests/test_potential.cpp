#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "mabuchi/legendre.hpp"

using namespace mabuchi;

namespace {

Poly x_one_minus_x(double c) {
  Poly p(1, 2);
  p.set_coeff(1, 0, c);
  p.set_coeff(2, 0, -c);
  return p;
}

}  // namespace

TEST_CASE("polynomial jets match finite differences") {
  Poly p(2, 4);
  p.set_coeff(0, 0, 0.3);
  p.set_coeff(2, 1, -1.1);
  p.set_coeff(1, 3, 0.7);
  p.set_coeff(4, 0, 0.25);
  const Vec x = make_vec(0.3, 0.45);
  const auto j = p.jet(x, 4);
  const double e = 1e-4;
  auto fd = [&](int a, int b) {
    Vec xa = x, xb = x;
    xa(a) += e;
    xb(a) -= e;
    return (p.jet(xa, 4).hess(b, b) - p.jet(xb, 4).hess(b, b)) / (2 * e);
  };
  CHECK(j.third[0](1, 1) == doctest::Approx(fd(0, 1)).epsilon(1e-6));
  CHECK(j.third[1](1, 1) == doctest::Approx(fd(1, 1)).epsilon(1e-6));
  // d_x d_y^3 of 0.7 x y^3
  CHECK(j.fourth[0][1](1, 1) == doctest::Approx(0.7 * 1 * 3 * 2 * 1 * 1));
  CHECK(j.fourth[0][0](0, 0) == doctest::Approx(0.25 * 24));
  CHECK((p * Poly::constant(2, 2.0))(x) == doctest::Approx(2 * p(x)));
}

TEST_CASE("Guillemin potential on P1") {
  auto d = make_discretization("P1");
  auto u = guillemin_potential(d);
  const Vec x = make_vec(0.3);
  const double expected = 0.5 * (0.3 * std::log(0.3) + 0.7 * std::log(0.7));
  CHECK(u.value(x) == doctest::Approx(expected));
  CHECK(u.hessian(x)(0, 0) == doctest::Approx(1.0 / (2 * 0.3 * 0.7)));
  const auto rep = check_admissible(u);
  CHECK(rep.admissible);
  CHECK(rep.min_eigenvalue == doctest::Approx(2.0));
  CHECK(rep.argmin(0) == doctest::Approx(0.5));
}

TEST_CASE("Guillemin potential on P2 and PF1") {
  auto d2 = make_discretization("P2");
  auto u2 = guillemin_potential(d2);
  CHECK(min_eigenvalue(u2.hessian(make_vec(1.0 / 3, 1.0 / 3))) > 0);
  auto df = make_discretization("PF1");
  auto uf = guillemin_potential(df);
  CHECK(check_admissible(uf).admissible);
  CHECK(check_admissible(uf).checked_points > df->grid().nodes.size());
}

TEST_CASE("make_potential admissibility") {
  auto d = make_discretization("P1");
  auto base = guillemin_potential(d);
  auto same = make_potential(base, Poly(1, 0));
  CHECK(same.value(make_vec(0.2)) == base.value(make_vec(0.2)));

  // u'' = 1/(2x(1-x)) - 0.1 > 0
  auto ok = make_potential(base, x_one_minus_x(0.05));
  CHECK(ok.admissibility().min_eigenvalue == doctest::Approx(1.9));

  // v = 10 x(1-x): u''(1/2) = 2 - 20 < 0. With the opposite sign v'' = +20 and u stays convex.
  CHECK_NOTHROW(make_potential(base, x_one_minus_x(-10.0)));
  try {
    make_potential(base, x_one_minus_x(10.0));
    FAIL("expected NotAdmissible");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotAdmissible);
    CHECK(std::string(e.what()).find("0.5") != std::string::npos);
  }
}

TEST_CASE("affine additions leave the Hessian field unchanged") {
  auto d = make_discretization("PF1");
  Poly v = bubble(d->polytope()) * 0.05;
  auto u = make_potential(guillemin_potential(d), v);
  auto w = add_affine(u, AffineField(make_vec(0.7, -1.3), 0.4));
  REQUIRE(u.hessians().size() == w.hessians().size());
  bool identical = true;
  for (std::size_t k = 0; k < u.hessians().size(); ++k) identical = identical && (u.hessians()[k] == w.hessians()[k]);
  CHECK(identical);
  CHECK(check_admissible(w).admissible == check_admissible(u).admissible);
  CHECK(check_admissible(w).min_eigenvalue == check_admissible(u).min_eigenvalue);
}

TEST_CASE("convex combinations stay admissible") {
  auto d = make_discretization("PF1");
  auto base = guillemin_potential(d);
  const Poly b = bubble(d->polytope());
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> c(-0.15, 0.15);
  for (int trial = 0; trial < 10; ++trial) {
    Poly v0 = b * c(rng), v1 = b * c(rng);
    v0.set_coeff(2, 0, c(rng));
    v1.set_coeff(0, 2, c(rng));
    auto u0 = make_potential(base, v0);
    auto u1 = make_potential(base, v1);
    for (double t : {0.25, 0.5, 0.75}) CHECK_NOTHROW(make_potential(base, v0 * (1 - t) + v1 * t));
    (void)u0;
    (void)u1;
  }
}

TEST_CASE("Legendre transform") {
  auto d = make_discretization("P1");
  auto u = guillemin_potential(d);
  // psi(s) = 1/2 log(1 + e^{2s}) for the Guillemin potential of [0, 1]
  for (double s : {-3.0, -0.4, 0.0, 1.7}) {
    auto lp = legendre_at(u, make_vec(s));
    CHECK(lp.value == doctest::Approx(0.5 * std::log1p(std::exp(2 * s))).epsilon(1e-13));
    CHECK(lp.x(0) == doctest::Approx(1.0 / (1.0 + std::exp(-2 * s))).epsilon(1e-13));
  }

  const double smax = default_s_max(u);
  CHECK(smax == doctest::Approx(0.5 * std::log(63.0)));
  auto psi = legendre_dual(u, smax);
  CHECK(psi.convex());
  CHECK(psi.gradients_in(d->polytope()));
  const double err = involution_error(u, psi);
  MESSAGE("dual of dual error at h = 1/64: " << err);
  CHECK(err <= 5e-4);
  CHECK(err <= 10 * d->h());

  try {
    legendre_dual(u, 0.5);
    FAIL("expected TruncationTooSmall");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TruncationTooSmall);
  }
}

TEST_CASE("Legendre transform of a quadratic") {
  auto d = make_discretization("P1");
  // u = (x - 1/2)^2, no reference part: psi(s) = s/2 + s^2/4 while |s| <= 1
  Poly q(1, 2);
  q.set_coeff(0, 0, 0.25);
  q.set_coeff(1, 0, -1.0);
  q.set_coeff(2, 0, 1.0);
  SymplecticPotential u(d, q, false);
  for (double s : {-0.6, 0.0, 0.3}) CHECK(legendre_at(u, make_vec(s)).value == doctest::Approx(s / 2 + s * s / 4));
}

TEST_CASE("Legendre involution on PF1") {
  auto d = make_discretization("PF1");
  auto u = make_potential(guillemin_potential(d), bubble(d->polytope()) * 0.03);
  auto psi = legendre_dual(u, default_s_max(u));
  CHECK(psi.convex(1e-9));
  CHECK(psi.gradients_in(d->polytope()));
  const double err = involution_error(u, psi);
  MESSAGE("PF1 dual of dual error: " << err);
  CHECK(err <= 10 * d->h());
  CHECK(psi.vertex_asymptotics.size() == 4);
}
