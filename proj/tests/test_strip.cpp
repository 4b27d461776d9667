#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mabuchi/legendre.hpp"
#include "mabuchi/sampling.hpp"
#include "mabuchi/strip_solver.hpp"

using namespace mabuchi;

namespace {

Poly x_one_minus_x(double c) {
  Poly p(1, 2);
  p.set_coeff(1, 0, c);
  p.set_coeff(2, 0, -c);
  return p;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Config;
}

}  // namespace

TEST_CASE("eps must be positive") {
  auto d = make_discretization("P1");
  auto u = guillemin_potential(d);
  CHECK(kind_of([&] { solve_hcma_regularized(u, u, 1.0, 0.0); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { solve_hcma_regularized(u, u, 1.0, -1e-3); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { solve_hcma_sequence(u, u, 1.0, {1e-1, 0.0}); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { solve_hcma_sequence(u, u, 1.0, {1e-2, 1e-1}); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { solve_hcma_regularized(u, u, 0.0, 1e-2); }) == ErrorKind::InvalidArgument);
  StripOptions small;
  small.s_max = 0.5;
  CHECK(kind_of([&] { solve_hcma_regularized(u, u, 1.0, 1e-2, small); }) == ErrorKind::TruncationTooSmall);
}

TEST_CASE("equal boundary data: the solution is psi + eps A (t^2 - tT) / 2") {
  auto d = make_discretization("P1");
  auto u = make_potential(guillemin_potential(d), x_one_minus_x(-0.2));
  for (double T : {1.0, 2.0}) {
    StripOptions o;
    o.cells_t = 16;
    o.cells_s = 32;
    for (const auto& sol : solve_hcma_sequence(u, u, T, {1e-1, 1e-2}, o)) {
      // A = 1 / T^2 since the boundary data do not depend on t; the sup of
      // |t^2 - tT| / 2 is T^2 / 8.
      CHECK(sol.ambient_A == doctest::Approx(1 / (T * T)).epsilon(1e-12));
      CHECK(strip_error(sol, u, u) == doctest::Approx(sol.eps / 8).epsilon(1e-6));
    }
  }
}

TEST_CASE("regularized solutions converge to the exact geodesic") {
  auto d = make_discretization("P1");
  auto u0 = guillemin_potential(d);
  auto u1 = make_potential(u0, x_one_minus_x(0.05));
  auto sols = solve_hcma_sequence(u0, u1, 1.0, {1e-1, 1e-2, 1e-3});
  REQUIRE(sols.size() == 3);
  double previous = INFINITY;
  const auto psi0 = legendre_dual(u0, sols[0].s_max, sols[0].cells_s).values;
  const auto psi1 = legendre_dual(u1, sols[0].s_max, sols[0].cells_s).values;
  for (const auto& s : sols) {
    const double err = strip_error(s, u0, u1);
    CHECK(err < previous);
    previous = err;
    CHECK(s.residual <= 1e-10);
    CHECK(s.min_hessian_eigenvalue > 0);
    CHECK(s.monitor.boundary_attains(0.02));
    const std::size_t row = s.cells_t + 1;
    for (std::size_t j = 0; j < psi0.size(); ++j) {
      CHECK(s.values[row * j] == psi0[j]);
      CHECK(s.values[row * j + s.cells_t] == psi1[j]);
    }
  }
  CHECK(previous <= 5e-2 * sols.back().range());
}

TEST_CASE("strip solver in three dimensions") {
  auto d = make_discretization("PF1");
  auto base = guillemin_potential(d);
  RandomPotentialSampler sampler(d->polytope());
  Rng rng(2);
  auto u1 = make_potential(base, sampler.draw(rng));
  StripOptions o;
  o.cells_t = 16;
  auto sols = solve_hcma_sequence(base, u1, 1.0, {1e-1, 1e-2}, o);
  CHECK(sols[0].cells_s == 16);
  CHECK(strip_error(sols[1], base, u1) < strip_error(sols[0], base, u1));
  for (const auto& s : sols) {
    CHECK(s.residual <= 1e-10);
    CHECK(s.min_hessian_eigenvalue > 0);
    CHECK(s.monitor.boundary_attains(0.02));
  }
}

TEST_CASE("maximum principle monitor") {
  auto d = make_discretization("P1");
  auto u0 = guillemin_potential(d);
  auto u1 = make_potential(u0, x_one_minus_x(-0.3));
  auto sol = solve_hcma_regularized(u0, u1, 1.0, 1e-3);
  // Default weight is the curvature prescription lambda = 1 - C.
  CHECK(sol.monitor.lambda == doctest::Approx(1.0 - ambient_curvature_bound(sol)).epsilon(1e-12));
  CHECK(sol.monitor.curvature == ambient_curvature_bound(sol));
  CHECK(sol.monitor.excess <= 0.02);
  auto fixed = maximum_principle_monitor(sol, 1.0);
  CHECK(fixed.lambda == 1.0);
  CHECK(std::isnan(fixed.curvature));
  // At eps = 1 the solution is the ambient potential and the monitor is n + 1 everywhere.
  auto top = solve_hcma_sequence(u0, u1, 1.0, {1.0}).front();
  CHECK(top.monitor.interior_max == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(top.monitor.boundary_max == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("maximum principle monitor on random P1 pairs") {
  auto d = make_discretization("P1");
  auto g = guillemin_potential(d);
  RandomPotentialSampler sampler(d->polytope());
  Rng rng(11);
  for (int k = 0; k < 6; ++k) {
    auto u0 = make_potential(g, sampler.draw(rng));
    auto u1 = make_potential(g, sampler.draw(rng));
    for (const auto& s : solve_hcma_sequence(u0, u1, 1.0, {1e-1, 1e-2, 1e-3})) CHECK(s.monitor.boundary_attains(0.02));
  }
}

TEST_CASE("ambient curvature bound") {
  // Equal boundary data: the ambient metric is a product, so the mixed
  // bisectional curvature vanishes.
  auto d = make_discretization("P1");
  auto u = make_potential(guillemin_potential(d), x_one_minus_x(0.2));
  auto sol = solve_hcma_regularized(u, u, 1.0, 1e-2);
  CHECK(std::abs(ambient_curvature_bound(sol)) <= 1e-6);

  // Fubini-Study in logarithmic coordinates, log(1 + e^{2t} + e^{2s}): every
  // orthonormal pair has bisectional curvature 1.
  auto fubini_study = [](int cells) {
    StripSolution fs;
    fs.n = 1;
    fs.T = 1.0;
    fs.s_max = 0.5;
    fs.cells_t = fs.cells_s = cells;
    for (int j = 0; j <= cells; ++j)
      for (int i = 0; i <= cells; ++i) {
        const double t = i * fs.ht() - 0.5, s = -fs.s_max + j * fs.hs();
        const double rho = std::log(1 + std::exp(2 * t) + std::exp(2 * s));
        fs.ambient.push_back(rho);
        fs.values.push_back(rho + 0.1 * t * t);
        fs.relative.push_back(0.1 * t * t);
      }
    return std::abs(1.0 - ambient_curvature_bound(fs));
  };
  const double coarse = fubini_study(40), fine = fubini_study(80);
  CHECK(fine <= 1e-3);
  CHECK(coarse / fine >= 3.0);
}
