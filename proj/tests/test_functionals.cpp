#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mabuchi/functionals.hpp"
#include "mabuchi/sampling.hpp"

using namespace mabuchi;

namespace {

Poly x_one_minus_x(double c) {
  Poly p(1, 2);
  p.set_coeff(1, 0, c);
  p.set_coeff(2, 0, -c);
  return p;
}

// Independent K-energy: E = -int log det D^2u + 2 int_{dP} u dsigma - S_bar int u,
// written relative to u0 so every integrand is smooth.
double donaldson_delta(const SymplecticPotential& u0, const SymplecticPotential& u1) {
  const Discretization& d = u0.disc();
  const Poly diff = u1.smooth() - u0.smooth();
  const double logdet = integrate_interior(d, [&](const Vec& x) {
    return std::log(u1.hessian(x).determinant() / u0.hessian(x).determinant());
  });
  const double bdry = integrate_boundary(d, [&](const Vec& x) { return diff(x); });
  const double vol = integrate_interior(d, [&](const Vec& x) { return diff(x); });
  return -logdet + 2 * bdry - d.polytope().average_scalar_curvature() * vol;
}

// Trapezoid rule on s in [-L, L] for a P1 potential's Kahler side.
template <typename F>
double s_integral(F&& f, double L = 12.0, int n = 6000) {
  const double h = 2 * L / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) sum += (i == 0 || i == n ? 0.5 : 1.0) * f(-L + i * h);
  return sum * h;
}

}  // namespace

TEST_CASE("round metric on P1 is cscK") {
  auto d = make_discretization("P1");
  auto u = guillemin_potential(d);
  auto c = scalar_curvature(u);
  CHECK(c.S_bar == doctest::Approx(4.0));
  CHECK(c.sup_deviation() <= 1e-4);
  for (double s : c.S) CHECK(std::abs(s - 4.0) <= 1e-4);
  CHECK(calabi_energy(u) <= 1e-6);
}

TEST_CASE("Fubini-Study on P2 is cscK") {
  auto d = make_discretization("P2");
  auto u = guillemin_potential(d);
  auto c = scalar_curvature(u);
  CHECK(c.S_bar == doctest::Approx(12.0));
  CHECK(c.sup_deviation() <= 1e-6);
}

TEST_CASE("curvature matches the Kahler-side formula on P1") {
  // S = -(log psi'')'' / psi'' in the log coordinate s, by finite differences.
  auto d = make_discretization("P1");
  auto u = make_potential(guillemin_potential(d), x_one_minus_x(0.05));
  const double e = 1e-2;
  for (double s : {-1.5, -0.3, 0.4, 1.2}) {
    auto logpp = [&](double t) {
      const Vec x = legendre_at(u, make_vec(t)).x;
      return std::log(1.0 / u.hessian(x)(0, 0));
    };
    const double psi_pp = 1.0 / u.hessian(legendre_at(u, make_vec(s)).x)(0, 0);
    const double second = (logpp(s + e) - 2 * logpp(s) + logpp(s - e)) / (e * e);
    const double kahler = -second / psi_pp;
    const double symplectic = scalar_curvature_at(u, legendre_at(u, make_vec(s)).x);
    CHECK(kahler == doctest::Approx(symplectic).epsilon(1e-4));
  }
}

TEST_CASE("curvature residual integrates to zero") {
  auto d = make_discretization("P1");
  auto u = make_potential(guillemin_potential(d), x_one_minus_x(0.05));
  auto c = scalar_curvature(u);
  CHECK(c.sup_deviation() > 1e-3);
  CHECK(std::abs(integrate_samples(*d, c.residual)) <= 1e-6);

  auto df = make_discretization("PF1");
  RandomPotentialSampler sampler(df->polytope());
  Rng rng(2);
  for (int k = 0; k < 5; ++k) {
    auto w = make_potential(guillemin_potential(df), sampler.draw(rng));
    auto cw = scalar_curvature(w);
    CHECK(cw.S_bar == doctest::Approx(20.0 / 3.0));
    CHECK(std::abs(integrate_samples(*df, cw.residual)) <= 1e-6);
  }
}

TEST_CASE("Calabi energy is quadratic near the round metric") {
  auto d = make_discretization("P1");
  auto base = guillemin_potential(d);
  std::vector<double> eps = {0.04, 0.02, 0.01}, ca;
  for (double e : eps) ca.push_back(calabi_energy(make_potential(base, x_one_minus_x(e))));
  const double slope1 = std::log(ca[0] / ca[1]) / std::log(2.0);
  const double slope2 = std::log(ca[1] / ca[2]) / std::log(2.0);
  CHECK(slope1 >= 1.9);
  CHECK(slope2 >= 1.9);
  for (double v : ca) CHECK(v >= 0);
}

TEST_CASE("I functional") {
  auto d = make_discretization("P1");
  auto u0 = guillemin_potential(d);
  auto u1 = make_potential(u0, x_one_minus_x(0.05));

  auto flat = i_functional(PotentialPath::constant(u0, {0.0, 0.5, 1.0}));
  for (double v : flat.values) CHECK(v == 0.0);
  for (double r : flat.rates) CHECK(r == 0.0);

  auto geo = i_functional(PotentialPath::linear(u0, u1, 11));
  double lo = geo.rates.front(), hi = lo;
  for (double r : geo.rates) lo = std::min(lo, r), hi = std::max(hi, r);
  CHECK(std::abs(hi - lo) <= 1e-6 * std::abs(geo.rates.front()));
  // The explicit value agrees with the integrated rate.
  CHECK(geo.endpoint_value == doctest::Approx(geo.rates.front() * 1.0).epsilon(1e-12));
  // Kahler side: I = int phi psi0'' ds - 1/2 int phi'^2 ds with phi = psi_1 - psi_0.
  const double kahler = s_integral([&](double s) {
    const auto p0 = legendre_at(u0, make_vec(s)), p1 = legendre_at(u1, make_vec(s));
    const double phi = p1.value - p0.value, dphi = p1.x(0) - p0.x(0);
    return phi / u0.hessian(p0.x)(0, 0) - 0.5 * dphi * dphi;
  });
  CHECK(geo.endpoint_value == doctest::Approx(kahler).epsilon(1e-6));

  AffineField f = AffineField(make_vec(1.0), 0.0).normalized(d->polytope());
  auto ray = i_functional(PotentialPath::ray(u0, f.as_polynomial(), 1.0, 5));
  for (double r : ray.rates) CHECK(std::abs(r) <= 1e-12);
}

TEST_CASE("J functional") {
  auto d = make_discretization("P1");
  auto base = guillemin_potential(d);
  CHECK(std::abs(j_functional(base, base)) <= 1e-12);
  CHECK(std::abs(j_functional(make_potential(base, Poly::constant(1, 0.37)), base)) <= 1e-10);
  auto u = make_potential(base, x_one_minus_x(0.05));
  const double j = j_functional(u, base);
  CHECK(j > 0);
  // n = 1: J = int phi'^2 ds with phi' = x_u(s) - x_base(s).
  const double kahler = s_integral([&](double s) {
    const double dphi = legendre_at(u, make_vec(s)).x(0) - legendre_at(base, make_vec(s)).x(0);
    return dphi * dphi;
  });
  CHECK(j == doctest::Approx(kahler).epsilon(1e-5));
  // Positive for a non-constant difference on PF1; mismatch detected.
  auto df = make_discretization("PF1");
  auto bf = guillemin_potential(df);
  CHECK(j_functional(make_potential(bf, bubble(df->polytope()) * 0.1), bf) > 0);
  CHECK_THROWS_AS(j_functional(u, bf), Error);
}

TEST_CASE("K-energy differences") {
  auto d = make_discretization("P1");
  auto u0 = guillemin_potential(d);
  auto u1 = make_potential(u0, x_one_minus_x(0.05) + Poly::monomial(1, 3, 0, 0.02));

  CHECK(k_energy_delta(PotentialPath::constant(u0, {0.0, 1.0})) == 0.0);

  const double linear = k_energy_delta(PotentialPath::linear(u0, u1, 3));
  const double reparam = k_energy_delta(PotentialPath::reparametrized(u0, u1, {0.0, 0.5, 0.5}, 3));
  const double bent = k_energy_delta(PotentialPath::bent(u0, u1, x_one_minus_x(0.03), 3));
  CHECK(std::abs(linear - reparam) <= 1e-5);
  CHECK(std::abs(linear - bent) <= 1e-5);
  CHECK(linear == doctest::Approx(donaldson_delta(u0, u1)).epsilon(1e-6));

  // Critical point: Delta E = O(|v|^2) from the round metric.
  std::vector<double> de;
  for (double e : {0.04, 0.02, 0.01})
    de.push_back(std::abs(k_energy_delta(PotentialPath::linear(u0, make_potential(u0, x_one_minus_x(e)), 2))));
  CHECK(std::log(de[0] / de[1]) / std::log(2.0) >= 1.9);
  CHECK(std::log(de[1] / de[2]) / std::log(2.0) >= 1.9);
}

TEST_CASE("K-energy on PF1 matches the closed form and is convex along geodesics") {
  auto d = make_discretization("PF1");
  auto base = guillemin_potential(d);
  RandomPotentialSampler sampler(d->polytope());
  Rng rng(9);
  auto u0 = make_potential(base, sampler.draw(rng));
  auto u1 = make_potential(base, sampler.draw(rng));
  auto path = PotentialPath::linear(u0, u1, 6);
  CHECK(k_energy_delta(path) == doctest::Approx(donaldson_delta(u0, u1)).epsilon(1e-6));
  double prev = -INFINITY;
  for (double t : path.times()) {
    const double rate = k_energy_rate(path, t);
    CHECK(rate >= prev - 1e-6);
    prev = rate;
  }
}

TEST_CASE("entropy") {
  auto d = make_discretization("P1");
  auto base = guillemin_potential(d);
  CHECK(std::abs(entropy(base, base)) <= 1e-12);
  CHECK(entropy(make_potential(base, x_one_minus_x(0.05)), base) > 0);

  // Affine shift by a x translates psi in s: the density ratio is
  // x(1-x) / (y(1-y)) with logit(y) = logit(x) + 2a, a Kullback-Leibler divergence.
  const double a = 0.3;
  auto shifted = add_affine(base, AffineField(make_vec(a), 0.0));
  auto kl = [&](double x) {
    const double y = 1.0 / (1.0 + (1.0 - x) / x * std::exp(-2 * a));
    return std::log(x * (1 - x) / (y * (1 - y)));
  };
  double ref = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) ref += kl((i + 0.5) / n) / n;
  const double ent = entropy(shifted, base);
  CHECK(ent > 0);
  CHECK(ent == doctest::Approx(ref).epsilon(1e-6));
}

TEST_CASE("path length and distance") {
  auto d = make_discretization("P1");
  auto u0 = guillemin_potential(d);
  CHECK(path_length(PotentialPath::constant(u0, {0.0, 1.0})).length == 0.0);

  const AffineField f(make_vec(1.3), -0.2);
  auto ray = PotentialPath::ray(u0, f.as_polynomial(), 1.0, 6);
  auto len = path_length(ray);
  const double f2 = integrate_interior(*d, [&](const Vec& x) { return f(x) * f(x); });
  CHECK(len.length * len.length == doctest::Approx(f2).epsilon(1e-5));
  // Kahler side: int phi_dot^2 omega_phi = int f(x(s))^2 psi''(s) ds at t = 0.
  const double kahler = s_integral([&](double s) {
    const Vec x = legendre_at(u0, make_vec(s)).x;
    return f(x) * f(x) / u0.hessian(x)(0, 0);
  });
  CHECK(f2 == doctest::Approx(kahler).epsilon(1e-5));

  auto u1 = make_potential(u0, x_one_minus_x(0.05));
  auto seg = path_length(PotentialPath::linear(u0, u1, 9));
  for (double s : seg.speeds) CHECK(s == doctest::Approx(seg.speeds.front()).epsilon(1e-5));
  CHECK(seg.length == doctest::Approx(geodesic_distance(u0, u1)).epsilon(1e-12));
  CHECK(geodesic_distance(u0, u0) == 0.0);
}

TEST_CASE("geodesic distance is a metric on random triples") {
  auto d = make_discretization("P1");
  auto base = guillemin_potential(d);
  RandomPotentialSampler sampler(d->polytope());
  Rng rng(17);
  for (int k = 0; k < 50; ++k) {
    auto a = make_potential(base, sampler.draw(rng));
    auto b = make_potential(base, sampler.draw(rng));
    auto c = make_potential(base, sampler.draw(rng));
    CHECK(std::abs(geodesic_distance(a, b) - geodesic_distance(b, a)) <= 1e-10);
    CHECK(geodesic_distance(a, b) + geodesic_distance(b, c) - geodesic_distance(a, c) >= -1e-6);
  }
}

TEST_CASE("distance lower bound") {
  auto d = make_discretization("P1");
  auto base = guillemin_potential(d);
  RandomPotentialSampler sampler(d->polytope());
  Rng rng(23);
  for (int k = 0; k < 10; ++k) {
    auto u = make_potential(base, sampler.draw(rng));
    auto r = distance_lower_bound(u, base);
    CHECK(r.margin() >= -1e-6);
  }
  auto trivial = distance_lower_bound(base, base);
  CHECK(trivial.distance == 0.0);
  CHECK(std::abs(trivial.negative_part) <= 1e-12);
}
