#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mabuchi/futaki.hpp"
#include "mabuchi/functionals.hpp"

namespace mabuchi {

/// Geodesic between two metrics: linear interpolation of symplectic potentials.
struct GeodesicSegment {
  PotentialPath path;
  double speed = 0.0;  // L2(dx) norm of u1 - u0
  double length = 0.0;
  std::vector<double> speeds;  // measured at the samples

  const SymplecticPotential& start() const { return path.samples().front(); }
  const SymplecticPotential& end() const { return path.samples().back(); }
};

GeodesicSegment exact_geodesic(const SymplecticPotential& u0, const SymplecticPotential& u1, int n_samples);

/// Evaluation points and finite-difference step for the Kahler-side residual.
struct ResidualOptions {
  double step = 0.0;   // FD step in t and s; 0 means the polytope grid spacing
  double s_max = 0.0;  // evaluation box [-s_max, s_max]^n; 0 means 0.8 * default_s_max
  int points = 0;      // per axis; 0 means 33 (n = 1) or 9 (n = 2)
};

/// max over interior samples and box points of |psi_tt - psi_ts^T (D^2_s psi)^{-1} psi_ts|,
/// all derivatives by central differences of the pointwise Legendre transform.
double geodesic_residual(const GeodesicSegment& seg, ResidualOptions options = {});
/// Same residual for (1 - t) psi0 + t psi1, the path linear in Kahler potentials.
double kahler_linear_residual(const SymplecticPotential& u0, const SymplecticPotential& u1, int n_samples,
                              ResidualOptions options = {});

/// Ray u(t) = u0 + t w, t in [0, T]; w convex (affine rays are the torus flows).
struct GeodesicRay {
  PotentialPath path;
  Poly direction;
  std::optional<AffineField> affine;  // set when the direction is affine
  std::vector<CurvatureField> curvature;
  std::vector<double> calabi;
  std::vector<double> yen_integrand;  // dE/dt = int rho_dot (R_bar - R) omega^n at each sample

  const SymplecticPotential& base() const { return path.samples().front(); }
  const std::vector<double>& times() const { return path.times(); }
  double t_max() const { return path.t_end(); }
  SymplecticPotential at(double t) const { return path.at(t); }
};

GeodesicRay ray_from_affine(const SymplecticPotential& u0, const AffineField& f, double T_max, int n_samples);
/// Throws NotAdmissible unless w is convex on P.
GeodesicRay ray_from_direction(const SymplecticPotential& u0, const Poly& w, double T_max, int n_samples);

/// Segments u0 -> ray(T) restricted to [0, T_window], compared with the ray.
struct ExhaustionReport {
  std::vector<double> T_list;
  double T_window = 0.0;
  std::vector<double> monitor;  // sup over the window of |phi_T - rho|
  std::vector<double> gaps;     // sup over the window of |phi_{T_k+1} - phi_{T_k}|
  double parallel_constant = 0.0;  // sup |u0 - ray(0)|
  double uniformity = 0.0;         // max |monitor - parallel_constant|
  bool cauchy = true;              // gaps non-increasing
  std::optional<PotentialPath> approximate_ray;  // the last segment on the window
};

/// Sup norms are taken over the closed polytope on the symplectic side; the
/// Legendre transform preserves sup-distances, so these equal the Kahler-side ones.
ExhaustionReport ray_by_exhaustion(const SymplecticPotential& u0, const GeodesicRay& ray,
                                   const std::vector<double>& T_list, double T_window = 0.0);

struct YenTrace {
  std::vector<double> times;
  std::vector<double> integrand;
  double limit = 0.0;  // last sample
  bool modified = false;
  double worst_step = 0.0;  // most negative increment
};

/// Throws NonMonotoneTrace when some increment is below -slack.
YenTrace yen_invariant(const GeodesicRay& ray, bool modified, double slack = 1e-6);

enum class Effectiveness { Vanishing, Bounded, Growing };
std::string to_string(Effectiveness e);

struct EffectivenessProfile {
  std::vector<double> times;
  std::vector<double> t2_calabi;
  double slope = 0.0;  // log-log fit over the last half of the samples
  Effectiveness verdict = Effectiveness::Vanishing;
};

EffectivenessProfile effectiveness_profile(const GeodesicRay& ray);

/// Ambient family rho_bar(t) = Legendre(base + t w)(s) + c e^{-2t}, evaluated
/// at s = s' + t drift for s' in a fixed box (the frame moving with the flow).
struct AmbientFamily {
  SymplecticPotential base;
  Poly direction;
  double c = 0.0;
  Vec drift;
};

/// The ray itself (c = 0), or the Guillemin metric flowed by the ray's field
/// with c = 1 when the ray is affine.
AmbientFamily ambient_of(const GeodesicRay& ray, bool self);

struct StripSolution;

struct TamedReport {
  std::vector<double> times;
  std::vector<double> trace_term;  // max over s of |n + 1 + Delta_h (rho - rho_bar)|
  std::vector<double> time_term;   // max over s of |d/dt (rho - rho_bar)|
  double trace_max = 0.0;
  double time_max = 0.0;
  bool has_monitor = false;
  double monitor_interior_max = 0.0;
  double monitor_boundary_max = 0.0;
  double monitor_excess = 0.0;  // relative
  bool boundary_maximum = true;
};

TamedReport tamed_diagnostics(const GeodesicRay& ray, const AmbientFamily& ambient, int points = 0,
                              const StripSolution* strip = nullptr);

}  // namespace mabuchi
