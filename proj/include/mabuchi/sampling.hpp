#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "mabuchi/potential.hpp"

namespace mabuchi {

/// Deterministic generator: doubles are built from the top 53 bits, so draws
/// are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Random smooth parts v = sum c_k B_k with B_k = (product of facet functions)
/// times a monomial, coefficients uniform in [-box, box]. Draws are accepted
/// on a fixed lattice independent of the quadrature grid, so the same seed
/// gives the same potentials at h and h/2.
class RandomPotentialSampler {
 public:
  explicit RandomPotentialSampler(const MomentPolytope& p, double box = 0.0);

  const std::vector<Poly>& basis() const { return basis_; }
  double box() const { return box_; }

  /// Draws until acceptance; throws NotAdmissible after 1000 rejections.
  Poly draw(Rng& rng);

  bool accept(const Poly& v) const;
  /// Coefficients of the last accepted draw in the basis.
  const std::vector<double>& last_coefficients() const { return last_; }

  int attempts() const { return attempts_; }
  int accepted() const { return accepted_; }
  double acceptance_rate() const { return attempts_ ? static_cast<double>(accepted_) / attempts_ : 0.0; }

 private:
  MomentPolytope polytope_;
  std::vector<Poly> basis_;
  std::vector<Vec> check_nodes_;
  double box_ = 0.0;
  std::vector<double> last_;
  int attempts_ = 0;
  int accepted_ = 0;
};

double default_sample_box(const MomentPolytope& p);

/// Runs fn(i) for i in [0, count) on up to `workers` threads; results must be
/// written to index i so the outcome does not depend on scheduling.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

int default_workers();

}  // namespace mabuchi
