#include "mabuchi/sampling.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace mabuchi {

namespace {

// Accept when D^2 u >= kMargin * D^2 u_ref on the check lattice.
constexpr double kMargin = 0.2;

std::vector<Vec> check_lattice(const MomentPolytope& p) {
  const double h = p.dimension() == 1 ? 1.0 / 128 : 1.0 / 64;
  std::vector<Vec> out;
  const Vec lo = p.lower(), hi = p.upper();
  if (p.dimension() == 1) {
    for (double x = lo(0) + h; x < hi(0) - 0.5 * h; x += h) out.push_back(make_vec(x));
    return out;
  }
  for (double y = lo(1) + 0.5 * h; y < hi(1); y += h)
    for (double x = lo(0) + 0.5 * h; x < hi(0); x += h) {
      Vec z = make_vec(x, y);
      if (p.min_facet_value(z) > 1e-9) out.push_back(z);
    }
  return out;
}

}  // namespace

double default_sample_box(const MomentPolytope& p) {
  if (p.name() == "P1") return 0.6;
  if (p.name() == "P2") return 1.2;
  if (p.name() == "PF1") return 0.5;
  return 0.3;
}

RandomPotentialSampler::RandomPotentialSampler(const MomentPolytope& p, double box)
    : polytope_(p), box_(box > 0 ? box : default_sample_box(p)) {
  const Poly b = bubble(p);
  const int n = p.dimension();
  basis_.push_back(b);
  basis_.push_back(b * Poly::monomial(n, 1, 0));
  if (n == 1)
    basis_.push_back(b * Poly::monomial(n, 2, 0));
  else
    basis_.push_back(b * Poly::monomial(n, 0, 1));
  check_nodes_ = check_lattice(p);
}

bool RandomPotentialSampler::accept(const Poly& v) const {
  for (const auto& x : check_nodes_) {
    const Mat G = guillemin_jet<double>(polytope_, x, 2).hess;
    const Mat Gu = G + v.jet(x, 2).hess;
    // Smallest eigenvalue of G^{-1/2} Gu G^{-1/2}.
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Gu, G, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < kMargin) return false;
  }
  return true;
}

Poly RandomPotentialSampler::draw(Rng& rng) {
  for (int tries = 0; tries < 1000; ++tries) {
    Poly v(polytope_.dimension(), 0);
    last_.clear();
    for (const auto& b : basis_) {
      last_.push_back(rng.uniform(-box_, box_));
      v += b * last_.back();
    }
    ++attempts_;
    if (accept(v)) {
      ++accepted_;
      return v;
    }
  }
  throw Error(ErrorKind::NotAdmissible, "random sampler rejected 1000 consecutive draws");
}

int default_workers() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  const int n = static_cast<int>(std::min<std::size_t>(count, static_cast<std::size_t>(workers)));
  for (int w = 0; w < n; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace mabuchi
