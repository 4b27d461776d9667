#pragma once

#include <Eigen/Dense>

namespace mabuchi {

// Model polytopes live in dimension 1 or 2; stack-allocated with a fixed
// upper bound so pointwise kernels never touch the heap.
template <typename Scalar>
using VectorN = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, 0, 2, 1>;
template <typename Scalar>
using MatrixN = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, 0, 2, 2>;

using Vec = VectorN<double>;
using Mat = MatrixN<double>;

// Strip problems add the time axis: dimension n + 1 <= 3.
using VecD = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using MatD = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

inline Vec make_vec(double x) {
  Vec v(1);
  v << x;
  return v;
}

inline Vec make_vec(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

}  // namespace mabuchi
