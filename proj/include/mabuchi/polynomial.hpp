#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <string>

#include "mabuchi/errors.hpp"
#include "mabuchi/types.hpp"

namespace mabuchi {

/// Derivatives of a scalar function of n <= 2 variables at one point, up to
/// fourth order. third[k] holds the matrix d_k D^2 f and fourth[k][l] holds
/// d_k d_l D^2 f, which is the layout the curvature kernel consumes.
template <typename Scalar>
struct Jet {
  int dim = 0;
  int order = 0;
  Scalar value{0};
  VectorN<Scalar> grad;
  MatrixN<Scalar> hess;
  std::array<MatrixN<Scalar>, 2> third;
  std::array<std::array<MatrixN<Scalar>, 2>, 2> fourth;

  Jet() = default;
  Jet(int n, int ord) : dim(n), order(ord) {
    grad = VectorN<Scalar>::Zero(n);
    hess = MatrixN<Scalar>::Zero(n, n);
    for (int k = 0; k < n; ++k) {
      third[k] = MatrixN<Scalar>::Zero(n, n);
      for (int l = 0; l < n; ++l) fourth[k][l] = MatrixN<Scalar>::Zero(n, n);
    }
  }

  Jet& operator+=(const Jet& other) {
    assert(dim == other.dim);
    value += other.value;
    grad += other.grad;
    hess += other.hess;
    for (int k = 0; k < dim; ++k) {
      third[k] += other.third[k];
      for (int l = 0; l < dim; ++l) fourth[k][l] += other.fourth[k][l];
    }
    return *this;
  }
};

/// Dense polynomial in one or two variables, coefficient (i, j) multiplying
/// x^i y^j. Used for the smooth part of symplectic potentials, so every
/// derivative the curvature needs is exact.
template <typename Scalar>
class Polynomial {
 public:
  using Coefficients = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Polynomial() : Polynomial(1, 0) {}

  Polynomial(int dim, int degree) : dim_(dim) {
    if (dim < 1 || dim > 2) throw Error(ErrorKind::InvalidArgument, "polynomial dimension must be 1 or 2");
    if (degree < 0) degree = 0;
    coeffs_ = Coefficients::Zero(degree + 1, dim == 2 ? degree + 1 : 1);
  }

  static Polynomial constant(int dim, Scalar c) {
    Polynomial p(dim, 0);
    p.coeffs_(0, 0) = c;
    return p;
  }

  static Polynomial monomial(int dim, int i, int j, Scalar c = Scalar(1)) {
    if (dim == 1 && j != 0) throw Error(ErrorKind::InvalidArgument, "y-power in a 1-D polynomial");
    Polynomial p(dim, i + j);
    p.coeffs_(i, j) = c;
    return p;
  }

  /// <a, x> + b
  static Polynomial affine(const VectorN<Scalar>& a, Scalar b) {
    const int n = static_cast<int>(a.size());
    Polynomial p(n, 1);
    p.coeffs_(0, 0) = b;
    p.coeffs_(1, 0) = a(0);
    if (n == 2) p.coeffs_(0, 1) = a(1);
    return p;
  }

  int dim() const { return dim_; }
  int capacity_degree() const { return static_cast<int>(coeffs_.rows()) - 1; }

  int degree() const {
    int deg = 0;
    for (int i = 0; i < coeffs_.rows(); ++i)
      for (int j = 0; j < coeffs_.cols(); ++j)
        if (coeffs_(i, j) != Scalar(0)) deg = std::max(deg, i + j);
    return deg;
  }

  Scalar coeff(int i, int j = 0) const {
    if (i < coeffs_.rows() && j < coeffs_.cols()) return coeffs_(i, j);
    return Scalar(0);
  }

  void set_coeff(int i, int j, Scalar c) {
    if (dim_ == 1 && j != 0) throw Error(ErrorKind::InvalidArgument, "y-power in a 1-D polynomial");
    reserve(i + j);
    coeffs_(i, j) = c;
  }

  const Coefficients& coefficients() const { return coeffs_; }

  bool is_zero() const { return coeffs_.isZero(0); }

  bool is_affine(Scalar tol = Scalar(0)) const {
    for (int i = 0; i < coeffs_.rows(); ++i)
      for (int j = 0; j < coeffs_.cols(); ++j)
        if (i + j >= 2 && std::abs(coeffs_(i, j)) > tol) return false;
    return true;
  }

  Scalar operator()(const VectorN<Scalar>& x) const {
    const int deg = capacity_degree();
    Scalar result(0);
    if (dim_ == 1) {
      for (int i = deg; i >= 0; --i) result = result * x(0) + coeffs_(i, 0);
      return result;
    }
    // Horner in y of Horner in x.
    for (int j = deg; j >= 0; --j) {
      Scalar row(0);
      for (int i = deg - j; i >= 0; --i) row = row * x(0) + coeffs_(i, j);
      result = result * x(1) + row;
    }
    return result;
  }

  Jet<Scalar> jet(const VectorN<Scalar>& x, int order = 4) const {
    const int deg = capacity_degree();
    const int n = dim_;
    // d[a][b] = d^a/dx^a d^b/dy^b p(x)
    Scalar d[5][5] = {};
    std::array<Scalar, 16> px{}, py{};
    const int max_pow = deg + 1;
    px[0] = Scalar(1);
    py[0] = Scalar(1);
    for (int k = 1; k < std::min<int>(max_pow, 16); ++k) {
      px[k] = px[k - 1] * x(0);
      py[k] = n == 2 ? py[k - 1] * x(1) : Scalar(0);
    }
    if (deg >= 16) throw Error(ErrorKind::InvalidArgument, "polynomial degree too large for jet evaluation");
    for (int i = 0; i <= deg; ++i) {
      for (int j = 0; j < coeffs_.cols() && i + j <= deg; ++j) {
        const Scalar c = coeffs_(i, j);
        if (c == Scalar(0)) continue;
        for (int a = 0; a <= std::min(order, i); ++a) {
          Scalar fa = falling(i, a);
          for (int b = 0; b <= std::min(order - a, j); ++b) {
            if (a + b > order) break;
            d[a][b] += c * fa * falling(j, b) * px[i - a] * py[j - b];
          }
        }
      }
    }
    Jet<Scalar> out(n, order);
    out.value = d[0][0];
    auto partial = [&](std::initializer_list<int> axes) {
      int a = 0, b = 0;
      for (int ax : axes) (ax == 0 ? a : b)++;
      return d[a][b];
    };
    for (int k = 0; k < n; ++k) {
      if (order >= 1) out.grad(k) = partial({k});
      for (int l = 0; l < n; ++l) {
        if (order >= 2) out.hess(k, l) = partial({k, l});
        for (int m = 0; m < n; ++m) {
          if (order >= 3) out.third[k](l, m) = partial({k, l, m});
          for (int q = 0; q < n; ++q)
            if (order >= 4) out.fourth[k][l](m, q) = partial({k, l, m, q});
        }
      }
    }
    return out;
  }

  Polynomial derivative(int axis) const {
    Polynomial out(dim_, std::max(0, capacity_degree() - 1));
    for (int i = 0; i < coeffs_.rows(); ++i)
      for (int j = 0; j < coeffs_.cols(); ++j) {
        if (coeffs_(i, j) == Scalar(0)) continue;
        if (axis == 0 && i > 0) out.coeffs_(i - 1, j) += coeffs_(i, j) * Scalar(i);
        if (axis == 1 && j > 0) out.coeffs_(i, j - 1) += coeffs_(i, j) * Scalar(j);
      }
    return out;
  }

  Polynomial& operator+=(const Polynomial& other) {
    check_dim(other);
    reserve(other.capacity_degree());
    for (int i = 0; i < other.coeffs_.rows(); ++i)
      for (int j = 0; j < other.coeffs_.cols(); ++j) coeffs_(i, j) += other.coeffs_(i, j);
    return *this;
  }

  Polynomial& operator-=(const Polynomial& other) {
    check_dim(other);
    reserve(other.capacity_degree());
    for (int i = 0; i < other.coeffs_.rows(); ++i)
      for (int j = 0; j < other.coeffs_.cols(); ++j) coeffs_(i, j) -= other.coeffs_(i, j);
    return *this;
  }

  Polynomial& operator*=(Scalar s) {
    coeffs_ *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, Scalar s) { return a *= s; }
  friend Polynomial operator*(Scalar s, Polynomial a) { return a *= s; }
  friend Polynomial operator-(Polynomial a) { return a *= Scalar(-1); }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_dim(b);
    Polynomial out(a.dim_, a.capacity_degree() + b.capacity_degree());
    for (int i = 0; i < a.coeffs_.rows(); ++i)
      for (int j = 0; j < a.coeffs_.cols(); ++j) {
        if (a.coeffs_(i, j) == Scalar(0)) continue;
        for (int k = 0; k < b.coeffs_.rows(); ++k)
          for (int l = 0; l < b.coeffs_.cols(); ++l)
            out.coeffs_(i + k, j + l) += a.coeffs_(i, j) * b.coeffs_(k, l);
      }
    return out;
  }

  template <typename Other>
  Polynomial<Other> cast() const {
    Polynomial<Other> out(dim_, capacity_degree());
    for (int i = 0; i < coeffs_.rows(); ++i)
      for (int j = 0; j < coeffs_.cols(); ++j) out.set_coeff(i, j, static_cast<Other>(coeffs_(i, j)));
    return out;
  }

 private:
  static Scalar falling(int i, int a) {
    Scalar r(1);
    for (int k = 0; k < a; ++k) r *= Scalar(i - k);
    return r;
  }

  void check_dim(const Polynomial& other) const {
    if (other.dim_ != dim_) throw Error(ErrorKind::InvalidArgument, "polynomial dimension mismatch");
  }

  void reserve(int degree) {
    if (degree <= capacity_degree()) return;
    Coefficients grown = Coefficients::Zero(degree + 1, dim_ == 2 ? degree + 1 : 1);
    grown.topLeftCorner(coeffs_.rows(), coeffs_.cols()) = coeffs_;
    coeffs_ = std::move(grown);
  }

  int dim_ = 1;
  Coefficients coeffs_;
};

using Poly = Polynomial<double>;

}  // namespace mabuchi
