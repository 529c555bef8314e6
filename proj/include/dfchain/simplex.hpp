#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace dfc {

// tolerance for "on the simplex" checks and clamping
inline constexpr double kGeomEps = 1e-12;

// dimensions above this are rejected; keeps point storage on the stack
inline constexpr int kMaxDim = 15;

template <typename Scalar>
using Coords = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim + 1, 1>;

using Bary = Coords<double>;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Point of the closed simplex, stored as (x_1, ..., x_d); x_0 = 1 - sum is implied.
template <typename Scalar>
class SimplexPoint {
 public:
  using Vector = Coords<Scalar>;

  SimplexPoint() = default;

  explicit SimplexPoint(const Vector& x) : x_(x) { normalize(); }

  SimplexPoint(std::initializer_list<Scalar> x) : x_(static_cast<Eigen::Index>(x.size())) {
    Eigen::Index k = 0;
    for (Scalar v : x) x_[k++] = v;
    normalize();
  }

  // From barycentric (x_0, ..., x_d); renormalizes small drift.
  static SimplexPoint from_barycentric(const Vector& b) {
    if (b.size() < 2) throw DomainError("barycentric vector needs at least two entries");
    Scalar s = b.sum();
    if (!(std::abs(s - Scalar(1)) <= Scalar(1e-9)))
      throw DomainError("barycentric coordinates do not sum to 1");
    SimplexPoint p;
    p.x_ = b.tail(b.size() - 1) / s;
    p.normalize();
    return p;
  }

  int dim() const { return static_cast<int>(x_.size()); }
  const Vector& coords() const { return x_; }
  Scalar operator[](int k) const { return x_[k]; }

  // barycentric coordinate i in 0..d
  Scalar bary(int i) const { return i == 0 ? Scalar(1) - x_.sum() : x_[i - 1]; }

  Vector barycentric() const {
    Vector b(x_.size() + 1);
    b[0] = std::max(Scalar(0), Scalar(1) - x_.sum());
    b.tail(x_.size()) = x_;
    return b / b.sum();
  }

  bool on_face(int i, Scalar eps = Scalar(kGeomEps)) const { return bary(i) <= eps; }

 private:
  void normalize() {
    if (x_.size() < 1 || x_.size() > kMaxDim)
      throw DomainError("simplex dimension must be in 1.." + std::to_string(kMaxDim));
    const Scalar eps(kGeomEps);
    for (Eigen::Index k = 0; k < x_.size(); ++k) {
      if (!(x_[k] >= -eps)) throw DomainError("coordinate " + std::to_string(k + 1) + " is negative or NaN");
      if (x_[k] < Scalar(0)) x_[k] = Scalar(0);
    }
    Scalar s = x_.sum();
    if (s > Scalar(1) + eps) throw DomainError("coordinates sum above 1");
    if (s > Scalar(1)) x_ /= s;
  }

  Vector x_;
};

using Point = SimplexPoint<double>;

template <typename Scalar = double>
SimplexPoint<Scalar> vertex(int i, int d) {
  if (i < 0 || i > d) throw DomainError("vertex index out of range");
  typename SimplexPoint<Scalar>::Vector x = SimplexPoint<Scalar>::Vector::Zero(d);
  if (i > 0) x[i - 1] = Scalar(1);
  return SimplexPoint<Scalar>(x);
}

template <typename Scalar>
SimplexPoint<Scalar> barycenter(int d) {
  return SimplexPoint<Scalar>(SimplexPoint<Scalar>::Vector::Constant(d, Scalar(1) / Scalar(d + 1)));
}

// t x + (1 - t) e_i
template <typename Scalar>
SimplexPoint<Scalar> segment_map(int i, Scalar t, const SimplexPoint<Scalar>& x) {
  if (!(t >= Scalar(0) && t <= Scalar(1))) throw DomainError("segment parameter outside [0,1]");
  if (i < 0 || i > x.dim()) throw DomainError("vertex index out of range");
  typename SimplexPoint<Scalar>::Vector y = t * x.coords();
  if (i > 0) y[i - 1] += Scalar(1) - t;
  return SimplexPoint<Scalar>(y);
}

// Inverse of segment_map: the t with y = t x + (1 - t) e_i.
template <typename Scalar>
Scalar segment_param(const SimplexPoint<Scalar>& x, const SimplexPoint<Scalar>& y, int i) {
  const int d = x.dim();
  if (y.dim() != d) throw DomainError("dimension mismatch");
  const auto e = vertex<Scalar>(i, d).coords();
  const auto u = (x.coords() - e).eval();
  const auto w = (y.coords() - e).eval();
  const Scalar len2 = u.squaredNorm();
  if (len2 <= Scalar(kGeomEps) * Scalar(kGeomEps)) throw DomainError("x coincides with the vertex");
  const Scalar t = u.dot(w) / len2;
  const Scalar off = (w - t * u).norm();
  const Scalar tol = Scalar(1e-9) * std::max(Scalar(1), std::sqrt(len2));
  if (off > tol || t < -tol || t > Scalar(1) + tol) throw DomainError("y is not on the segment from x to the vertex");
  return std::clamp(t, Scalar(0), Scalar(1));
}

}  // namespace dfc
