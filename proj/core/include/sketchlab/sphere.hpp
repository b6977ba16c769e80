#pragma once

#include <Eigen/Core>

#include "sketchlab/random.hpp"

namespace sketchlab::sphere {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Max |norm - 1| accepted for unit vectors and max entry of |M^T M - I|
/// accepted for rotation matrices. Single global contract; violating
/// values are rejected at construction.
inline constexpr double kUnitTolerance = 1e-9;
inline constexpr double kOrthogonalityTolerance = 1e-9;

/// A biometric template: a unit vector on S^{n-1}, n >= 3.
class Template {
 public:
  explicit Template(Vector coords);

  /// Normalizes first, then validates. Rejects near-zero input.
  static Template normalized(Vector coords);

  const Vector& coords() const { return coords_; }
  int dim() const { return static_cast<int>(coords_.size()); }

 private:
  Vector coords_;
};

/// An orthogonal n x n matrix. The inverse is realized as the transpose
/// everywhere; no numeric inversion is ever performed.
class RotationMatrix {
 public:
  explicit RotationMatrix(Matrix entries);

  const Matrix& entries() const { return entries_; }
  int dim() const { return static_cast<int>(entries_.rows()); }

  Vector apply(const Vector& v) const { return entries_ * v; }
  Vector apply_inverse(const Vector& v) const { return entries_.transpose() * v; }
  Template apply(const Template& t) const;
  Template apply_inverse(const Template& t) const;

 private:
  Matrix entries_;
};

/// Angle distance arccos(<v, w>) in [0, pi]; the inner product is clamped
/// to [-1, 1] before arccos. Throws on dimension mismatch.
double angle(const Template& v, const Template& w);

/// Same metric on raw vectors, normalizing by the norms.
double angle_between(const Vector& v, const Vector& w);

/// Uniform draw on S^{n-1}: n i.i.d. standard normals, normalized.
Template random_unit(int n, RandomStream& rng);

/// Random orthogonal M with M w = c, uniform over the coset
/// {M in O(n) : M w = c}. Built as Q_c Q_w^T where Q_w (resp. Q_c) is a
/// Haar-random orthonormal completion whose first column is w (resp. c).
RotationMatrix random_rotation_mapping(const Template& w, const Template& c,
                                       RandomStream& rng);

/// cos(beta) w + sin(beta) u with u uniform in the tangent space at w;
/// angle(result, w) = beta exactly up to rounding. Requires 0 <= beta < pi/2.
Template perturb_at_angle(const Template& w, double beta, RandomStream& rng);

/// Planar rotation mapping t to c that fixes the orthogonal complement of
/// span{t, c}:  R = I - t t^T - w w^T + [t w] R_theta [t w]^T  with
/// w the normalized component of c orthogonal to t. Requires t != +-c.
RotationMatrix naive_rotation(const Template& t, const Template& c);

/// Uniform random signed permutation matrix (columns are +-e_i, distinct i).
RotationMatrix random_signed_permutation(int n, RandomStream& rng);

}  // namespace sketchlab::sphere
