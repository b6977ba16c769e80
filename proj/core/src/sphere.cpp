#include "sketchlab/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace sketchlab::sphere {
namespace {

// Orthonormal basis whose first column is exactly the unit vector v and
// whose remaining columns are a Haar-random basis of the complement:
// QR of [v | G] with Gaussian G, columns sign-fixed by diag(R), then the
// first column is replaced by v itself to remove rounding drift.
Matrix haar_completion(const Vector& v, RandomStream& rng) {
  const int n = static_cast<int>(v.size());
  Matrix a(n, n);
  a.col(0) = v;
  for (int j = 1; j < n; ++j) a.col(j) = rng.gaussian_vector(n);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  const Matrix& packed = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    if (packed(j, j) < 0) q.col(j) = -q.col(j);
  }
  q.col(0) = v;
  return q;
}

}  // namespace

Template::Template(Vector coords) : coords_(std::move(coords)) {
  if (coords_.size() < 3) {
    throw std::invalid_argument("Template: dimension must be at least 3");
  }
  if (std::abs(coords_.norm() - 1.0) > kUnitTolerance) {
    throw std::invalid_argument("Template: coordinates are not unit norm");
  }
}

Template Template::normalized(Vector coords) {
  const double norm = coords.norm();
  if (norm < 1e-12) {
    throw std::invalid_argument("Template::normalized: vector too close to zero");
  }
  return Template(coords / norm);
}

RotationMatrix::RotationMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) {
    throw std::invalid_argument("RotationMatrix: matrix must be square");
  }
  const int n = static_cast<int>(entries_.rows());
  Matrix gram = Matrix::Zero(n, n);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(entries_.transpose());
  double residual = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) {
      const double target = (i == j) ? 1.0 : 0.0;
      residual = std::max(residual, std::abs(gram(i, j) - target));
    }
  }
  if (residual > kOrthogonalityTolerance) {
    throw std::invalid_argument("RotationMatrix: orthogonality residual " +
                                std::to_string(residual) + " exceeds tolerance");
  }
}

Template RotationMatrix::apply(const Template& t) const {
  return Template::normalized(entries_ * t.coords());
}

Template RotationMatrix::apply_inverse(const Template& t) const {
  return Template::normalized(entries_.transpose() * t.coords());
}

double angle(const Template& v, const Template& w) {
  if (v.dim() != w.dim()) {
    throw std::invalid_argument("angle: dimension mismatch");
  }
  const double dot = std::clamp(v.coords().dot(w.coords()), -1.0, 1.0);
  return std::acos(dot);
}

double angle_between(const Vector& v, const Vector& w) {
  if (v.size() != w.size()) {
    throw std::invalid_argument("angle_between: dimension mismatch");
  }
  const double nv = v.norm();
  const double nw = w.norm();
  if (nv < 1e-300 || nw < 1e-300) {
    throw std::invalid_argument("angle_between: zero vector");
  }
  const double dot = std::clamp(v.dot(w) / (nv * nw), -1.0, 1.0);
  return std::acos(dot);
}

Template random_unit(int n, RandomStream& rng) {
  if (n < 3) throw std::invalid_argument("random_unit: dimension must be at least 3");
  Vector v = rng.gaussian_vector(n);
  double norm = v.norm();
  while (norm < 1e-12) {
    v = rng.gaussian_vector(n);
    norm = v.norm();
  }
  return Template(v / norm);
}

RotationMatrix random_rotation_mapping(const Template& w, const Template& c,
                                       RandomStream& rng) {
  if (w.dim() != c.dim()) {
    throw std::invalid_argument("random_rotation_mapping: dimension mismatch");
  }
  const Matrix qw = haar_completion(w.coords(), rng);
  const Matrix qc = haar_completion(c.coords(), rng);
  return RotationMatrix(qc * qw.transpose());
}

Template perturb_at_angle(const Template& w, double beta, RandomStream& rng) {
  if (!(beta >= 0.0 && beta < M_PI / 2)) {
    throw std::invalid_argument("perturb_at_angle: beta must be in [0, pi/2)");
  }
  if (beta == 0.0) return w;
  const int n = w.dim();
  Vector u;
  double norm = 0.0;
  do {
    u = rng.gaussian_vector(n);
    u -= u.dot(w.coords()) * w.coords();
    norm = u.norm();
  } while (norm < 1e-12);
  u /= norm;
  // One more projection pass keeps |<u, w>| at rounding level.
  u -= u.dot(w.coords()) * w.coords();
  u.normalize();
  return Template::normalized(std::cos(beta) * w.coords() + std::sin(beta) * u);
}

RotationMatrix naive_rotation(const Template& t, const Template& c) {
  if (t.dim() != c.dim()) {
    throw std::invalid_argument("naive_rotation: dimension mismatch");
  }
  const double theta = angle(t, c);
  Vector w = c.coords() - t.coords().dot(c.coords()) * t.coords();
  const double wnorm = w.norm();
  if (wnorm < 1e-9) {
    throw std::invalid_argument("naive_rotation: t and c are parallel, plane undefined");
  }
  w /= wnorm;
  const int n = t.dim();
  Eigen::Matrix2d rot;
  rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  Matrix tw(n, 2);
  tw.col(0) = t.coords();
  tw.col(1) = w;
  Matrix r = Matrix::Identity(n, n) - t.coords() * t.coords().transpose() -
             w * w.transpose() + tw * rot * tw.transpose();
  return RotationMatrix(std::move(r));
}

RotationMatrix random_signed_permutation(int n, RandomStream& rng) {
  if (n < 1) throw std::invalid_argument("random_signed_permutation: n must be positive");
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  rng.shuffle(perm);
  Matrix m = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    m(perm[j], j) = rng.coin() ? 1.0 : -1.0;
  }
  return RotationMatrix(std::move(m));
}

}  // namespace sketchlab::sphere
