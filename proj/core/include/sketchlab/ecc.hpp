#pragma once

#include <cstdint>
#include <vector>

#include "sketchlab/random.hpp"
#include "sketchlab/sphere.hpp"

namespace sketchlab::ecc {

/// Code parameters for C_alpha on S^{n-1}: codewords with exactly alpha
/// non-zero entries of +-1/sqrt(alpha).
struct CodeParams {
  int n = 0;
  int alpha = 0;

  void validate() const;
};

/// Sparse codeword: alpha strictly increasing support indices with signs.
class Codeword {
 public:
  Codeword(int n, std::vector<int> support, std::vector<std::int8_t> signs);

  int n() const { return n_; }
  int alpha() const { return static_cast<int>(support_.size()); }
  const std::vector<int>& support() const { return support_; }
  const std::vector<std::int8_t>& signs() const { return signs_; }

  sphere::Vector dense() const;
  sphere::Template dense_template() const;
  Codeword negated() const;

  bool operator==(const Codeword& other) const = default;

 private:
  int n_;
  std::vector<int> support_;
  std::vector<std::int8_t> signs_;
};

/// Uniform draw from C_alpha: uniform alpha-subset support and independent
/// uniform signs.
Codeword sample_codeword(const CodeParams& params, RandomStream& rng);

/// Nearest-codeword decoding: support = the alpha largest |u_i| (ties to
/// the lowest index), sign(u_i) at each kept index with sign(0) := +1.
/// Equals argmax over C_alpha of <u, c>. Total function.
Codeword decode(const sphere::Vector& u, const CodeParams& params);
Codeword decode(const sphere::Template& u, const CodeParams& params);

/// Design distance of C_alpha: (1/2) arccos(1 - 1/alpha). Decoding is
/// guaranteed for inputs within half this angle of a codeword.
double design_distance(const CodeParams& params);

/// log2 |C_alpha| = log2 C(n, alpha) + alpha, evaluated in log space.
double code_size_bits(const CodeParams& params);

/// All codewords at Euclidean distance sqrt(2)/sqrt(alpha) from c: one
/// support index moved to a non-support index, either sign at the
/// destination. Exactly 2 alpha (n - alpha) codewords.
std::vector<Codeword> neighbors(const Codeword& c);

/// True iff every column of T is within tol of +-e_i for distinct i, i.e.
/// T is a signed permutation. These are exactly the orthogonal maps
/// sending C_alpha into C_alpha (alpha not in {2, n}).
bool is_signed_permutation(const sphere::RotationMatrix& t, double tol = 1e-6);

}  // namespace sketchlab::ecc
