#include "sketchlab/ecc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sketchlab::ecc {
namespace {

double log2_binomial(int n, int k) {
  return (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) /
         std::log(2.0);
}

}  // namespace

void CodeParams::validate() const {
  if (n < 3) throw std::invalid_argument("CodeParams: n must be at least 3");
  if (alpha < 1 || alpha > n) {
    throw std::invalid_argument("CodeParams: need 1 <= alpha <= n");
  }
}

Codeword::Codeword(int n, std::vector<int> support, std::vector<std::int8_t> signs)
    : n_(n), support_(std::move(support)), signs_(std::move(signs)) {
  if (support_.empty() || support_.size() != signs_.size()) {
    throw std::invalid_argument("Codeword: support/sign size mismatch");
  }
  if (static_cast<int>(support_.size()) > n_) {
    throw std::invalid_argument("Codeword: more support indices than dimensions");
  }
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (support_[i] < 0 || support_[i] >= n_) {
      throw std::invalid_argument("Codeword: support index out of range");
    }
    if (i > 0 && support_[i] <= support_[i - 1]) {
      throw std::invalid_argument("Codeword: support must be strictly increasing");
    }
    if (signs_[i] != 1 && signs_[i] != -1) {
      throw std::invalid_argument("Codeword: signs must be +-1");
    }
  }
}

sphere::Vector Codeword::dense() const {
  sphere::Vector v = sphere::Vector::Zero(n_);
  const double mag = 1.0 / std::sqrt(static_cast<double>(alpha()));
  for (std::size_t i = 0; i < support_.size(); ++i) {
    v[support_[i]] = signs_[i] * mag;
  }
  return v;
}

sphere::Template Codeword::dense_template() const {
  return sphere::Template::normalized(dense());
}

Codeword Codeword::negated() const {
  std::vector<std::int8_t> flipped(signs_.size());
  for (std::size_t i = 0; i < signs_.size(); ++i) flipped[i] = -signs_[i];
  return Codeword(n_, support_, std::move(flipped));
}

Codeword sample_codeword(const CodeParams& params, RandomStream& rng) {
  params.validate();
  std::vector<int> support = rng.sample_indices(params.n, params.alpha);
  std::vector<std::int8_t> signs(params.alpha);
  for (auto& s : signs) s = rng.coin() ? 1 : -1;
  return Codeword(params.n, std::move(support), std::move(signs));
}

Codeword decode(const sphere::Vector& u, const CodeParams& params) {
  params.validate();
  if (u.size() != params.n) throw std::invalid_argument("decode: dimension mismatch");
  std::vector<int> order(params.n);
  std::iota(order.begin(), order.end(), 0);
  std::nth_element(order.begin(), order.begin() + params.alpha - 1, order.end(),
                   [&](int a, int b) {
                     const double ma = std::abs(u[a]);
                     const double mb = std::abs(u[b]);
                     if (ma != mb) return ma > mb;
                     return a < b;  // ties: lowest index wins
                   });
  std::vector<int> support(order.begin(), order.begin() + params.alpha);
  std::sort(support.begin(), support.end());
  std::vector<std::int8_t> signs(params.alpha);
  for (int i = 0; i < params.alpha; ++i) {
    signs[i] = u[support[i]] < 0.0 ? -1 : 1;  // sign(0) := +1
  }
  return Codeword(params.n, std::move(support), std::move(signs));
}

Codeword decode(const sphere::Template& u, const CodeParams& params) {
  return decode(u.coords(), params);
}

double design_distance(const CodeParams& params) {
  params.validate();
  return 0.5 * std::acos(1.0 - 1.0 / static_cast<double>(params.alpha));
}

double code_size_bits(const CodeParams& params) {
  params.validate();
  return log2_binomial(params.n, params.alpha) + params.alpha;
}

std::vector<Codeword> neighbors(const Codeword& c) {
  const int n = c.n();
  const int alpha = c.alpha();
  std::vector<bool> in_support(n, false);
  for (int idx : c.support()) in_support[idx] = true;

  std::vector<Codeword> result;
  result.reserve(static_cast<std::size_t>(2 * alpha * (n - alpha)));
  for (int drop = 0; drop < alpha; ++drop) {
    std::vector<int> support;
    std::vector<std::int8_t> signs;
    support.reserve(alpha);
    signs.reserve(alpha);
    for (int i = 0; i < alpha; ++i) {
      if (i == drop) continue;
      support.push_back(c.support()[i]);
      signs.push_back(c.signs()[i]);
    }
    for (int dest = 0; dest < n; ++dest) {
      if (in_support[dest]) continue;
      auto pos = std::upper_bound(support.begin(), support.end(), dest);
      const auto offset = pos - support.begin();
      for (std::int8_t sign : {std::int8_t{1}, std::int8_t{-1}}) {
        std::vector<int> s2 = support;
        std::vector<std::int8_t> g2 = signs;
        s2.insert(s2.begin() + offset, dest);
        g2.insert(g2.begin() + offset, sign);
        result.emplace_back(n, std::move(s2), std::move(g2));
      }
    }
  }
  return result;
}

bool is_signed_permutation(const sphere::RotationMatrix& t, double tol) {
  const int n = t.dim();
  const sphere::Matrix& m = t.entries();
  std::vector<bool> row_used(n, false);
  for (int j = 0; j < n; ++j) {
    int hit = -1;
    for (int i = 0; i < n; ++i) {
      const double v = std::abs(m(i, j));
      if (std::abs(v - 1.0) <= tol) {
        if (hit >= 0) return false;
        hit = i;
      } else if (v > tol) {
        return false;
      }
    }
    if (hit < 0 || row_used[hit]) return false;
    row_used[hit] = true;
  }
  return true;
}

}  // namespace sketchlab::ecc
