#include "sketchlab/tmto.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <span>
#include <stdexcept>

namespace sketchlab::attacks {
namespace {

double log2_binomial(int n, int k) {
  return (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) /
         std::log(2.0);
}

std::uint64_t mix_key(std::uint64_t h, std::int64_t v) {
  h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

/// Dense enumeration of C_h over n coordinates: lexicographic supports,
/// sign patterns as bit masks (bit p set = +1 at the p-th support slot).
struct HalfCodeSet {
  int n = 0;
  int h = 0;
  std::vector<std::int32_t> supports;  // count * h
  std::size_t count = 0;

  std::span<const std::int32_t> support(std::size_t id) const {
    return {supports.data() + (id >> h) * h, static_cast<std::size_t>(h)};
  }
  std::uint32_t sign_mask(std::size_t id) const {
    return static_cast<std::uint32_t>(id & ((1u << h) - 1));
  }
};

HalfCodeSet enumerate_half_codes(int n, int h) {
  HalfCodeSet set;
  set.n = n;
  set.h = h;
  std::vector<std::int32_t> combo(h);
  for (int i = 0; i < h; ++i) combo[i] = i;
  while (true) {
    set.supports.insert(set.supports.end(), combo.begin(), combo.end());
    int pos = h - 1;
    while (pos >= 0 && combo[pos] == n - h + pos) --pos;
    if (pos < 0) break;
    ++combo[pos];
    for (int i = pos + 1; i < h; ++i) combo[i] = combo[i - 1] + 1;
  }
  set.count = (set.supports.size() / h) << h;
  return set;
}

}  // namespace

TmtoResult tmto_attack(const ironmask::SketchRecord& m1,
                       const ironmask::SketchRecord& m2, int m_rows, double bucket,
                       RandomStream& rng, int max_row_retries) {
  const ecc::CodeParams params = m1.params;
  if (m2.params.n != params.n || m2.params.alpha != params.alpha) {
    throw std::invalid_argument("tmto_attack: mismatched sketches");
  }
  if (params.alpha % 2 != 0) {
    throw std::invalid_argument("tmto_attack: alpha must be even");
  }
  if (m_rows < 1 || m_rows > params.n) {
    throw std::invalid_argument("tmto_attack: m_rows out of range");
  }
  if (!(bucket > 0.0)) throw std::invalid_argument("tmto_attack: bucket must be positive");
  if (max_row_retries < 1) {
    throw std::invalid_argument("tmto_attack: max_row_retries must be >= 1");
  }
  const int n = params.n;
  const int h = params.alpha / 2;
  if (h > 20) throw std::invalid_argument("tmto_attack: alpha too large for desk scale");
  const double entries_log2 = h + log2_binomial(n, h);
  if (entries_log2 > std::log2(1e8)) {
    throw std::invalid_argument("tmto_attack: table would exceed the 1e8-entry desk-scale guard");
  }

  const sphere::Matrix product = m2.matrix.entries() * m1.matrix.entries().transpose();
  const HalfCodeSet half = enumerate_half_codes(n, h);
  const double mag = 1.0 / std::sqrt(static_cast<double>(h));
  const double offset_step = std::sqrt(2.0) / std::sqrt(static_cast<double>(params.alpha));
  const double verify_tol = 10.0 * bucket;

  TmtoResult result;
  // Dense image of one half-codeword under the product matrix.
  auto image = [&](std::size_t id) {
    sphere::Vector v = sphere::Vector::Zero(n);
    const auto supp = half.support(id);
    const std::uint32_t mask = half.sign_mask(id);
    for (int p = 0; p < h; ++p) {
      const double s = (mask >> p) & 1u ? mag : -mag;
      v += s * product.col(supp[p]);
    }
    return v;
  };
  auto disjoint = [&](std::size_t a, std::size_t b) {
    const auto sa = half.support(a);
    const auto sb = half.support(b);
    std::size_t i = 0, j = 0;
    while (i < sa.size() && j < sb.size()) {
      if (sa[i] == sb[j]) return false;
      if (sa[i] < sb[j]) ++i;
      else ++j;
    }
    return true;
  };

  std::set<std::pair<std::vector<int>, std::vector<std::int8_t>>> seen;
  for (int attempt = 0; attempt < max_row_retries; ++attempt) {
    result.row_retries_used = attempt + 1;
    const std::vector<int> rows = rng.sample_indices(n, m_rows);

    // Key values t_a^i on the chosen rows, quantized to buckets.
    std::vector<std::int64_t> floors(half.count * m_rows);
    TmtoTable table;
    table.chosen_rows = rows;
    table.bucket = bucket;
    for (std::size_t id = 0; id < half.count; ++id) {
      const auto supp = half.support(id);
      const std::uint32_t mask = half.sign_mask(id);
      std::uint64_t key = 0;
      for (int r = 0; r < m_rows; ++r) {
        double t = 0.0;
        for (int p = 0; p < h; ++p) {
          const double s = (mask >> p) & 1u ? mag : -mag;
          t += s * product(rows[r], supp[p]);
        }
        const auto f = static_cast<std::int64_t>(std::floor(t / bucket));
        floors[id * m_rows + r] = f;
        key = mix_key(key, f);
      }
      table.entries[key].push_back(static_cast<std::int32_t>(id));
    }
    table.size = half.count;
    result.table_size = table.size;

    // Collision scan: probe every adjacent bucket tuple of every entry.
    std::vector<std::int64_t> probe(m_rows);
    std::vector<ecc::Codeword> candidates;
    for (std::size_t id = 0; id < half.count; ++id) {
      const std::int64_t* base = floors.data() + id * m_rows;
      const int total = 1;
      int combos = 1;
      for (int r = 0; r < m_rows; ++r) combos *= 3;
      for (int c = 0; c < combos * total; ++c) {
        int rem = c;
        std::uint64_t key = 0;
        for (int r = 0; r < m_rows; ++r) {
          probe[r] = base[r] + (rem % 3) - 1;
          rem /= 3;
          key = mix_key(key, probe[r]);
        }
        const auto it = table.entries.find(key);
        if (it == table.entries.end()) continue;
        for (std::int32_t other : it->second) {
          const auto j = static_cast<std::size_t>(other);
          if (j <= id) continue;
          ++result.pairs_checked;
          if (!disjoint(id, j)) continue;
          const sphere::Vector diff = image(id) - image(j);
          bool ok = true;
          for (int r = 0; r < n && ok; ++r) {
            const double v = std::abs(diff[r]);
            ok = v <= verify_tol || std::abs(v - offset_step) <= verify_tol;
          }
          if (!ok) continue;
          ++result.pairs_verified;
          // Candidate c_1 = (a - b) / sqrt(2).
          std::vector<std::pair<int, std::int8_t>> entries;
          const auto sa = half.support(id);
          const std::uint32_t ma = half.sign_mask(id);
          for (int p = 0; p < h; ++p) {
            entries.emplace_back(sa[p], ((ma >> p) & 1u) ? 1 : -1);
          }
          const auto sb = half.support(j);
          const std::uint32_t mb = half.sign_mask(j);
          for (int p = 0; p < h; ++p) {
            entries.emplace_back(sb[p], ((mb >> p) & 1u) ? -1 : 1);
          }
          std::sort(entries.begin(), entries.end());
          std::vector<int> support(entries.size());
          std::vector<std::int8_t> signs(entries.size());
          for (std::size_t p = 0; p < entries.size(); ++p) {
            support[p] = entries[p].first;
            signs[p] = entries[p].second;
          }
          if (seen.emplace(support, signs).second) {
            candidates.emplace_back(n, std::move(support), std::move(signs));
          }
        }
      }
    }
    if (!candidates.empty()) {
      result.candidates = std::move(candidates);
      return result;
    }
  }
  return result;
}

TmtoCost tmto_cost(int n, int alpha, int num_rows_m, int value_bits) {
  if (alpha % 2 != 0 || alpha < 2 || alpha >= n) {
    throw std::invalid_argument("tmto_cost: need even alpha in [2, n)");
  }
  if (num_rows_m < 1 || value_bits < 1) {
    throw std::invalid_argument("tmto_cost: num_rows_m and value_bits must be positive");
  }
  const int h = alpha / 2;
  TmtoCost cost;
  cost.num_rows_m = num_rows_m;
  cost.table_entries_log2 = h + log2_binomial(n, h);
  cost.storage_entries_log2 = cost.table_entries_log2 - 0.5 * log2_binomial(alpha, h);
  const double base = std::log2(static_cast<double>(alpha) * n / (2.0 * (n - alpha)));
  cost.additions_log2 = base + cost.storage_entries_log2 + std::log2(num_rows_m) +
                        num_rows_m * std::log2(static_cast<double>(n) / (n - alpha));
  const double codeword_bytes = h * std::log2(static_cast<double>(n)) / 8.0;
  const double value_bytes = num_rows_m * value_bits / 8.0;
  cost.storage_bytes = std::exp2(cost.storage_entries_log2) * (codeword_bytes + value_bytes);
  return cost;
}

}  // namespace sketchlab::attacks
