#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "sketchlab/ecc.hpp"
#include "sketchlab/ironmask.hpp"
#include "sketchlab/random.hpp"

namespace sketchlab::attacks {

/// Meet-in-the-middle table over the half-weight code C_{alpha/2}: maps the
/// quantized tuple (t_a^{i_1}, ..., t_a^{i_m}) to the half-codewords that
/// produce it, where t_a^i = sum_j a_j m_{ij} on the chosen rows i.
struct TmtoTable {
  std::vector<int> chosen_rows;
  double bucket = 0.0;
  // Key tuples are packed row-major into a flat vector of floor(t/bucket).
  std::unordered_map<std::uint64_t, std::vector<std::int32_t>> entries;
  std::size_t size = 0;
};

/// Cost model of the trade-off at full scale, log2 where noted.
struct TmtoCost {
  double table_entries_log2 = 0.0;    // |C_{alpha/2}|, the enumerated set
  double storage_entries_log2 = 0.0;  // after the sqrt(C(alpha, alpha/2)) discount
  double additions_log2 = 0.0;
  double storage_bytes = 0.0;
  int num_rows_m = 0;
};

struct TmtoResult {
  std::vector<ecc::Codeword> candidates;
  std::uint64_t pairs_checked = 0;   // collision pairs examined across retries
  std::uint64_t pairs_verified = 0;  // pairs surviving the full-row check
  int row_retries_used = 0;          // fresh row draws consumed (>= 1)
  std::size_t table_size = 0;
};

/// Meet-in-the-middle recovery of c_1 from two sketches of the same
/// template: builds the table over all a in C_{alpha/2} on m_rows rows of
/// M_2 M_1^T assumed zero in c_2, collects key collisions t_a = t_b
/// (adjacent buckets included), and keeps disjoint-support pairs whose
/// difference matches an offset in {0, +-sqrt(2)/sqrt(alpha)} on every row.
/// Candidates are (a - b)/sqrt(2). A retry draws fresh rows when no
/// candidate survives (the chosen rows may hit non-zero entries of c_2).
/// Desk scale only: refuses tables beyond 1e8 entries.
TmtoResult tmto_attack(const ironmask::SketchRecord& m1,
                       const ironmask::SketchRecord& m2, int m_rows, double bucket,
                       RandomStream& rng, int max_row_retries = 1);

/// Storage and addition counts of the trade-off at (n, alpha), following
/// the half-split accounting: entries = 2^{alpha/2} C(n, alpha/2), reduced
/// by sqrt(C(alpha, alpha/2)); additions = alpha n / (2(n - alpha)) times
/// the reduced entry count, scaled by num_rows_m (n/(n-alpha))^{num_rows_m};
/// storage bytes charge alpha/2 log2(n) bits per codeword plus one
/// value_bits word per chosen row.
TmtoCost tmto_cost(int n, int alpha, int num_rows_m, int value_bits);

}  // namespace sketchlab::attacks
