#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace sketchlab {

/// Deterministic random source addressed by a (seed, stream_id) pair.
/// Two streams constructed from the same pair produce identical draws;
/// distinct stream ids give statistically independent sequences, which is
/// what parallel callers must use.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Derives a child stream; substream(i) is deterministic in (seed,
  /// stream_id, i). Used for per-trial and per-iteration randomness.
  RandomStream substream(std::uint64_t child) const;

  /// Uniform double in [0, 1).
  double uniform();

  /// Standard normal draw.
  double normal();

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);

  /// true with probability 1/2.
  bool coin();

  /// Vector of n i.i.d. standard normals.
  Eigen::VectorXd gaussian_vector(int n);

  /// k distinct values from {0, ..., n-1}, sorted ascending.
  std::vector<int> sample_indices(int n, int k);

  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[uniform_index(i)]);
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace sketchlab
