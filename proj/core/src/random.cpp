#include "sketchlab/random.hpp"

#include <algorithm>
#include <stdexcept>

namespace sketchlab {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t state = seed;
  std::uint64_t a = splitmix64(state);
  state ^= stream_id * 0xda942042e4dd58b5ULL;
  std::uint64_t b = splitmix64(state);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

RandomStream RandomStream::substream(std::uint64_t child) const {
  std::uint64_t state = stream_id_ ^ (child * 0x9e3779b97f4a7c15ULL);
  return RandomStream(seed_, splitmix64(state));
}

double RandomStream::uniform() {
  return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

double RandomStream::normal() {
  return std::normal_distribution<double>(0.0, 1.0)(engine_);
}

std::uint64_t RandomStream::uniform_index(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_index: bound must be positive");
  return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
}

bool RandomStream::coin() { return uniform_index(2) == 1; }

Eigen::VectorXd RandomStream::gaussian_vector(int n) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(engine_);
  return v;
}

std::vector<int> RandomStream::sample_indices(int n, int k) {
  if (k < 0 || k > n) throw std::invalid_argument("sample_indices: need 0 <= k <= n");
  // Floyd's algorithm; O(k) expected, no O(n) scratch.
  std::vector<int> chosen;
  chosen.reserve(k);
  for (int j = n - k; j < n; ++j) {
    int t = static_cast<int>(uniform_index(static_cast<std::uint64_t>(j) + 1));
    if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) {
      chosen.push_back(t);
    } else {
      chosen.push_back(j);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace sketchlab
