#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sketchlab {

/// SHA-256 applied `cost` times: h_1 = H(data), h_i = H(h_{i-1}).
/// The iteration count stands in for a configurable slow hash.
std::array<std::uint8_t, 32> iterated_sha256(std::span<const std::uint8_t> data,
                                             std::uint64_t cost);

std::string hex_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> hex_decode(const std::string& hex);

}  // namespace sketchlab
