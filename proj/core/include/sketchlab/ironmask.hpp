#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sketchlab/ecc.hpp"
#include "sketchlab/random.hpp"
#include "sketchlab/sphere.hpp"

namespace sketchlab::ironmask {

/// Public helper data of the hypersphere secure sketch: an orthogonal
/// matrix mapping the enrolled template to a random codeword.
struct SketchRecord {
  sphere::RotationMatrix matrix;
  ecc::CodeParams params;
};

/// Hardening knobs: extra enrollment noise theta_a in [0, pi/2) and
/// n_fake decoy matrices.
struct DefenseParams {
  double theta_a = 0.0;
  int n_fake = 0;

  void validate() const;
};

/// What a server stores: the true sketch hidden among decoys in random
/// order, plus an iterated-hash commitment to the codeword (optionally
/// binding the sketch matrix as well).
struct ProtectedRecord {
  ecc::CodeParams params;
  std::vector<sphere::RotationMatrix> matrices;  // n_fake + 1, shuffled
  std::vector<std::uint8_t> commitment;
  std::uint64_t hash_cost = 1;
  bool commit_binds_matrix = false;

  int n_fake() const { return static_cast<int>(matrices.size()) - 1; }
};

/// SS: draw c uniformly from C_alpha, return M with M w = c and the codeword.
std::pair<SketchRecord, ecc::Codeword> sketch(const sphere::Template& w,
                                              const ecc::CodeParams& params,
                                              RandomStream& rng);

/// Rec: M^T dense(decode(M w')).
sphere::Template recover(const sphere::Template& w_prime, const SketchRecord& sk);

/// Full enrollment: optional extra noise, decoy matrices (sketches of
/// independent random templates), shuffle, commitment.
ProtectedRecord enroll(const sphere::Template& w, const ecc::CodeParams& params,
                       const DefenseParams& defense, std::uint64_t hash_cost,
                       RandomStream& rng, bool commit_binds_matrix = false);

/// Recovers against every matrix in the record, keeps the candidate whose
/// recovered template is closest in angle to the query (ties to the lowest
/// record index), and checks the recomputed commitment.
bool authenticate(const sphere::Template& w_query, const ProtectedRecord& record);

struct AuthResult {
  bool accepted = false;
  int best_index = -1;
  double best_angle = 0.0;
  int decode_calls = 0;  // always n_fake + 1: one per stored matrix
};

AuthResult authenticate_detailed(const sphere::Template& w_query,
                                 const ProtectedRecord& record);

/// code_size_bits(params) + log2(n_fake + 1).
double defense_security_bits(const ecc::CodeParams& params, const DefenseParams& defense);

/// Commitment payload encodings. Codewords serialize as alpha pairs of
/// (index: 16-bit big-endian, sign byte 0x01/0xff); matrices as row-major
/// little-endian 64-bit floats.
std::vector<std::uint8_t> serialize_codeword(const ecc::Codeword& c);
std::vector<std::uint8_t> serialize_matrix(const sphere::Matrix& m);
std::vector<std::uint8_t> commitment_digest(const ecc::Codeword& c,
                                            const sphere::RotationMatrix* matrix,
                                            std::uint64_t hash_cost);

/// On-disk format: JSON header at `json_path` with fields {n, alpha,
/// n_fake, hash_cost, commit_binds_matrix, commitment_hex}, and the
/// matrices as row-major little-endian doubles in a sidecar binary file
/// (same path with extension replaced by .bin).
void save_record(const ProtectedRecord& record, const std::string& json_path);
ProtectedRecord load_record(const std::string& json_path);

std::string sidecar_path(const std::string& json_path);

}  // namespace sketchlab::ironmask
