#include "sketchlab/ironmask.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sketchlab/digest.hpp"

namespace sketchlab::ironmask {

static_assert(std::endian::native == std::endian::little,
              "record serialization assumes a little-endian host");

void DefenseParams::validate() const {
  if (!(theta_a >= 0.0 && theta_a < M_PI / 2)) {
    throw std::invalid_argument("DefenseParams: theta_a must be in [0, pi/2)");
  }
  if (n_fake < 0) throw std::invalid_argument("DefenseParams: n_fake must be >= 0");
}

std::pair<SketchRecord, ecc::Codeword> sketch(const sphere::Template& w,
                                              const ecc::CodeParams& params,
                                              RandomStream& rng) {
  params.validate();
  if (w.dim() != params.n) throw std::invalid_argument("sketch: dimension mismatch");
  ecc::Codeword c = ecc::sample_codeword(params, rng);
  sphere::RotationMatrix m =
      sphere::random_rotation_mapping(w, c.dense_template(), rng);
  return {SketchRecord{std::move(m), params}, std::move(c)};
}

sphere::Template recover(const sphere::Template& w_prime, const SketchRecord& sk) {
  if (w_prime.dim() != sk.matrix.dim()) {
    throw std::invalid_argument("recover: dimension mismatch");
  }
  const sphere::Vector v = sk.matrix.apply(w_prime.coords());
  const ecc::Codeword c = ecc::decode(v, sk.params);
  return sphere::Template::normalized(sk.matrix.apply_inverse(c.dense()));
}

ProtectedRecord enroll(const sphere::Template& w, const ecc::CodeParams& params,
                       const DefenseParams& defense, std::uint64_t hash_cost,
                       RandomStream& rng, bool commit_binds_matrix) {
  params.validate();
  defense.validate();
  const sphere::Template enrolled =
      defense.theta_a > 0.0 ? sphere::perturb_at_angle(w, defense.theta_a, rng) : w;
  auto [real_sketch, codeword] = sketch(enrolled, params, rng);

  std::vector<sphere::RotationMatrix> matrices;
  matrices.reserve(defense.n_fake + 1);
  matrices.push_back(real_sketch.matrix);
  for (int i = 0; i < defense.n_fake; ++i) {
    // Decoys are sketches of independent random templates, so they are
    // distributed exactly like the true sketch.
    sphere::Template decoy_template = sphere::random_unit(params.n, rng);
    auto [decoy, ignored] = sketch(decoy_template, params, rng);
    matrices.push_back(std::move(decoy.matrix));
  }
  std::vector<int> order(matrices.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  rng.shuffle(order);
  std::vector<sphere::RotationMatrix> shuffled;
  shuffled.reserve(matrices.size());
  for (int idx : order) shuffled.push_back(std::move(matrices[idx]));

  const sphere::RotationMatrix* bound =
      commit_binds_matrix ? &real_sketch.matrix : nullptr;
  std::vector<std::uint8_t> commitment =
      commitment_digest(codeword, bound, hash_cost);
  return ProtectedRecord{params, std::move(shuffled), std::move(commitment),
                         hash_cost, commit_binds_matrix};
}

AuthResult authenticate_detailed(const sphere::Template& w_query,
                                 const ProtectedRecord& record) {
  if (record.matrices.empty()) throw std::invalid_argument("authenticate: empty record");
  if (w_query.dim() != record.params.n) {
    throw std::invalid_argument("authenticate: dimension mismatch");
  }
  AuthResult result;
  double best_angle = std::numeric_limits<double>::infinity();
  ecc::Codeword best_codeword(record.params.n, {0}, {1});
  for (std::size_t i = 0; i < record.matrices.size(); ++i) {
    const sphere::RotationMatrix& m = record.matrices[i];
    const ecc::Codeword c = ecc::decode(m.apply(w_query.coords()), record.params);
    ++result.decode_calls;
    const sphere::Vector recovered = m.apply_inverse(c.dense());
    const double a = sphere::angle_between(recovered, w_query.coords());
    if (a < best_angle) {  // strict: ties keep the lowest record index
      best_angle = a;
      result.best_index = static_cast<int>(i);
      best_codeword = c;
    }
  }
  result.best_angle = best_angle;
  const sphere::RotationMatrix* bound =
      record.commit_binds_matrix ? &record.matrices[result.best_index] : nullptr;
  const std::vector<std::uint8_t> digest =
      commitment_digest(best_codeword, bound, record.hash_cost);
  result.accepted = digest == record.commitment;
  return result;
}

bool authenticate(const sphere::Template& w_query, const ProtectedRecord& record) {
  return authenticate_detailed(w_query, record).accepted;
}

double defense_security_bits(const ecc::CodeParams& params, const DefenseParams& defense) {
  defense.validate();
  return ecc::code_size_bits(params) + std::log2(defense.n_fake + 1.0);
}

std::vector<std::uint8_t> serialize_codeword(const ecc::Codeword& c) {
  std::vector<std::uint8_t> out;
  out.reserve(c.support().size() * 3);
  for (std::size_t i = 0; i < c.support().size(); ++i) {
    const auto idx = static_cast<std::uint16_t>(c.support()[i]);
    out.push_back(static_cast<std::uint8_t>(idx >> 8));
    out.push_back(static_cast<std::uint8_t>(idx & 0xff));
    out.push_back(static_cast<std::uint8_t>(c.signs()[i]));
  }
  return out;
}

std::vector<std::uint8_t> serialize_matrix(const sphere::Matrix& m) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(m.size()) * sizeof(double));
  std::size_t pos = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      std::memcpy(out.data() + pos, &v, sizeof(double));
      pos += sizeof(double);
    }
  }
  return out;
}

std::vector<std::uint8_t> commitment_digest(const ecc::Codeword& c,
                                            const sphere::RotationMatrix* matrix,
                                            std::uint64_t hash_cost) {
  std::vector<std::uint8_t> payload = serialize_codeword(c);
  if (matrix != nullptr) {
    const std::vector<std::uint8_t> mat = serialize_matrix(matrix->entries());
    payload.insert(payload.end(), mat.begin(), mat.end());
  }
  const auto digest = iterated_sha256(payload, hash_cost);
  return {digest.begin(), digest.end()};
}

std::string sidecar_path(const std::string& json_path) {
  const std::size_t dot = json_path.find_last_of('.');
  const std::size_t slash = json_path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return json_path + ".bin";
  }
  return json_path.substr(0, dot) + ".bin";
}

void save_record(const ProtectedRecord& record, const std::string& json_path) {
  nlohmann::json header = {
      {"n", record.params.n},
      {"alpha", record.params.alpha},
      {"n_fake", record.n_fake()},
      {"hash_cost", record.hash_cost},
      {"commit_binds_matrix", record.commit_binds_matrix},
      {"commitment_hex", hex_encode(record.commitment)},
  };
  std::ofstream jf(json_path);
  if (!jf) throw std::runtime_error("save_record: cannot open " + json_path);
  jf << header.dump(2) << "\n";

  std::ofstream bf(sidecar_path(json_path), std::ios::binary);
  if (!bf) throw std::runtime_error("save_record: cannot open " + sidecar_path(json_path));
  for (const auto& m : record.matrices) {
    const std::vector<std::uint8_t> bytes = serialize_matrix(m.entries());
    bf.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
  }
  if (!bf) throw std::runtime_error("save_record: write failed");
}

ProtectedRecord load_record(const std::string& json_path) {
  std::ifstream jf(json_path);
  if (!jf) throw std::runtime_error("load_record: cannot open " + json_path);
  nlohmann::json header = nlohmann::json::parse(jf);
  ecc::CodeParams params{header.at("n").get<int>(), header.at("alpha").get<int>()};
  params.validate();
  const int n_fake = header.at("n_fake").get<int>();
  if (n_fake < 0) throw std::runtime_error("load_record: negative n_fake");

  std::ifstream bf(sidecar_path(json_path), std::ios::binary);
  if (!bf) throw std::runtime_error("load_record: cannot open " + sidecar_path(json_path));
  std::vector<sphere::RotationMatrix> matrices;
  matrices.reserve(n_fake + 1);
  const std::size_t per_matrix = static_cast<std::size_t>(params.n) * params.n;
  std::vector<double> buffer(per_matrix);
  for (int i = 0; i < n_fake + 1; ++i) {
    bf.read(reinterpret_cast<char*>(buffer.data()),
            static_cast<std::streamsize>(per_matrix * sizeof(double)));
    if (!bf) throw std::runtime_error("load_record: truncated matrix data");
    sphere::Matrix m(params.n, params.n);
    for (int r = 0; r < params.n; ++r) {
      for (int c = 0; c < params.n; ++c) {
        m(r, c) = buffer[static_cast<std::size_t>(r) * params.n + c];
      }
    }
    matrices.emplace_back(std::move(m));
  }
  return ProtectedRecord{params, std::move(matrices),
                         hex_decode(header.at("commitment_hex").get<std::string>()),
                         header.at("hash_cost").get<std::uint64_t>(),
                         header.at("commit_binds_matrix").get<bool>()};
}

}  // namespace sketchlab::ironmask
