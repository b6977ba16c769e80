#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sketchlab/ecc.hpp"
#include "sketchlab/ironmask.hpp"
#include "sketchlab/random.hpp"
#include "sketchlab/sphere.hpp"

namespace sketchlab::plra {

enum class SolverKind { kSvd, kLsa };

const char* to_string(SolverKind kind);
SolverKind solver_from_string(const std::string& name);

struct AttackConfig {
  SolverKind solver = SolverKind::kSvd;
  int k = 0;                       // sampled equation count
  double theta_t = 0.0;            // accept threshold, radians
  double d = -1.0;                 // LSA residual bound; < 0 means 1e-6 sqrt(k)
  int t_th = 1;                    // LSA restarts per sampled system
  std::uint64_t max_outer_iterations = 1u << 20;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  int workers = 1;

  double residual_bound() const;
};

struct RowProvenance {
  int source = 0;  // index into the effective source list (M_i or M'_i)
  int row = 0;     // row index within that source
};

/// Output of the linear equation sampler: k stacked rows with provenance.
struct SampledSystem {
  sphere::Matrix rows;  // k x n
  std::vector<RowProvenance> provenance;
  SolverKind mode = SolverKind::kSvd;

  int k() const { return static_cast<int>(rows.rows()); }
  int n() const { return static_cast<int>(rows.cols()); }
};

enum class IterationOutcome : std::uint8_t {
  kAccepted,
  kThresholdRejected,
  kSolverReturnedNone,
  kSolverError,
};

const char* to_string(IterationOutcome outcome);

struct IterationRecord {
  std::uint64_t iteration = 0;
  IterationOutcome outcome = IterationOutcome::kSolverReturnedNone;
  double threshold_angle = -1.0;  // radians; < 0 when no candidate reached the check
};

struct AttackOutcome {
  std::optional<sphere::Template> recovered;
  bool accepted = false;
  std::uint64_t outer_iterations = 0;
  double sampler_time_total = 0.0;  // seconds
  double solver_time_total = 0.0;   // seconds
  std::vector<IterationRecord> trace;
};

/// Measured/projected rates: r_k expected samples until a correct system,
/// t_k seconds per solve, p_k accept rate given a correct system, p_f
/// correct-output rate given acceptance (1 in the noiseless case).
struct RateModel {
  double r_k = 1.0;
  double t_k = 0.0;
  double p_k = 1.0;
  double p_f = 1.0;
};

/// Draws k rows without replacement across the effective sources: the
/// sketches themselves for SVD, the t-1 products M_{i+1} M_1^T for LSA.
/// Each source contributes floor(k/t') rows, remainder rows go one each to
/// the lowest-indexed sources.
SampledSystem sample_equations(std::span<const ironmask::SketchRecord> sketches,
                               SolverKind mode, int k, RandomStream& rng);

/// Unit right singular vector with the smallest singular value; minimizes
/// ||M w|| over the unit sphere. Requires k >= n-1 and a one-dimensional
/// numeric null space.
sphere::Template svd_null_solve(const SampledSystem& system);

/// Two-sketch shortcut: guesses the zero sets U1, U2 of the two codewords,
/// solves the reduced (|U2|) x (n - |U1|) system from M_2 M_1^T by smallest
/// singular vector, re-embeds the zeros and pulls the candidate back
/// through M_1^T.
sphere::Template two_sketch_reduced_solve(const ironmask::SketchRecord& m1,
                                          const ironmask::SketchRecord& m2, int k,
                                          RandomStream& rng);

/// Greedy local search over C_alpha: start from a uniform codeword, move to
/// the best strictly-improving neighbor until stuck; up to t_th restarts;
/// returns the codeword iff its residual ||M c|| <= d.
std::optional<ecc::Codeword> lsa_solve(const SampledSystem& system,
                                       const ecc::CodeParams& params, double d,
                                       int t_th, RandomStream& rng);

struct ThresholdResult {
  bool accepted = false;
  sphere::Template w_r1;
  double angle = 0.0;  // Angle(w_r1, w_r2)
};

/// The threshold determinant: chains two sketch recoveries and accepts
/// (returning w_r1) iff their angle stays within theta_t.
ThresholdResult threshold_check(const sphere::Template& w_cand,
                                const ironmask::SketchRecord& m1,
                                const ironmask::SketchRecord& m2, double theta_t);

/// Full attack loop: sample -> solve -> threshold until acceptance or the
/// iteration budget runs out. Needs at least 2 sketches. With exactly 2
/// sketches in SVD mode the reduced two-sketch solver is used.
AttackOutcome run_attack(std::span<const ironmask::SketchRecord> sketches,
                         const AttackConfig& config);

/// Exact probability that a sampled system is correct: the product over
/// sources of C(n-alpha, l_s) / C(n, l_s), evaluated in log space.
double sampler_success_log2(int n, int alpha, int k, int t_prime);
double sampler_success_prob(int n, int alpha, int k, int t_prime);

/// The closed-form lower bound (1 - alpha/(n-l+1))^k, log2.
double sampler_success_lower_bound_log2(int n, int alpha, int k, int t_prime);

/// Expected wall time of the whole attack: r_k * t_k / (p_k * p_f).
double expected_runtime(const RateModel& model);

}  // namespace sketchlab::plra
