#include "sketchlab/plra.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace sketchlab::plra {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double log2_binomial(double n, double k) {
  return (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) /
         std::log(2.0);
}

// Smallest right singular vector of a k x n matrix (k >= n-1), with a
// check that the numeric null space is one-dimensional.
sphere::Vector smallest_right_singular_vector(const sphere::Matrix& m,
                                              const char* who) {
  const int rows = static_cast<int>(m.rows());
  const int cols = static_cast<int>(m.cols());
  if (rows < cols - 1) {
    throw std::invalid_argument(std::string(who) + ": need at least n-1 rows");
  }
  Eigen::BDCSVD<sphere::Matrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = 1e-10 * std::max(sv[0], 1e-300);
  // sv has min(rows, cols) entries, descending. Null directions beyond the
  // expected one show up as additional tiny singular values.
  int tiny = cols - static_cast<int>(sv.size());  // columns with no singular value
  for (int i = 0; i < sv.size(); ++i) {
    if (sv[i] <= tol) ++tiny;
  }
  if (tiny > 1) {
    throw std::runtime_error(std::string(who) + ": numeric null space has dimension " +
                             std::to_string(tiny) + ", expected at most 1");
  }
  return svd.matrixV().col(cols - 1);
}

void validate_sketch_set(std::span<const ironmask::SketchRecord> sketches,
                         const char* who) {
  if (sketches.size() < 2) {
    throw std::invalid_argument(std::string(who) +
                                ": the multi-use attack needs at least 2 sketches");
  }
  const ecc::CodeParams& p = sketches[0].params;
  for (const auto& sk : sketches) {
    if (sk.params.n != p.n || sk.params.alpha != p.alpha || sk.matrix.dim() != p.n) {
      throw std::invalid_argument(std::string(who) + ": mismatched sketch parameters");
    }
  }
}

struct IterationResult {
  IterationRecord record;
  std::optional<sphere::Template> candidate;
  double sampler_seconds = 0.0;
  double solver_seconds = 0.0;
};

}  // namespace

const char* to_string(SolverKind kind) {
  return kind == SolverKind::kSvd ? "svd" : "lsa";
}

SolverKind solver_from_string(const std::string& name) {
  if (name == "svd" || name == "SVD") return SolverKind::kSvd;
  if (name == "lsa" || name == "LSA") return SolverKind::kLsa;
  throw std::invalid_argument("unknown solver '" + name + "' (expected svd or lsa)");
}

const char* to_string(IterationOutcome outcome) {
  switch (outcome) {
    case IterationOutcome::kAccepted:
      return "accepted";
    case IterationOutcome::kThresholdRejected:
      return "threshold_rejected";
    case IterationOutcome::kSolverReturnedNone:
      return "solver_returned_none";
    case IterationOutcome::kSolverError:
      return "solver_error";
  }
  return "unknown";
}

double AttackConfig::residual_bound() const {
  if (d > 0.0) return d;
  return 1e-6 * std::sqrt(static_cast<double>(std::max(k, 1)));
}

SampledSystem sample_equations(std::span<const ironmask::SketchRecord> sketches,
                               SolverKind mode, int k, RandomStream& rng) {
  validate_sketch_set(sketches, "sample_equations");
  const int t = static_cast<int>(sketches.size());
  const int t_prime = mode == SolverKind::kSvd ? t : t - 1;
  const int n = sketches[0].params.n;
  if (k < 1 || k > t_prime * n) {
    throw std::invalid_argument("sample_equations: k out of range for " +
                                std::to_string(t_prime) + " sources");
  }

  const int l = k / t_prime;
  const int remainder = k % t_prime;

  SampledSystem system;
  system.mode = mode;
  system.rows.resize(k, n);
  system.provenance.reserve(k);

  const sphere::Matrix& m1 = sketches[0].matrix.entries();
  int out = 0;
  for (int s = 0; s < t_prime; ++s) {
    const int rows_here = l + (s < remainder ? 1 : 0);
    if (rows_here == 0) continue;
    const std::vector<int> picked = rng.sample_indices(n, rows_here);
    for (int r : picked) {
      if (mode == SolverKind::kSvd) {
        system.rows.row(out) = sketches[s].matrix.entries().row(r);
      } else {
        // Row r of M'_s = M_{s+1} M_1^T, materialized without forming the
        // full product.
        system.rows.row(out) = sketches[s + 1].matrix.entries().row(r) * m1.transpose();
      }
      system.provenance.push_back(RowProvenance{s, r});
      ++out;
    }
  }
  return system;
}

sphere::Template svd_null_solve(const SampledSystem& system) {
  const int n = system.n();
  if (system.k() < n - 1) {
    throw std::invalid_argument("svd_null_solve: need k >= n-1 equations");
  }
  return sphere::Template::normalized(
      smallest_right_singular_vector(system.rows, "svd_null_solve"));
}

namespace {

sphere::Template two_sketch_reduced_solve_impl(const sphere::Matrix& product,
                                               const sphere::Matrix& m1, int k,
                                               RandomStream& rng) {
  const int n = static_cast<int>(product.rows());
  if (k < 2 || k > 2 * n) {
    throw std::invalid_argument("two_sketch_reduced_solve: k out of range");
  }
  const int size_u1 = (k + 1) / 2;  // zero-set guess in c_1; extra row goes first
  const int size_u2 = k / 2;        // zero-set guess in c_2
  const std::vector<int> u1 = rng.sample_indices(n, size_u1);
  const std::vector<int> u2 = rng.sample_indices(n, size_u2);

  std::vector<bool> in_u1(n, false);
  for (int j : u1) in_u1[j] = true;
  std::vector<int> free_cols;
  free_cols.reserve(n - size_u1);
  for (int j = 0; j < n; ++j) {
    if (!in_u1[j]) free_cols.push_back(j);
  }

  sphere::Matrix reduced(size_u2, static_cast<int>(free_cols.size()));
  for (int i = 0; i < size_u2; ++i) {
    for (std::size_t j = 0; j < free_cols.size(); ++j) {
      reduced(i, static_cast<int>(j)) = product(u2[i], free_cols[j]);
    }
  }
  const sphere::Vector u =
      smallest_right_singular_vector(reduced, "two_sketch_reduced_solve");
  sphere::Vector candidate = sphere::Vector::Zero(n);
  for (std::size_t j = 0; j < free_cols.size(); ++j) {
    candidate[free_cols[j]] = u[static_cast<int>(j)];
  }
  return sphere::Template::normalized(m1.transpose() * candidate);
}

}  // namespace

sphere::Template two_sketch_reduced_solve(const ironmask::SketchRecord& m1,
                                          const ironmask::SketchRecord& m2, int k,
                                          RandomStream& rng) {
  if (m1.params.n != m2.params.n || m1.params.alpha != m2.params.alpha) {
    throw std::invalid_argument("two_sketch_reduced_solve: mismatched sketches");
  }
  const sphere::Matrix product = m2.matrix.entries() * m1.matrix.entries().transpose();
  return two_sketch_reduced_solve_impl(product, m1.matrix.entries(), k, rng);
}

std::optional<ecc::Codeword> lsa_solve(const SampledSystem& system,
                                       const ecc::CodeParams& params, double d,
                                       int t_th, RandomStream& rng) {
  if (system.mode != SolverKind::kLsa) {
    throw std::invalid_argument("lsa_solve: system was not sampled in LSA mode");
  }
  params.validate();
  if (system.n() != params.n) throw std::invalid_argument("lsa_solve: dimension mismatch");
  if (!(d > 0.0)) throw std::invalid_argument("lsa_solve: residual bound d must be positive");
  if (t_th < 1) throw std::invalid_argument("lsa_solve: t_th must be >= 1");

  const sphere::Matrix& m = system.rows;
  const int n = params.n;
  const int alpha = params.alpha;
  const double mag = 1.0 / std::sqrt(static_cast<double>(alpha));
  const sphere::Vector col_sq = m.colwise().squaredNorm();

  std::vector<int> support(alpha);
  std::vector<std::int8_t> signs(alpha);
  std::vector<bool> in_support(n, false);
  sphere::Vector residual(system.k());
  sphere::Vector stripped(system.k());
  sphere::Vector dots(n);

  auto rebuild_residual = [&]() {
    residual.setZero();
    for (int p = 0; p < alpha; ++p) {
      residual += (signs[p] * mag) * m.col(support[p]);
    }
  };

  for (int restart = 0; restart < t_th; ++restart) {
    const ecc::Codeword start = ecc::sample_codeword(params, rng);
    std::copy(start.support().begin(), start.support().end(), support.begin());
    std::copy(start.signs().begin(), start.signs().end(), signs.begin());
    std::fill(in_support.begin(), in_support.end(), false);
    for (int idx : support) in_support[idx] = true;
    rebuild_residual();
    double norm_sq = residual.squaredNorm();

    while (true) {
      int best_pos = -1;
      int best_dest = -1;
      std::int8_t best_sign = 1;
      double best_norm_sq = norm_sq;
      for (int p = 0; p < alpha; ++p) {
        const double val = signs[p] * mag;
        stripped = residual - val * m.col(support[p]);
        const double base = stripped.squaredNorm();
        dots.noalias() = m.transpose() * stripped;
        for (int j = 0; j < n; ++j) {
          if (in_support[j]) continue;
          // Best destination sign is the one opposing the projection.
          const double cand = base + mag * mag * col_sq[j] - 2.0 * mag * std::abs(dots[j]);
          if (cand < best_norm_sq) {
            best_norm_sq = cand;
            best_pos = p;
            best_dest = j;
            best_sign = dots[j] > 0.0 ? -1 : 1;
          }
        }
      }
      if (best_pos < 0) break;  // no strictly improving neighbor
      in_support[support[best_pos]] = false;
      in_support[best_dest] = true;
      support[best_pos] = best_dest;
      signs[best_pos] = best_sign;
      rebuild_residual();
      norm_sq = residual.squaredNorm();
    }

    if (std::sqrt(norm_sq) <= d) {
      std::vector<std::pair<int, std::int8_t>> entries(alpha);
      for (int p = 0; p < alpha; ++p) entries[p] = {support[p], signs[p]};
      std::sort(entries.begin(), entries.end());
      std::vector<int> sorted_support(alpha);
      std::vector<std::int8_t> sorted_signs(alpha);
      for (int p = 0; p < alpha; ++p) {
        sorted_support[p] = entries[p].first;
        sorted_signs[p] = entries[p].second;
      }
      return ecc::Codeword(n, std::move(sorted_support), std::move(sorted_signs));
    }
  }
  return std::nullopt;
}

ThresholdResult threshold_check(const sphere::Template& w_cand,
                                const ironmask::SketchRecord& m1,
                                const ironmask::SketchRecord& m2, double theta_t) {
  sphere::Template w_r1 = ironmask::recover(w_cand, m1);
  const sphere::Template w_r2 = ironmask::recover(w_r1, m2);
  const double a = sphere::angle(w_r1, w_r2);
  return ThresholdResult{a <= theta_t, std::move(w_r1), a};
}

namespace {

IterationResult run_iteration(std::span<const ironmask::SketchRecord> sketches,
                              const AttackConfig& config,
                              const sphere::Matrix* two_sketch_product,
                              std::uint64_t iteration) {
  IterationResult result;
  result.record.iteration = iteration;
  RandomStream rng = RandomStream(config.seed, config.stream_id).substream(iteration);

  std::optional<sphere::Template> candidate;
  try {
    if (config.solver == SolverKind::kSvd) {
      if (two_sketch_product != nullptr) {
        const auto start = Clock::now();
        candidate = two_sketch_reduced_solve_impl(
            *two_sketch_product, sketches[0].matrix.entries(), config.k, rng);
        result.solver_seconds = seconds_since(start);
      } else {
        const auto sample_start = Clock::now();
        const SampledSystem system =
            sample_equations(sketches, SolverKind::kSvd, config.k, rng);
        result.sampler_seconds = seconds_since(sample_start);
        const auto solve_start = Clock::now();
        candidate = svd_null_solve(system);
        result.solver_seconds = seconds_since(solve_start);
      }
    } else {
      const auto sample_start = Clock::now();
      const SampledSystem system =
          sample_equations(sketches, SolverKind::kLsa, config.k, rng);
      result.sampler_seconds = seconds_since(sample_start);
      const auto solve_start = Clock::now();
      const std::optional<ecc::Codeword> code =
          lsa_solve(system, sketches[0].params, config.residual_bound(), config.t_th, rng);
      result.solver_seconds = seconds_since(solve_start);
      if (code.has_value()) {
        candidate = sphere::Template::normalized(
            sketches[0].matrix.entries().transpose() * code->dense());
      }
    }
  } catch (const std::runtime_error&) {
    result.record.outcome = IterationOutcome::kSolverError;
    return result;
  }

  if (!candidate.has_value()) {
    result.record.outcome = IterationOutcome::kSolverReturnedNone;
    return result;
  }
  ThresholdResult check =
      threshold_check(*candidate, sketches[0], sketches[1], config.theta_t);
  result.record.threshold_angle = check.angle;
  if (check.accepted) {
    result.record.outcome = IterationOutcome::kAccepted;
    result.candidate = std::move(check.w_r1);
  } else {
    result.record.outcome = IterationOutcome::kThresholdRejected;
  }
  return result;
}

}  // namespace

AttackOutcome run_attack(std::span<const ironmask::SketchRecord> sketches,
                         const AttackConfig& config) {
  validate_sketch_set(sketches, "run_attack");
  const int n = sketches[0].params.n;
  if (config.solver == SolverKind::kSvd && config.k < n - 1) {
    throw std::invalid_argument("run_attack: SVD solver needs k >= n-1");
  }
  if (config.k < 1) throw std::invalid_argument("run_attack: k must be positive");
  if (config.t_th < 1) throw std::invalid_argument("run_attack: t_th must be >= 1");

  // The two-sketch SVD shortcut reuses one precomputed product.
  std::optional<sphere::Matrix> product;
  if (config.solver == SolverKind::kSvd && sketches.size() == 2) {
    product = sketches[1].matrix.entries() * sketches[0].matrix.entries().transpose();
  }
  const sphere::Matrix* product_ptr = product.has_value() ? &*product : nullptr;

  AttackOutcome outcome;
  const int workers = std::max(1, config.workers);
  std::uint64_t next = 0;
  while (next < config.max_outer_iterations && !outcome.accepted) {
    const std::uint64_t batch =
        std::min<std::uint64_t>(workers, config.max_outer_iterations - next);
    std::vector<IterationResult> results(batch);
    if (workers == 1) {
      results[0] = run_iteration(sketches, config, product_ptr, next);
    } else {
      std::vector<std::future<IterationResult>> futures;
      futures.reserve(batch);
      for (std::uint64_t b = 0; b < batch; ++b) {
        futures.push_back(std::async(std::launch::async, run_iteration, sketches,
                                     std::cref(config), product_ptr, next + b));
      }
      for (std::uint64_t b = 0; b < batch; ++b) results[b] = futures[b].get();
    }
    // Scan in iteration order so the first acceptance is deterministic
    // regardless of scheduling.
    for (std::uint64_t b = 0; b < batch; ++b) {
      IterationResult& r = results[b];
      outcome.sampler_time_total += r.sampler_seconds;
      outcome.solver_time_total += r.solver_seconds;
      ++outcome.outer_iterations;
      outcome.trace.push_back(r.record);
      if (r.record.outcome == IterationOutcome::kAccepted) {
        outcome.accepted = true;
        outcome.recovered = std::move(r.candidate);
        break;
      }
    }
    next += batch;
  }
  return outcome;
}

double sampler_success_log2(int n, int alpha, int k, int t_prime) {
  if (n < 1 || alpha < 0 || alpha > n) {
    throw std::invalid_argument("sampler_success_log2: bad (n, alpha)");
  }
  if (t_prime < 1 || k < 0 || k > t_prime * n) {
    throw std::invalid_argument("sampler_success_log2: bad (k, t_prime)");
  }
  const int l = k / t_prime;
  const int remainder = k % t_prime;
  double total = 0.0;
  for (int s = 0; s < t_prime; ++s) {
    const int ls = l + (s < remainder ? 1 : 0);
    if (ls == 0) continue;
    if (ls > n - alpha) return -std::numeric_limits<double>::infinity();
    total += log2_binomial(n - alpha, ls) - log2_binomial(n, ls);
  }
  return total;
}

double sampler_success_prob(int n, int alpha, int k, int t_prime) {
  return std::exp2(sampler_success_log2(n, alpha, k, t_prime));
}

double sampler_success_lower_bound_log2(int n, int alpha, int k, int t_prime) {
  if (t_prime < 1) throw std::invalid_argument("sampler_success_lower_bound_log2: bad t_prime");
  const int l = std::max(1, k / t_prime);
  const double ratio = 1.0 - static_cast<double>(alpha) / (n - l + 1);
  if (ratio <= 0.0) return -std::numeric_limits<double>::infinity();
  return k * std::log2(ratio);
}

double expected_runtime(const RateModel& model) {
  if (!(model.r_k > 0.0) || !(model.t_k >= 0.0)) {
    throw std::invalid_argument("expected_runtime: r_k and t_k must be positive");
  }
  if (!(model.p_k > 0.0 && model.p_k <= 1.0) || !(model.p_f > 0.0 && model.p_f <= 1.0)) {
    throw std::invalid_argument("expected_runtime: p_k and p_f must be in (0, 1]");
  }
  return model.r_k * model.t_k / (model.p_k * model.p_f);
}

}  // namespace sketchlab::plra
