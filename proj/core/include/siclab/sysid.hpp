#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "siclab/model.hpp"

namespace siclab {

// The adversary's deciphered samples {(u_k, x_k)}, k = 0..j.
struct TrajectoryData {
  Matrix states;  // n x N, column t is x_t
  Matrix inputs;  // m x N, column t is u_t
  // n x j, column t-1 is w_t. Present only in oracle mode; the adversary
  // never sees it.
  std::optional<Matrix> noises;

  Index samples() const noexcept { return states.cols(); }
  Index n() const noexcept { return states.rows(); }
  Index m() const noexcept { return inputs.rows(); }
};

struct AttackOptions {
  // Replaces x_0 = w_0. Used for noiseless recovery checks.
  std::optional<Vector> initial_state;
  bool keep_noise = false;
};

// Runs the probing protocol for N = j + 1 samples: x_0 = w_0,
// u_t ~ N(0, sigma_u^2 I), x_{t+1} = A x_t + B u_t + w_{t+1}. Noise and
// inputs come from independent substreams of `seed`.
TrajectoryData simulate_attack(const LinearSystem& sys, const NoiseConfig& noise,
                               Index samples, std::uint64_t seed,
                               const AttackOptions& options = {});

struct IdentificationResult {
  Matrix a_hat;
  Matrix b_hat;
  std::optional<double> epsilon;  // set when the true plant was supplied
  Index entry_count = 0;          // c = n (n + m)
  bool rank_ok = false;
  double singular_value_ratio = 0.0;  // sigma_min(D) / sigma_max(D)
};

// Relative singular-value threshold below which D counts as rank deficient.
inline constexpr double kRankTolerance = 1e-10;

/// Least-squares estimate [A_hat B_hat] = X_f D^+ with D = [X_p; U_p].
///
/// Solved through a Householder QR of D^T rather than the normal equations.
/// Throws InsufficientSamplesError when j < n + m and RankDeficientError
/// when sigma_min(D) <= 1e-10 sigma_max(D); a rank-deficient D never yields
/// a minimum-norm estimate.
IdentificationResult least_squares_identify(const TrajectoryData& data);
IdentificationResult least_squares_identify(const TrajectoryData& data,
                                            const LinearSystem& truth);

// ||[A B] - [A_hat B_hat]||_F^2 / (n (n + m))
double estimation_error(const LinearSystem& truth, const Matrix& a_hat,
                        const Matrix& b_hat);

struct ErrorStatistics {
  double mean = 0.0;
  double standard_error = 0.0;  // sample sd / sqrt(trials); 0 for one trial
  std::vector<double> per_trial;
};

// Seed of trial k under `master_seed`.
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial) noexcept;

// Trials may run concurrently; per_trial is ordered by trial index and the
// result is identical under any schedule. A failing trial aborts the batch
// with a TrialError naming it.
ErrorStatistics mean_error(const LinearSystem& sys, const NoiseConfig& noise,
                           Index samples, std::size_t trials,
                           std::uint64_t master_seed,
                           const AttackOptions& options = {});
ErrorStatistics mean_error(const LinearSystem& sys, const NoiseConfig& noise,
                           Index samples, std::span<const std::uint64_t> seeds,
                           const AttackOptions& options = {});

ErrorStatistics summarize(std::vector<double> per_trial);

// CSV: t,u_1..u_m,x_1..x_n with %.17g values.
void write_trajectory_csv(std::ostream& out, const TrajectoryData& data);

}  // namespace siclab
