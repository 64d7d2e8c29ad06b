#include "siclab/sysid.hpp"

#include <cmath>
#include <exception>
#include <numeric>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "parallel.hpp"
#include "siclab/errors.hpp"
#include "siclab/format.hpp"
#include "siclab/random.hpp"

namespace siclab {

namespace {

enum Substream : std::uint64_t { kNoiseStream = 1, kInputStream = 2 };

}  // namespace

TrajectoryData simulate_attack(const LinearSystem& sys, const NoiseConfig& noise,
                               Index samples, std::uint64_t seed,
                               const AttackOptions& options) {
  if (samples < 2) throw InputError("N must be >= 2");
  const Index n = sys.n();
  const Index m = sys.m();
  const Index j = samples - 1;

  GaussianStream noise_stream(derive_seed({seed, kNoiseStream}));
  GaussianStream input_stream(derive_seed({seed, kInputStream}));

  TrajectoryData data;
  data.states.resize(n, samples);
  data.inputs.resize(m, samples);
  for (Index t = 0; t < samples; ++t) {
    data.inputs.col(t) = input_stream.draw(m, noise.sigma_u_sq());
  }

  // x_0 = w_0 unless overridden; w_0 is drawn either way so the remaining
  // noise sequence does not depend on the override.
  const Vector w0 = noise_stream.draw(n, noise.sigma_w_sq());
  if (options.initial_state) {
    if (options.initial_state->size() != n) {
      throw InputError("initial state must have " + std::to_string(n) + " entries");
    }
    data.states.col(0) = *options.initial_state;
  } else {
    data.states.col(0) = w0;
  }

  if (options.keep_noise) data.noises.emplace(n, j);
  for (Index t = 0; t < j; ++t) {
    const Vector w = noise_stream.draw(n, noise.sigma_w_sq());
    data.states.col(t + 1) =
        sys.a() * data.states.col(t) + sys.b() * data.inputs.col(t) + w;
    if (!data.states.col(t + 1).allFinite()) {
      throw DivergenceError("state became non-finite at t = " + std::to_string(t + 1),
                            t + 1);
    }
    if (data.noises) data.noises->col(t) = w;
  }
  return data;
}

IdentificationResult least_squares_identify(const TrajectoryData& data) {
  const Index n = data.n();
  const Index m = data.m();
  const Index p = n + m;
  const Index j = data.samples() - 1;
  if (data.inputs.cols() != data.samples()) {
    throw InputError("trajectory has mismatched state and input lengths");
  }
  if (j < p) {
    throw InsufficientSamplesError(
        "insufficient samples: need N >= n+m+1 = " + std::to_string(p + 1) +
            ", got N = " + std::to_string(data.samples()),
        p + 1);
  }

  // D^T = [X_p^T U_p^T] is j x (n+m); solve D^T Theta^T = X_f^T.
  Matrix regressors(j, p);
  regressors.leftCols(n) = data.states.leftCols(j).transpose();
  regressors.rightCols(m) = data.inputs.leftCols(j).transpose();
  const Matrix targets = data.states.rightCols(j).transpose();

  Eigen::HouseholderQR<Matrix> qr(regressors);
  const Matrix r = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  const Vector sv = Eigen::JacobiSVD<Matrix>(r).singularValues();
  const double ratio = sv(0) > 0.0 ? sv(p - 1) / sv(0) : 0.0;

  IdentificationResult result;
  result.entry_count = n * p;
  result.singular_value_ratio = ratio;
  if (!(ratio > kRankTolerance)) {
    throw RankDeficientError(
        "data matrix is rank deficient (singular value ratio " + format_double(ratio) +
            "); the probing input does not excite the plant",
        ratio);
  }
  result.rank_ok = true;

  const Matrix theta = qr.solve(targets).transpose();  // n x (n+m)
  result.a_hat = theta.leftCols(n);
  result.b_hat = theta.rightCols(m);
  return result;
}

IdentificationResult least_squares_identify(const TrajectoryData& data,
                                            const LinearSystem& truth) {
  if (truth.n() != data.n() || truth.m() != data.m()) {
    throw InputError("true plant dimensions do not match the trajectory");
  }
  IdentificationResult result = least_squares_identify(data);
  result.epsilon = estimation_error(truth, result.a_hat, result.b_hat);
  return result;
}

double estimation_error(const LinearSystem& truth, const Matrix& a_hat,
                        const Matrix& b_hat) {
  if (a_hat.rows() != truth.n() || a_hat.cols() != truth.n() ||
      b_hat.rows() != truth.n() || b_hat.cols() != truth.m()) {
    throw InputError("estimate dimensions do not match the true plant");
  }
  const double c = static_cast<double>(truth.n() * (truth.n() + truth.m()));
  return ((truth.a() - a_hat).squaredNorm() + (truth.b() - b_hat).squaredNorm()) / c;
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial) noexcept {
  return derive_seed({master_seed, trial});
}

ErrorStatistics summarize(std::vector<double> per_trial) {
  ErrorStatistics stats;
  const std::size_t count = per_trial.size();
  if (count == 0) throw InputError("at least one trial is required");
  stats.mean = std::accumulate(per_trial.begin(), per_trial.end(), 0.0) /
               static_cast<double>(count);
  if (count > 1) {
    double ss = 0.0;
    for (double e : per_trial) ss += (e - stats.mean) * (e - stats.mean);
    const double variance = ss / static_cast<double>(count - 1);
    stats.standard_error = std::sqrt(variance / static_cast<double>(count));
  }
  stats.per_trial = std::move(per_trial);
  return stats;
}

ErrorStatistics mean_error(const LinearSystem& sys, const NoiseConfig& noise,
                           Index samples, std::span<const std::uint64_t> seeds,
                           const AttackOptions& options) {
  if (seeds.empty()) throw InputError("trials must be >= 1");
  std::vector<double> eps(seeds.size(), 0.0);
  std::vector<std::exception_ptr> failures(seeds.size());
  detail::parallel_for(seeds.size(), [&](std::size_t k) {
    try {
      const TrajectoryData data = simulate_attack(sys, noise, samples, seeds[k], options);
      eps[k] = *least_squares_identify(data, sys).epsilon;
    } catch (...) {
      failures[k] = std::current_exception();
    }
  });
  for (std::size_t k = 0; k < failures.size(); ++k) {
    if (!failures[k]) continue;
    try {
      std::rethrow_exception(failures[k]);
    } catch (const InputError&) {
      throw;
    } catch (const std::exception& e) {
      throw TrialError("trial " + std::to_string(k) + ": " + e.what(), k);
    }
  }
  return summarize(std::move(eps));
}

ErrorStatistics mean_error(const LinearSystem& sys, const NoiseConfig& noise,
                           Index samples, std::size_t trials,
                           std::uint64_t master_seed, const AttackOptions& options) {
  std::vector<std::uint64_t> seeds(trials);
  for (std::size_t k = 0; k < trials; ++k) seeds[k] = trial_seed(master_seed, k);
  return mean_error(sys, noise, samples, seeds, options);
}

void write_trajectory_csv(std::ostream& out, const TrajectoryData& data) {
  out << "t";
  for (Index i = 1; i <= data.m(); ++i) out << ",u_" << i;
  for (Index i = 1; i <= data.n(); ++i) out << ",x_" << i;
  out << '\n';
  for (Index t = 0; t < data.samples(); ++t) {
    out << t;
    for (Index i = 0; i < data.m(); ++i) out << ',' << format_double(data.inputs(i, t));
    for (Index i = 0; i < data.n(); ++i) out << ',' << format_double(data.states(i, t));
    out << '\n';
  }
}

}  // namespace siclab
