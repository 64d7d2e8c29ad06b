#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace siclab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Largest eigenvalue modulus. Throws InputError for non-square or
// non-finite input.
double spectral_radius(const Matrix& a);

/// Discrete-time plant x_{t+1} = A x_t + B u_t + w_{t+1}.
///
/// Immutable once built. The spectral radius is computed at construction,
/// so `is_stable()` is a verified property, not an assumption. Unstable
/// systems are representable; anything needing a Gramian rejects them.
class LinearSystem {
 public:
  LinearSystem(Matrix a, Matrix b);

  const Matrix& a() const noexcept { return a_; }
  const Matrix& b() const noexcept { return b_; }
  Index n() const noexcept { return a_.rows(); }
  Index m() const noexcept { return b_.cols(); }
  double spectral_radius() const noexcept { return rho_; }
  bool is_stable() const noexcept { return rho_ < 1.0; }

  // [A B], n x (n + m).
  Matrix parameters() const;

 private:
  Matrix a_;
  Matrix b_;
  double rho_;
};

/// Per-coordinate variances of process noise (w) and probing input (u).
class NoiseConfig {
 public:
  NoiseConfig(double sigma_w_sq, double sigma_u_sq);

  double sigma_w_sq() const noexcept { return sigma_w_sq_; }
  double sigma_u_sq() const noexcept { return sigma_u_sq_; }

  // R_sigma = sigma_u^2 / sigma_w^2. Throws InputError when sigma_w^2 == 0.
  double variance_ratio() const;

 private:
  double sigma_w_sq_;
  double sigma_u_sq_;
};

// State feedback u_t = F x_t + r_t; F is m x n.
class FeedbackGain {
 public:
  explicit FeedbackGain(Matrix f);

  const Matrix& f() const noexcept { return f_; }

 private:
  Matrix f_;
};

// A_F = A + B F with B unchanged. The result may be unstable.
LinearSystem close_loop(const LinearSystem& sys, const FeedbackGain& gain);

// i.i.d. standard normal A and B from `seed`, with A rescaled so that
// rho(A) == rho_target. Deterministic in (n, m, rho_target, seed).
LinearSystem random_stable_plant(Index n, Index m, double rho_target,
                                 std::uint64_t seed);

// Target radius for plant `index` of a ladder of `count` plants: evenly
// spaced over [0.05, 0.95].
double ladder_radius(int index, int count);

// Plants 0..count-1 with seeds 0..count-1 and radii from ladder_radius().
std::vector<LinearSystem> plant_ladder(int count, Index n, Index m);

// The 4-state, 2-input benchmark plant used throughout the experiments.
LinearSystem reference_plant();

}  // namespace siclab
