#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>

#include <Eigen/Core>

namespace siclab {

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Hashes a path of integers (master seed, plant, cell, trial, ...) into one
// 64-bit seed. Order matters; derive_seed({a, b}) != derive_seed({b, a}).
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> path) noexcept;

/// Standard normal variates from a seeded mt19937_64.
///
/// Uses the Marsaglia polar method on 53-bit uniforms so the sequence is a
/// function of the seed alone and does not depend on the standard library's
/// distribution implementation.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  double next();

  // Fills a vector with i.i.d. N(0, variance) draws, coordinate order.
  Eigen::VectorXd draw(Eigen::Index size, double variance);

 private:
  double uniform_open();  // (-1, 1)

  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace siclab
