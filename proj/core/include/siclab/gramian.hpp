#pragma once

#include "siclab/model.hpp"

namespace siclab {

/// Solves A X A^T - X + Q = 0 for Schur-stable A.
///
/// Squared Smith iteration: X <- X + M X M^T, M <- M^2, starting from
/// X = Q, M = A. Each step doubles the number of series terms summed, so
/// convergence is quadratic in the number of steps for rho(A) < 1. Stops
/// when the update's Frobenius norm drops below 1e-14 ||X||_F or after 64
/// doublings. X is symmetrized after every step.
///
/// Throws UnstableSystemError if rho(A) >= 1 - 1e-9 and InputError if Q is
/// not square, not conformant, or asymmetric beyond 1e-10.
Matrix solve_dlyap(const Matrix& a, const Matrix& q);

// Input-driven (Q = B B^T) and noise-driven (Q = I) controllability
// Gramians.
struct GramianPair {
  Matrix psi1;
  Matrix psi2;
  double tr_psi1 = 0.0;
  double tr_psi2 = 0.0;
};

GramianPair gramians(const LinearSystem& sys);

}  // namespace siclab
