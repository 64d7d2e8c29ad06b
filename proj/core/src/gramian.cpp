#include "siclab/gramian.hpp"

#include <algorithm>
#include <string>

#include "siclab/errors.hpp"

namespace siclab {

namespace {

constexpr int kMaxDoublings = 64;
constexpr double kUpdateTolerance = 1e-14;
constexpr double kStabilityMargin = 1e-9;
constexpr double kSymmetryTolerance = 1e-10;

}  // namespace

Matrix solve_dlyap(const Matrix& a, const Matrix& q) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw InputError("solve_dlyap: A must be square and non-empty");
  }
  if (q.rows() != a.rows() || q.cols() != a.cols()) {
    throw InputError("solve_dlyap: Q must be " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.rows()));
  }
  if (!q.allFinite()) throw InputError("solve_dlyap: Q has non-finite entries");
  const double q_scale = std::max(1.0, q.cwiseAbs().maxCoeff());
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * q_scale) {
    throw InputError("solve_dlyap: Q is not symmetric");
  }
  const double rho = spectral_radius(a);
  if (rho >= 1.0 - kStabilityMargin) {
    throw UnstableSystemError("solve_dlyap: spectral radius " + std::to_string(rho) +
                              " is not below 1; no convergent solution");
  }

  Matrix x = 0.5 * (q + q.transpose());
  Matrix power = a;
  for (int step = 0; step < kMaxDoublings; ++step) {
    const Matrix update = power * x * power.transpose();
    const double x_norm = x.norm();
    x += update;
    x = 0.5 * (x + x.transpose()).eval();
    if (update.norm() <= kUpdateTolerance * x_norm) break;
    power = (power * power).eval();
  }
  return x;
}

GramianPair gramians(const LinearSystem& sys) {
  if (!sys.is_stable()) {
    throw UnstableSystemError("Gramians require a stable system; spectral radius is " +
                              std::to_string(sys.spectral_radius()));
  }
  GramianPair out;
  out.psi1 = solve_dlyap(sys.a(), sys.b() * sys.b().transpose());
  out.psi2 = solve_dlyap(sys.a(), Matrix::Identity(sys.n(), sys.n()));
  out.tr_psi1 = out.psi1.trace();
  out.tr_psi2 = out.psi2.trace();
  return out;
}

}  // namespace siclab
