#include "siclab/model.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "siclab/errors.hpp"
#include "siclab/random.hpp"

namespace siclab {

namespace {

constexpr int kMaxRedraws = 16;

void require_finite(const Matrix& m, const char* name) {
  if (!m.allFinite()) {
    throw InputError(std::string(name) + " has non-finite entries");
  }
}

}  // namespace

double spectral_radius(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw InputError("spectral_radius: matrix must be square and non-empty");
  }
  require_finite(a, "spectral_radius: matrix");
  if (a.rows() == 1) return std::abs(a(0, 0));
  Eigen::EigenSolver<Matrix> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("spectral_radius: eigenvalue iteration failed");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

LinearSystem::LinearSystem(Matrix a, Matrix b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() < 1 || a_.rows() != a_.cols()) {
    throw InputError("A must be square with n >= 1, got " +
                     std::to_string(a_.rows()) + "x" + std::to_string(a_.cols()));
  }
  if (b_.cols() < 1 || b_.rows() != a_.rows()) {
    throw InputError("B must be n x m with m >= 1 and n = " +
                     std::to_string(a_.rows()) + ", got " +
                     std::to_string(b_.rows()) + "x" + std::to_string(b_.cols()));
  }
  require_finite(a_, "A");
  require_finite(b_, "B");
  rho_ = siclab::spectral_radius(a_);
}

Matrix LinearSystem::parameters() const {
  Matrix ab(n(), n() + m());
  ab << a_, b_;
  return ab;
}

NoiseConfig::NoiseConfig(double sigma_w_sq, double sigma_u_sq)
    : sigma_w_sq_(sigma_w_sq), sigma_u_sq_(sigma_u_sq) {
  if (!std::isfinite(sigma_w_sq) || sigma_w_sq < 0.0) {
    throw InputError("sigma_w^2 must be finite and non-negative");
  }
  if (!std::isfinite(sigma_u_sq) || sigma_u_sq < 0.0) {
    throw InputError("sigma_u^2 must be finite and non-negative");
  }
}

double NoiseConfig::variance_ratio() const {
  if (sigma_w_sq_ == 0.0) {
    throw InputError("variance ratio undefined for zero process noise");
  }
  return sigma_u_sq_ / sigma_w_sq_;
}

FeedbackGain::FeedbackGain(Matrix f) : f_(std::move(f)) {
  if (f_.size() == 0) throw InputError("F must be non-empty");
  require_finite(f_, "F");
}

LinearSystem close_loop(const LinearSystem& sys, const FeedbackGain& gain) {
  const Matrix& f = gain.f();
  if (f.rows() != sys.m() || f.cols() != sys.n()) {
    throw InputError("F must be " + std::to_string(sys.m()) + "x" +
                     std::to_string(sys.n()) + ", got " +
                     std::to_string(f.rows()) + "x" + std::to_string(f.cols()));
  }
  return LinearSystem(sys.a() + sys.b() * f, sys.b());
}

LinearSystem random_stable_plant(Index n, Index m, double rho_target,
                                 std::uint64_t seed) {
  if (n < 1 || m < 1) throw InputError("plant dimensions must be >= 1");
  if (!(rho_target > 0.0 && rho_target < 1.0)) {
    throw InputError("target spectral radius must lie in (0, 1)");
  }
  GaussianStream stream(derive_seed({seed}));
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    Matrix a(n, n);
    Matrix b(n, m);
    for (Index i = 0; i < n; ++i)
      for (Index k = 0; k < n; ++k) a(i, k) = stream.next();
    for (Index i = 0; i < n; ++i)
      for (Index k = 0; k < m; ++k) b(i, k) = stream.next();
    const double rho = spectral_radius(a);
    if (rho < 1e-12) continue;
    a *= rho_target / rho;
    return LinearSystem(std::move(a), std::move(b));
  }
  throw std::runtime_error("random_stable_plant: drew a nilpotent A " +
                           std::to_string(kMaxRedraws) + " times");
}

double ladder_radius(int index, int count) {
  if (count < 1 || index < 0 || index >= count) {
    throw InputError("ladder index out of range");
  }
  if (count == 1) return 0.5;
  return 0.05 + 0.90 * static_cast<double>(index) / static_cast<double>(count - 1);
}

std::vector<LinearSystem> plant_ladder(int count, Index n, Index m) {
  std::vector<LinearSystem> plants;
  plants.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    plants.push_back(random_stable_plant(n, m, ladder_radius(k, count),
                                         static_cast<std::uint64_t>(k)));
  }
  return plants;
}

LinearSystem reference_plant() {
  Matrix a(4, 4);
  a << 0.23, 0.45, -0.04, -0.04,
       0.45, -0.46, -0.12, 0.15,
      -0.04, -0.12, 0.43, -0.02,
      -0.04, 0.15, -0.02, 0.20;
  Matrix b(4, 2);
  b << 0.27, -1.32,
      -0.29, -0.31,
      -0.64, 0.75,
      -0.13, -0.97;
  return LinearSystem(std::move(a), std::move(b));
}

}  // namespace siclab
