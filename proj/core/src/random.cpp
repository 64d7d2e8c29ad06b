#include "siclab/random.hpp"

#include <cmath>

namespace siclab {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t part : path) {
    h = mix64(h ^ mix64(part));
  }
  return h;
}

double GaussianStream::uniform_open() {
  const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return 2.0 * unit - 1.0;
}

double GaussianStream::next() {
  if (spare_) {
    const double value = *spare_;
    spare_.reset();
    return value;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = uniform_open();
    v = uniform_open();
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * scale;
  return u * scale;
}

Eigen::VectorXd GaussianStream::draw(Eigen::Index size, double variance) {
  Eigen::VectorXd out(size);
  if (variance == 0.0) {
    out.setZero();
    return out;
  }
  const double sd = std::sqrt(variance);
  for (Eigen::Index i = 0; i < size; ++i) out[i] = sd * next();
  return out;
}

}  // namespace siclab
