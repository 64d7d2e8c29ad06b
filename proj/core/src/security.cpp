#include "siclab/security.hpp"

#include <cmath>
#include <string>

#include "siclab/errors.hpp"
#include "siclab/gramian.hpp"

namespace siclab {

namespace {

// Above this lambda, 2^lambda is compared in log space.
constexpr int kLinearCompareLimit = 900;
constexpr int kLocalScan = 16;

void require_samples(Index samples) {
  if (samples < 2) throw InputError("N must be >= 2");
}

void require_positive(double value, const char* name) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw InputError(std::string(name) + " must be positive and finite");
  }
}

double effective_samples(Index samples, KeyMode mode) {
  return mode == KeyMode::static_key ? 1.0 : static_cast<double>(samples);
}

}  // namespace

ComplexityModel::ComplexityModel(Index n, Index m, double tr_psi1, double tr_psi2,
                                 const NoiseConfig& noise)
    : n_(n), m_(m), tr_psi1_(tr_psi1), tr_psi2_(tr_psi2), noise_(noise) {
  if (n < 1 || m < 1) throw InputError("plant dimensions must be >= 1");
  if (noise.sigma_w_sq() == 0.0) {
    throw InputError("bound undefined for zero process noise (sigma_w^2 = 0)");
  }
  if (!(tr_psi1 >= 0.0) || !(tr_psi2 >= static_cast<double>(n) * (1.0 - 1e-12))) {
    throw InputError("Gramian traces out of range");
  }
}

ComplexityModel::ComplexityModel(const LinearSystem& sys, const NoiseConfig& noise)
    : n_(sys.n()), m_(sys.m()), tr_psi1_(0.0), tr_psi2_(0.0), noise_(noise) {
  if (noise.sigma_w_sq() == 0.0) {
    throw InputError("bound undefined for zero process noise (sigma_w^2 = 0)");
  }
  const GramianPair g = gramians(sys);
  tr_psi1_ = g.tr_psi1;
  tr_psi2_ = g.tr_psi2;
}

double ComplexityModel::gamma_exact(Index samples) const {
  require_samples(samples);
  const double j = static_cast<double>(samples - 1);
  const double n = static_cast<double>(n_);
  const double m = static_cast<double>(m_);
  const double sw = noise_.sigma_w_sq();
  const double su = noise_.sigma_u_sq();
  return (m + n) * sw / (j * (m + tr_psi1_) * su + (j * n + tr_psi2_) * sw);
}

double ComplexityModel::gamma_approx(Index samples) const {
  require_samples(samples);
  const double j = static_cast<double>(samples - 1);
  const double n = static_cast<double>(n_);
  const double m = static_cast<double>(m_);
  return (m + n) / (j * ((m + tr_psi1_) * noise_.variance_ratio() + n));
}

double gamma_exact(const LinearSystem& sys, const NoiseConfig& noise, Index samples) {
  require_samples(samples);
  return ComplexityModel(sys, noise).gamma_exact(samples);
}

double gamma_approx(const LinearSystem& sys, const NoiseConfig& noise, Index samples) {
  require_samples(samples);
  return ComplexityModel(sys, noise).gamma_approx(samples);
}

ComplexityProfile complexity_profile(const LinearSystem& sys, const NoiseConfig& noise,
                                     std::span<const Index> sample_grid) {
  const ComplexityModel model(sys, noise);
  ComplexityProfile profile{model.tr_psi1(), model.tr_psi2(), noise.sigma_w_sq(),
                            noise.sigma_u_sq(), noise.variance_ratio(), {}};
  profile.grid.reserve(sample_grid.size());
  for (Index samples : sample_grid) {
    profile.grid.push_back({samples, model.gamma_exact(samples), model.gamma_approx(samples)});
  }
  return profile;
}

KeyMode parse_key_mode(std::string_view text) {
  if (text == "dynamic") return KeyMode::dynamic_key;
  if (text == "static") return KeyMode::static_key;
  throw InputError("key mode must be \"dynamic\" or \"static\", got \"" +
                   std::string(text) + "\"");
}

std::string_view to_string(KeyMode mode) noexcept {
  return mode == KeyMode::static_key ? "static" : "dynamic";
}

void SecurityRequirement::validate() const {
  require_positive(gamma_c, "gamma_c");
  require_positive(tau_c, "tau_c");
  require_positive(upsilon, "upsilon (FLOPS)");
  if (lambda < 0 || lambda > kMaxSecurityParameter) {
    throw InputError("lambda must lie in [0, " + std::to_string(kMaxSecurityParameter) + "]");
  }
}

DecipherTime deciphering_time(Index samples, int lambda, double upsilon, KeyMode mode) {
  if (samples < 1) throw InputError("N must be >= 1");
  require_positive(upsilon, "upsilon (FLOPS)");
  const double per_flop = effective_samples(samples, mode) / upsilon;
  return {std::ldexp(per_flop, lambda),
          static_cast<double>(lambda) + std::log2(effective_samples(samples, mode)) -
              std::log2(upsilon)};
}

DecipherTime deciphering_time(Index samples, const SecurityRequirement& req) {
  return deciphering_time(samples, req.lambda, req.upsilon, req.key_mode);
}

bool breakable_within(Index samples, int lambda, double upsilon, KeyMode mode,
                      double tau_c) {
  const DecipherTime tau = deciphering_time(samples, lambda, upsilon, mode);
  if (lambda <= kLinearCompareLimit) return tau.seconds <= tau_c;
  return tau.log2_seconds <= std::log2(tau_c);
}

Index min_sample_size(const ComplexityModel& model, double gamma_c) {
  require_positive(gamma_c, "gamma_c");
  const auto below = [&](Index samples) { return model.gamma_exact(samples) < gamma_c; };

  // gamma(j) < gamma_c  <=>  j > ((m+n) sw / gamma_c - tr(P2) sw) / ((m + tr P1) su + n sw)
  const double n = static_cast<double>(model.n());
  const double m = static_cast<double>(model.m());
  const double sw = model.noise().sigma_w_sq();
  const double su = model.noise().sigma_u_sq();
  const double threshold = ((m + n) * sw / gamma_c - model.tr_psi2() * sw) /
                           ((m + model.tr_psi1()) * su + n * sw);
  if (!(threshold < 1e15)) {
    throw InputError("gamma_c is too small: required sample count exceeds 1e15");
  }
  Index guess = threshold < 1.0 ? 2 : static_cast<Index>(std::floor(threshold)) + 2;

  for (int step = 0; step < kLocalScan; ++step) {
    const bool here = below(guess);
    if (here && (guess == 2 || !below(guess - 1))) return guess;
    guess += here ? -1 : 1;
  }

  // Rounding put the closed form far off; bisect on the monotone predicate.
  Index lo = 2;
  Index hi = 4;
  while (!below(hi)) {
    lo = hi;
    hi *= 2;
  }
  if (below(lo)) return lo;
  while (hi - lo > 1) {
    const Index mid = lo + (hi - lo) / 2;
    (below(mid) ? hi : lo) = mid;
  }
  return hi;
}

Index min_sample_size(const LinearSystem& sys, const NoiseConfig& noise, double gamma_c) {
  return min_sample_size(ComplexityModel(sys, noise), gamma_c);
}

SecurityVerdict is_secure(const ComplexityModel& model, const SecurityRequirement& req) {
  req.validate();
  // gamma decreases and tau is non-decreasing in N, so N* is the only
  // candidate: smaller N fail the gamma condition and larger N only make
  // tau longer.
  const Index n_star = min_sample_size(model, req.gamma_c);
  const bool breakable =
      breakable_within(n_star, req.lambda, req.upsilon, req.key_mode, req.tau_c);
  SecurityVerdict verdict{!breakable, std::nullopt, n_star,
                          deciphering_time(n_star, req).seconds};
  if (breakable) verdict.witness = n_star;
  return verdict;
}

SecurityVerdict is_secure(const LinearSystem& sys, const NoiseConfig& noise,
                          const SecurityRequirement& req) {
  req.validate();
  return is_secure(ComplexityModel(sys, noise), req);
}

SecurityDesign min_lambda(const ComplexityModel& model, double gamma_c, double tau_c,
                          double upsilon, KeyMode mode) {
  require_positive(gamma_c, "gamma_c");
  require_positive(tau_c, "tau_c");
  require_positive(upsilon, "upsilon (FLOPS)");
  const Index n_star = min_sample_size(model, gamma_c);
  const auto secure_at = [&](int lambda) {
    return !breakable_within(n_star, lambda, upsilon, mode, tau_c);
  };

  const double log2_budget =
      std::log2(tau_c) + std::log2(upsilon) - std::log2(effective_samples(n_star, mode));
  int lambda = kMaxSecurityParameter + 1;
  if (log2_budget < static_cast<double>(kMaxSecurityParameter)) {
    lambda = std::max(1, static_cast<int>(std::floor(log2_budget)) + 1);
  }
  while (lambda > 1 && secure_at(lambda - 1)) --lambda;
  while (lambda <= kMaxSecurityParameter && !secure_at(lambda)) ++lambda;
  if (lambda > kMaxSecurityParameter) {
    throw InfeasibleDesignError("no security parameter up to " +
                                std::to_string(kMaxSecurityParameter) +
                                " bits meets the requirement");
  }
  return {lambda, n_star};
}

SecurityDesign min_lambda(const LinearSystem& sys, const NoiseConfig& noise,
                          double gamma_c, double tau_c, double upsilon, KeyMode mode) {
  return min_lambda(ComplexityModel(sys, noise), gamma_c, tau_c, upsilon, mode);
}

}  // namespace siclab
