#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "siclab/model.hpp"

namespace siclab {

inline constexpr int kMaxSecurityParameter = 1024;

/// Sample identifying complexity of one plant under one noise setting.
///
/// Holds the Gramian traces so that gamma can be evaluated at many sample
/// sizes without re-solving the Lyapunov equations. With j = N - 1:
///
///   exact:  (m+n) sw / (j (m + tr P1) su + (j n + tr P2) sw)
///   approx: (m+n) / (j [(m + tr P1) R + n]),   R = su / sw
///
/// Construction throws UnstableSystemError for unstable plants and
/// InputError when sigma_w^2 == 0 (the bound is vacuous there).
class ComplexityModel {
 public:
  ComplexityModel(const LinearSystem& sys, const NoiseConfig& noise);
  ComplexityModel(Index n, Index m, double tr_psi1, double tr_psi2,
                  const NoiseConfig& noise);

  double gamma_exact(Index samples) const;
  double gamma_approx(Index samples) const;

  Index n() const noexcept { return n_; }
  Index m() const noexcept { return m_; }
  double tr_psi1() const noexcept { return tr_psi1_; }
  double tr_psi2() const noexcept { return tr_psi2_; }
  const NoiseConfig& noise() const noexcept { return noise_; }

 private:
  Index n_;
  Index m_;
  double tr_psi1_;
  double tr_psi2_;
  NoiseConfig noise_;
};

double gamma_exact(const LinearSystem& sys, const NoiseConfig& noise,
                   Index samples);
double gamma_approx(const LinearSystem& sys, const NoiseConfig& noise,
                    Index samples);

struct ComplexityPoint {
  Index samples;
  double gamma_exact;
  double gamma_approx;
};

struct ComplexityProfile {
  double tr_psi1;
  double tr_psi2;
  double sigma_w_sq;
  double sigma_u_sq;
  double variance_ratio;
  std::vector<ComplexityPoint> grid;
};

ComplexityProfile complexity_profile(const LinearSystem& sys,
                                     const NoiseConfig& noise,
                                     std::span<const Index> sample_grid);

enum class KeyMode { dynamic_key, static_key };

KeyMode parse_key_mode(std::string_view text);
std::string_view to_string(KeyMode mode) noexcept;

struct SecurityRequirement {
  double gamma_c;  // acceptable estimation error
  double tau_c;    // plant life span, seconds
  double upsilon;  // adversary throughput, FLOPS
  int lambda;      // security parameter, bits
  KeyMode key_mode = KeyMode::dynamic_key;

  // Throws InputError unless gamma_c, tau_c, upsilon > 0 (finite) and
  // 0 <= lambda <= kMaxSecurityParameter.
  void validate() const;
};

// tau = 2^lambda N_eff / upsilon with N_eff = N for dynamic keys and 1 for
// static keys. `seconds` saturates to +inf past the double range;
// `log2_seconds` is always finite.
struct DecipherTime {
  double seconds;
  double log2_seconds;
};

DecipherTime deciphering_time(Index samples, int lambda, double upsilon,
                              KeyMode mode);
DecipherTime deciphering_time(Index samples, const SecurityRequirement& req);

// tau(N, lambda) <= tau_c, evaluated exactly via ldexp for lambda <= 900
// and in log space above.
bool breakable_within(Index samples, int lambda, double upsilon, KeyMode mode,
                      double tau_c);

// Smallest N >= 2 with gamma_exact(N) < gamma_c.
Index min_sample_size(const ComplexityModel& model, double gamma_c);
Index min_sample_size(const LinearSystem& sys, const NoiseConfig& noise,
                      double gamma_c);

struct SecurityVerdict {
  bool secure;
  std::optional<Index> witness;
  Index n_star;
  double tau_at_n_star;  // seconds; +inf if it exceeds double range
};

// Secure iff no N has gamma(N) < gamma_c and tau(N, lambda) <= tau_c.
SecurityVerdict is_secure(const ComplexityModel& model,
                          const SecurityRequirement& req);
SecurityVerdict is_secure(const LinearSystem& sys, const NoiseConfig& noise,
                          const SecurityRequirement& req);

struct SecurityDesign {
  int lambda;
  Index n_star;
};

// Smallest lambda >= 1 for which is_secure() holds. Throws
// InfeasibleDesignError when it would exceed kMaxSecurityParameter.
SecurityDesign min_lambda(const ComplexityModel& model, double gamma_c,
                          double tau_c, double upsilon, KeyMode mode);
SecurityDesign min_lambda(const LinearSystem& sys, const NoiseConfig& noise,
                          double gamma_c, double tau_c, double upsilon,
                          KeyMode mode);

}  // namespace siclab
