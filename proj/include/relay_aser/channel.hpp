#pragma once

// eta-mu (Format 1) and kappa-mu fading: parameter sets, SNR densities,
// MGFs, CDFs and random variate generation.

#include <complex>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "relay_aser/specfun.hpp"

namespace relay_aser::channel {

/// eta-mu Format 1: eta is the in-phase/quadrature scattered power ratio,
/// mu half the number of multipath clusters.
class EtaMuParams {
 public:
  EtaMuParams(double eta, double mu);

  double eta() const { return eta_; }
  double mu() const { return mu_; }
  double h() const { return h_; }
  double big_h() const { return big_h_; }

 private:
  double eta_, mu_, h_, big_h_;
};

/// kappa-mu: kappa is the dominant-to-scattered power ratio, mu the cluster count.
class KappaMuParams {
 public:
  KappaMuParams(double kappa, double mu);

  double kappa() const { return kappa_; }
  double mu() const { return mu_; }

 private:
  double kappa_, mu_;
};

using FadingParams = std::variant<EtaMuParams, KappaMuParams>;

inline bool is_eta_mu(const FadingParams& p) { return std::holds_alternative<EtaMuParams>(p); }
inline bool is_kappa_mu(const FadingParams& p) {
  return std::holds_alternative<KappaMuParams>(p);
}

double eta_mu_pdf(const EtaMuParams& p, double gamma, double gbar);
double kappa_mu_pdf(const KappaMuParams& p, double gamma, double gbar);
double pdf(const FadingParams& p, double gamma, double gbar);

double eta_mu_mgf(const EtaMuParams& p, double z, double gbar);
double kappa_mu_mgf(const KappaMuParams& p, double z, double gbar);
double mgf(const FadingParams& p, double z, double gbar);

/// High-SNR forms: (2 mu sqrt(h) / (z gbar))^{2 mu} and
/// (mu (1+kappa) / (z gbar))^mu exp(-mu kappa).
double eta_mu_mgf_asym(const EtaMuParams& p, double z, double gbar);
double kappa_mu_mgf_asym(const KappaMuParams& p, double z, double gbar);

/// Slope of the high-SNR MGF decay: 2 mu for eta-mu, mu for kappa-mu.
double diversity(const FadingParams& p);

/// Pr{gamma <= gamma_th}. eta-mu uses the Yacoub integral; kappa-mu integrates the density.
double fading_cdf(const FadingParams& p, double gamma_th, double gbar,
                  const specfun::SeriesControl& ctl = {});

enum class SpecialCase { Hoyt, Nakagami, Rice, Rayleigh };

/// Classical models as eta-mu / kappa-mu parameter sets. `value` is q for
/// Hoyt, m for Nakagami, K for Rice, and ignored for Rayleigh.
FadingParams special_case(SpecialCase which, double value = 0.0);

using Rng = std::mt19937_64;

enum class SamplerMode {
  Physical,    ///< Gaussian-cluster construction; needs 2mu (eta-mu) or mu (kappa-mu) integral.
  InverseCdf,  ///< tabulated inverse transform, any parameters
  Auto,        ///< Physical where possible, otherwise InverseCdf
};

/// Draws SNR samples (and complex channel coefficients with unit-mean power)
/// from a fading model. Not thread-safe; use one instance per stream.
class FadingSampler {
 public:
  explicit FadingSampler(FadingParams p, SamplerMode mode = SamplerMode::Physical);

  /// Instantaneous SNR with mean gbar.
  double power(Rng& rng, double gbar);
  /// Complex coefficient alpha with E|alpha|^2 = 1; |alpha|^2 * gbar is an SNR draw.
  std::complex<double> coefficient(Rng& rng);

  bool physical() const { return physical_; }
  const FadingParams& params() const { return params_; }

  static bool physical_supported(const FadingParams& p);

 private:
  double unit_power_inverse(Rng& rng);

  FadingParams params_;
  bool physical_ = true;
  int clusters_ = 1;
  double sigma_x_ = 0.0, sigma_y_ = 0.0;  // per-component std deviations
  double dominant_ = 0.0;                 // line-of-sight amplitude in cluster 1
  std::vector<double> grid_gamma_, grid_cdf_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// One SNR draw with the physical construction. Throws
/// UnsupportedParameterError for non-(half-)integer mu.
double sample_power_gain(const FadingParams& p, double gbar, Rng& rng);

void to_json(nlohmann::json& j, const FadingParams& p);
FadingParams fading_from_json(const nlohmann::json& j);

std::string describe(const FadingParams& p);

}  // namespace relay_aser::channel
