#include "relay_aser/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "relay_aser/errors.hpp"
#include "relay_aser/quadrature.hpp"

namespace relay_aser::channel {

namespace {

void require_gbar(double gbar, const char* op) {
  if (!(gbar > 0.0) || !std::isfinite(gbar)) {
    throw DomainError(std::string(op) + ": mean SNR must be positive and finite");
  }
}

void require_z(double z, const char* op) {
  if (!(z >= 0.0)) throw DomainError(std::string(op) + ": z must be >= 0");
}

bool near_integer(double v) { return std::abs(v - std::round(v)) < 1e-12 && std::round(v) >= 1; }

}  // namespace

EtaMuParams::EtaMuParams(double eta, double mu) : eta_(eta), mu_(mu) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("eta-mu: eta must be in (0, inf)");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("eta-mu: mu must be positive");
  h_ = (2.0 + 1.0 / eta + eta) / 4.0;
  big_h_ = (1.0 / eta - eta) / 4.0;
}

KappaMuParams::KappaMuParams(double kappa, double mu) : kappa_(kappa), mu_(mu) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw DomainError("kappa-mu: kappa must be non-negative");
  }
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("kappa-mu: mu must be positive");
}

double eta_mu_pdf(const EtaMuParams& p, double gamma, double gbar) {
  require_gbar(gbar, "eta_mu_pdf");
  if (!(gamma >= 0.0)) throw DomainError("eta_mu_pdf: gamma must be >= 0");
  const double mu = p.mu();
  const double h = p.h();
  if (gamma == 0.0) {
    if (2.0 * mu > 1.0) return 0.0;
    if (2.0 * mu < 1.0) return std::numeric_limits<double>::infinity();
  }
  // Writing I_{mu-1/2}(z) = (z/2)^{mu-1/2} R(z) absorbs |H|^{mu-1/2}, so
  // H = 0 (eta = 1) and H < 0 (eta > 1) need no special casing.
  const double z = 2.0 * mu * std::abs(p.big_h()) * gamma / gbar;
  const double log_pdf = std::log(2.0) + 0.5 * std::log(std::numbers::pi) +
                         2.0 * mu * std::log(mu) + mu * std::log(h) -
                         specfun::log_gamma(mu) - 2.0 * mu * std::log(gbar) -
                         2.0 * mu * h * gamma / gbar +
                         specfun::log_bessel_i_reduced(mu - 0.5, z) +
                         (gamma > 0.0 ? (2.0 * mu - 1.0) * std::log(gamma) : 0.0);
  return std::exp(log_pdf);
}

double kappa_mu_pdf(const KappaMuParams& p, double gamma, double gbar) {
  require_gbar(gbar, "kappa_mu_pdf");
  if (!(gamma >= 0.0)) throw DomainError("kappa_mu_pdf: gamma must be >= 0");
  const double mu = p.mu();
  const double k = p.kappa();
  if (gamma == 0.0) {
    if (mu > 1.0) return 0.0;
    if (mu < 1.0) return std::numeric_limits<double>::infinity();
  }
  // Standard kappa-mu SNR density with its I_{mu-1} factor, reduced as above.
  const double z = 2.0 * mu * std::sqrt(k * (1.0 + k) * gamma / gbar);
  const double log_pdf = mu * std::log(mu) + mu * std::log1p(k) - mu * k - mu * std::log(gbar) -
                         mu * (1.0 + k) * gamma / gbar +
                         specfun::log_bessel_i_reduced(mu - 1.0, z) +
                         (gamma > 0.0 ? (mu - 1.0) * std::log(gamma) : 0.0);
  return std::exp(log_pdf);
}

double pdf(const FadingParams& p, double gamma, double gbar) {
  return std::visit(
      [&](const auto& v) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, EtaMuParams>) {
          return eta_mu_pdf(v, gamma, gbar);
        } else {
          return kappa_mu_pdf(v, gamma, gbar);
        }
      },
      p);
}

double eta_mu_mgf(const EtaMuParams& p, double z, double gbar) {
  require_gbar(gbar, "eta_mu_mgf");
  require_z(z, "eta_mu_mgf");
  const double mu = p.mu();
  // (4 mu^2 h) = (2 mu (h-H)) (2 mu (h+H)), so the MGF factors into two
  // terms each equal to 1 at z = 0.
  const double lo = 2.0 * mu * (p.h() - p.big_h());
  const double hi = 2.0 * mu * (p.h() + p.big_h());
  return std::exp(-mu * (std::log1p(z * gbar / lo) + std::log1p(z * gbar / hi)));
}

double kappa_mu_mgf(const KappaMuParams& p, double z, double gbar) {
  require_gbar(gbar, "kappa_mu_mgf");
  require_z(z, "kappa_mu_mgf");
  const double mu = p.mu();
  const double k = p.kappa();
  const double base = mu * (1.0 + k);
  return std::exp(-mu * std::log1p(z * gbar / base) - z * mu * k * gbar / (base + z * gbar));
}

double mgf(const FadingParams& p, double z, double gbar) {
  if (const auto* em = std::get_if<EtaMuParams>(&p)) return eta_mu_mgf(*em, z, gbar);
  return kappa_mu_mgf(std::get<KappaMuParams>(p), z, gbar);
}

double eta_mu_mgf_asym(const EtaMuParams& p, double z, double gbar) {
  require_gbar(gbar, "eta_mu_mgf_asym");
  return std::pow(2.0 * p.mu() * std::sqrt(p.h()) / (z * gbar), 2.0 * p.mu());
}

double kappa_mu_mgf_asym(const KappaMuParams& p, double z, double gbar) {
  require_gbar(gbar, "kappa_mu_mgf_asym");
  const double mu = p.mu();
  return std::pow(mu * (1.0 + p.kappa()) / (z * gbar), mu) * std::exp(-mu * p.kappa());
}

double diversity(const FadingParams& p) {
  if (const auto* em = std::get_if<EtaMuParams>(&p)) return 2.0 * em->mu();
  return std::get<KappaMuParams>(p).mu();
}

double fading_cdf(const FadingParams& p, double gamma_th, double gbar,
                  const specfun::SeriesControl& ctl) {
  require_gbar(gbar, "fading_cdf");
  if (!(gamma_th >= 0.0)) throw DomainError("fading_cdf: threshold must be >= 0");
  if (gamma_th == 0.0) return 0.0;
  if (std::isinf(gamma_th)) return 1.0;
  if (const auto* em = std::get_if<EtaMuParams>(&p)) {
    const double nu = em->mu();
    const double a = em->big_h() / em->h();
    const double b = std::sqrt(2.0 * nu * em->h() * gamma_th / gbar);
    return 1.0 - specfun::yacoub_y(nu, a, b, ctl);
  }
  const auto& km = std::get<KappaMuParams>(p);
  const double mu = km.mu();
  quad::Options opt;
  opt.rel_tol = ctl.rel_tol;
  opt.abs_tol = 1e-16;
  opt.nodes = ctl.quad_nodes;
  double value = 0.0;
  if (mu < 1.0) {
    // gamma = gamma_th t^{1/mu} cancels the gamma^{mu-1} endpoint singularity.
    const double inv = 1.0 / mu;
    value = quad::integrate_or_throw(
        "fading_cdf",
        [&](double t) {
          const double g = gamma_th * std::pow(t, inv);
          const double scaled = kappa_mu_pdf(km, g, gbar) * std::pow(g, 1.0 - mu);
          return scaled * std::pow(gamma_th, mu) * inv;
        },
        0.0, 1.0, opt);
  } else {
    value = quad::integrate_or_throw(
        "fading_cdf", [&](double g) { return kappa_mu_pdf(km, g, gbar); }, 0.0, gamma_th, opt);
  }
  return std::clamp(value, 0.0, 1.0);
}

FadingParams special_case(SpecialCase which, double value) {
  switch (which) {
    case SpecialCase::Hoyt:
      if (!(value > 0.0 && value <= 1.0)) throw DomainError("hoyt: q must be in (0, 1]");
      return EtaMuParams(value * value, 0.5);
    case SpecialCase::Nakagami:
      if (!(value >= 0.5) || !std::isfinite(value)) throw DomainError("nakagami: m must be >= 0.5");
      return EtaMuParams(1.0, value / 2.0);
    case SpecialCase::Rice:
      if (!(value > 0.0) || !std::isfinite(value)) throw DomainError("rice: K must be > 0");
      return KappaMuParams(value, 1.0);
    case SpecialCase::Rayleigh:
      return EtaMuParams(1.0, 0.5);
  }
  throw DomainError("special_case: unknown model");
}

// ---------------------------------------------------------------------------
// Sampling

bool FadingSampler::physical_supported(const FadingParams& p) {
  if (const auto* em = std::get_if<EtaMuParams>(&p)) return near_integer(2.0 * em->mu());
  return near_integer(std::get<KappaMuParams>(p).mu());
}

FadingSampler::FadingSampler(FadingParams p, SamplerMode mode) : params_(std::move(p)) {
  const bool supported = physical_supported(params_);
  if (mode == SamplerMode::Physical && !supported) {
    throw UnsupportedParameterError(
        "sampler: the Gaussian-cluster construction needs 2*mu (eta-mu) or mu (kappa-mu) to be "
        "a positive integer; got " +
        describe(params_) + ". Use the inverse-CDF sampler mode for arbitrary mu.");
  }
  physical_ = supported && mode != SamplerMode::InverseCdf;

  if (physical_) {
    if (const auto* em = std::get_if<EtaMuParams>(&params_)) {
      clusters_ = static_cast<int>(std::lround(2.0 * em->mu()));
      // Format 1: eta = sigma_x^2 / sigma_y^2, unit power per cluster.
      sigma_x_ = std::sqrt(em->eta() / (1.0 + em->eta()));
      sigma_y_ = std::sqrt(1.0 / (1.0 + em->eta()));
    } else {
      const auto& km = std::get<KappaMuParams>(params_);
      clusters_ = static_cast<int>(std::lround(km.mu()));
      // 2 n sigma^2 (1 + kappa) = 1 scatter-plus-dominant normalisation.
      const double s = std::sqrt(1.0 / (2.0 * clusters_ * (1.0 + km.kappa())));
      sigma_x_ = sigma_y_ = s;
      dominant_ = std::sqrt(km.kappa() / (1.0 + km.kappa()));
    }
    return;
  }

  // Tabulate the unit-mean CDF on a 4096-point log grid.
  constexpr int kGrid = 4096;
  const double lo = 1e-10;
  double hi = 8.0;
  while (1.0 - fading_cdf(params_, hi, 1.0) > 1e-13 && hi < 1e6) hi *= 2.0;
  grid_gamma_.resize(kGrid);
  grid_cdf_.resize(kGrid);
  const double step = std::log(hi / lo) / (kGrid - 1);
  quad::Options opt;
  opt.rel_tol = 1e-10;
  opt.abs_tol = 1e-17;
  opt.nodes = 21;
  for (int i = 0; i < kGrid; ++i) grid_gamma_[i] = lo * std::exp(step * i);
  grid_cdf_[0] = fading_cdf(params_, lo, 1.0);
  for (int i = 1; i < kGrid; ++i) {
    const double piece = quad::integrate(
                             [&](double g) { return pdf(params_, g, 1.0); }, grid_gamma_[i - 1],
                             grid_gamma_[i], opt)
                             .value;
    grid_cdf_[i] = std::min(1.0, grid_cdf_[i - 1] + piece);
  }
  for (int i = 1; i < kGrid; ++i) grid_cdf_[i] = std::max(grid_cdf_[i], grid_cdf_[i - 1]);
}

double FadingSampler::unit_power_inverse(Rng& rng) {
  const double u = uniform_(rng);
  if (u <= grid_cdf_.front()) {
    // Below the grid the CDF follows gamma^{diversity}.
    const double d = diversity(params_);
    return grid_gamma_.front() * std::pow(u / grid_cdf_.front(), 1.0 / d);
  }
  if (u >= grid_cdf_.back()) return grid_gamma_.back();
  const auto it = std::upper_bound(grid_cdf_.begin(), grid_cdf_.end(), u);
  const std::size_t i = static_cast<std::size_t>(it - grid_cdf_.begin());
  const double f0 = grid_cdf_[i - 1], f1 = grid_cdf_[i];
  const double w = (f1 > f0) ? (u - f0) / (f1 - f0) : 0.0;
  return std::exp(std::log(grid_gamma_[i - 1]) * (1.0 - w) + std::log(grid_gamma_[i]) * w);
}

std::complex<double> FadingSampler::coefficient(Rng& rng) {
  if (!physical_) {
    const double power = unit_power_inverse(rng);
    const double phase = 2.0 * std::numbers::pi * uniform_(rng);
    return std::polar(std::sqrt(power), phase);
  }
  double power = 0.0;
  double first_re = 0.0, first_im = 0.0;
  if (is_eta_mu(params_)) {
    for (int i = 0; i < clusters_; ++i) {
      const double x = sigma_x_ * normal_(rng);
      const double y = sigma_y_ * normal_(rng);
      if (i == 0) {
        first_re = x;
        first_im = y;
      }
      power += x * x + y * y;
    }
    power /= clusters_;
  } else {
    // Per-component variance sigma^2 = 1 / (2 n (1+kappa)); dominant power kappa/(1+kappa).
    const double s = sigma_x_;
    for (int i = 0; i < clusters_; ++i) {
      const double x = s * normal_(rng) + (i == 0 ? dominant_ : 0.0);
      const double y = s * normal_(rng);
      if (i == 0) {
        first_re = x;
        first_im = y;
      }
      power += x * x + y * y;
    }
  }
  return std::polar(std::sqrt(power), std::atan2(first_im, first_re));
}

double FadingSampler::power(Rng& rng, double gbar) {
  require_gbar(gbar, "FadingSampler::power");
  if (!physical_) return gbar * unit_power_inverse(rng);
  return gbar * std::norm(coefficient(rng));
}

double sample_power_gain(const FadingParams& p, double gbar, Rng& rng) {
  FadingSampler sampler(p, SamplerMode::Physical);
  return sampler.power(rng, gbar);
}

// ---------------------------------------------------------------------------
// JSON

void to_json(nlohmann::json& j, const FadingParams& p) {
  if (const auto* em = std::get_if<EtaMuParams>(&p)) {
    j = nlohmann::json{{"type", "eta-mu"}, {"eta", em->eta()}, {"mu", em->mu()}};
  } else {
    const auto& km = std::get<KappaMuParams>(p);
    j = nlohmann::json{{"type", "kappa-mu"}, {"kappa", km.kappa()}, {"mu", km.mu()}};
  }
}

namespace {

double number_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw DomainError(std::string("missing field '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number()) throw DomainError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

}  // namespace

FadingParams fading_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DomainError("fading parameters must be a JSON object");
  if (!j.contains("type") || !j.at("type").is_string()) {
    throw DomainError("missing string field 'type' (\"eta-mu\" or \"kappa-mu\")");
  }
  const auto type = j.at("type").get<std::string>();
  if (type == "eta-mu") {
    if (j.contains("format") && j.at("format") != 1) {
      throw DomainError("eta-mu Format 2 is not supported; only Format 1");
    }
    return EtaMuParams(number_field(j, "eta"), number_field(j, "mu"));
  }
  if (type == "kappa-mu") {
    return KappaMuParams(number_field(j, "kappa"), number_field(j, "mu"));
  }
  if (type == "rayleigh") return special_case(SpecialCase::Rayleigh);
  if (type == "hoyt") return special_case(SpecialCase::Hoyt, number_field(j, "q"));
  if (type == "nakagami") return special_case(SpecialCase::Nakagami, number_field(j, "m"));
  if (type == "rice") return special_case(SpecialCase::Rice, number_field(j, "K"));
  throw DomainError("unknown fading type '" + type + "'");
}

std::string describe(const FadingParams& p) {
  std::ostringstream os;
  if (const auto* em = std::get_if<EtaMuParams>(&p)) {
    os << "eta-mu(eta=" << em->eta() << ", mu=" << em->mu() << ")";
  } else {
    const auto& km = std::get<KappaMuParams>(p);
    os << "kappa-mu(kappa=" << km.kappa() << ", mu=" << km.mu() << ")";
  }
  return os.str();
}

}  // namespace relay_aser::channel
