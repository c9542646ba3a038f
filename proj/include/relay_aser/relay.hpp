#pragma once

// Dual-hop decode-and-forward system: link budgets, relay decode outage,
// end-to-end MGF, and the single-angle MGF integrals
//   I1(x, phi) = (1/pi) int_0^phi M_sd(x^2 / (2 sin^2 t)) dt
//   I2(x, phi) = (1/pi) int_0^phi M_sd(.) M_rd(.) dt
// in closed form, high-SNR form, and by direct quadrature.

#include <functional>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "relay_aser/channel.hpp"
#include "relay_aser/specfun.hpp"

namespace relay_aser::relay {

using channel::FadingParams;

struct LinkBudget {
  FadingParams fading = channel::EtaMuParams(1.0, 0.5);
  double omega = 1.0;
  double power_share = 1.0;
  double gbar = 1.0;  // omega * power_share * total_snr
};

/// phi = pi/2
struct HalfPi {};
/// phi = arccot(y / x)
struct ArccotRatio {
  double y;
};
/// phi = arctan(y / z)
struct ArctanRatio {
  double y, z;
};
using AngleVariant = std::variant<HalfPi, ArccotRatio, ArctanRatio>;

double angle_of(const AngleVariant& v, double x);
std::string describe(const AngleVariant& v);

struct LinkSpec {
  FadingParams fading = channel::EtaMuParams(1.0, 0.5);
  double omega = 1.0;
};

class RelaySystem {
 public:
  /// total_snr is linear P/N0. A negative gamma_th means "derive it from rate"
  /// as 2^{2R} - 1.
  static RelaySystem make(const LinkSpec& sd, const LinkSpec& sr, const LinkSpec& rd,
                          double total_snr, double xi = 0.5, double gamma_th = -1.0,
                          double rate = 1.0, bool direct_only = false);

  RelaySystem with_xi(double xi) const;
  RelaySystem with_total_snr(double total_snr) const;
  RelaySystem with_gamma_th(double gamma_th) const;

  const LinkBudget& sd() const { return sd_; }
  const LinkBudget& sr() const { return sr_; }
  const LinkBudget& rd() const { return rd_; }
  double total_snr() const { return total_snr_; }
  double xi() const { return xi_; }
  double gamma_th() const { return gamma_th_; }
  double rate() const { return rate_; }
  /// No relay: the source keeps all of P and A_sr is forced to 1.
  bool direct_only() const { return direct_only_; }

  /// sd is eta-mu and rd is kappa-mu, so the closed forms apply.
  bool closed_form_ready() const;

 private:
  RelaySystem() = default;
  void refresh();

  LinkBudget sd_, sr_, rd_;
  double total_snr_ = 1.0, xi_ = 0.5, gamma_th_ = 3.0, rate_ = 1.0;
  bool direct_only_ = false;
};

double gamma_th_from_rate(double rate);

/// Pr{gamma_sr <= gamma_th}.
double outage_prob_sr(const RelaySystem& sys, const specfun::SeriesControl& ctl = {});
/// Leading high-SNR term of the sr outage probability.
double outage_prob_sr_asym(const RelaySystem& sys);

double end_to_end_mgf(const RelaySystem& sys, double z, const specfun::SeriesControl& ctl = {});
/// Same with a precomputed outage probability.
double end_to_end_mgf(const RelaySystem& sys, double z, double a_sr);

/// Exact closed forms (sd eta-mu, rd kappa-mu).
double i1_exact(double x, const AngleVariant& phi, const LinkBudget& sd,
                const specfun::SeriesControl& ctl = {});
double i2_exact(double x, const AngleVariant& phi, const LinkBudget& sd, const LinkBudget& rd,
                const specfun::SeriesControl& ctl = {});

/// High-SNR closed forms built from the asymptotic MGFs.
double i1_asym(double x, const AngleVariant& phi, const LinkBudget& sd,
               const specfun::SeriesControl& ctl = {});
double i2_asym(double x, const AngleVariant& phi, const LinkBudget& sd, const LinkBudget& rd,
               const specfun::SeriesControl& ctl = {});

/// (1/pi) int_0^phi mgf(x^2 / (2 sin^2 t)) dt by adaptive Gauss-Kronrod.
double mgf_theta_quadrature(const std::function<double(double)>& mgf, double x, double phi,
                            double rel_tol = 1e-11);

/// Quadrature counterparts of the closed forms; any fading families.
double i1_quadrature(double x, const AngleVariant& phi, const LinkBudget& sd);
double i2_quadrature(double x, const AngleVariant& phi, const LinkBudget& sd,
                     const LinkBudget& rd);
double i1_asym_quadrature(double x, const AngleVariant& phi, const LinkBudget& sd);
double i2_asym_quadrature(double x, const AngleVariant& phi, const LinkBudget& sd,
                          const LinkBudget& rd);

/// High-SNR MGF of either family.
double mgf_asym(const FadingParams& p, double z, double gbar);

}  // namespace relay_aser::relay
