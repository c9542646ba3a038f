#pragma once

// Constellations, conditional SER in AWGN, and ASER assembly over the relay
// system: exact, high-SNR, and by direct quadrature.

#include <complex>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "relay_aser/relay.hpp"

namespace relay_aser::modulation {

using relay::AngleVariant;
using relay::RelaySystem;

/// Rectangular QAM with M_I x M_Q points and quadrature/in-phase spacing ratio beta.
class RqamSpec {
 public:
  RqamSpec(int m_i, int m_q, double beta);

  int m_i() const { return m_i_; }
  int m_q() const { return m_q_; }
  double beta() const { return beta_; }
  double p() const { return 1.0 - 1.0 / m_i_; }
  double q() const { return 1.0 - 1.0 / m_q_; }
  double a() const { return a_; }
  double b() const { return beta_ * a_; }

 private:
  int m_i_, m_q_;
  double beta_, a_;
};

/// Cross QAM, M = 2^{odd} >= 32.
class XqamSpec {
 public:
  explicit XqamSpec(int m);

  int m() const { return m_; }
  int nu() const { return nu_; }
  double g1() const;
  double g2() const;
  double g3() const;
  double a0() const;
  double a_k(int k) const;

 private:
  int m_, nu_;
};

struct Sqam {
  int m;
};
struct Bpsk {};

using Constellation = std::variant<RqamSpec, Sqam, Bpsk, XqamSpec>;

/// One term coef * Q(x sqrt(gamma), phi) of a conditional SER.
struct SerTerm {
  double coef;
  double x;
  AngleVariant angle;
};

std::vector<SerTerm> ser_terms(const Constellation& c);

double conditional_ser(const Constellation& c, double gamma);
double rqam_conditional_ser(const RqamSpec& spec, double gamma);
double xqam_conditional_ser(const XqamSpec& spec, double gamma);

/// Exact ASER. Closed forms when sd is eta-mu and rd kappa-mu, otherwise
/// the quadrature assembly.
double aser(const RelaySystem& sys, const Constellation& c, const specfun::SeriesControl& ctl = {});
double aser_rqam(const RelaySystem& sys, const RqamSpec& spec, const specfun::SeriesControl& ctl = {});
double aser_sqam(const RelaySystem& sys, int m, const specfun::SeriesControl& ctl = {});
double aser_bpsk(const RelaySystem& sys, const specfun::SeriesControl& ctl = {});
double aser_xqam(const RelaySystem& sys, const XqamSpec& spec, const specfun::SeriesControl& ctl = {});

/// Conditional SER terms averaged against the end-to-end MGF by theta quadrature.
double aser_quadrature(const RelaySystem& sys, const Constellation& c);

/// P_inf = e1 P^{-d1} + e2 P^{-d2} with P the linear total SNR.
struct AsymptoticCoefficients {
  double e1 = 0.0, e2 = 0.0;
  double d1 = 0.0, d2 = 0.0;

  double evaluate(double total_snr) const;
};

double aser_asym(const RelaySystem& sys, const Constellation& c, const specfun::SeriesControl& ctl = {});
double aser_rqam_asym(const RelaySystem& sys, const RqamSpec& spec,
                      const specfun::SeriesControl& ctl = {});
double aser_xqam_asym(const RelaySystem& sys, const XqamSpec& spec,
                      const specfun::SeriesControl& ctl = {});
double aser_asym_quadrature(const RelaySystem& sys, const Constellation& c);

AsymptoticCoefficients extract_coefficients(const RelaySystem& sys, const Constellation& c,
                                            const specfun::SeriesControl& ctl = {});

/// d_sd + min(d_sr, d_rd) with d = 2 mu (eta-mu) or mu (kappa-mu).
double diversity_order(const RelaySystem& sys);

/// Unit-energy point set for symbol-level simulation.
std::vector<std::complex<double>> constellation_points(const Constellation& c);
int constellation_size(const Constellation& c);

Constellation constellation_from_json(const nlohmann::json& j);
nlohmann::json constellation_to_json(const Constellation& c);
std::string describe(const Constellation& c);

}  // namespace relay_aser::modulation
