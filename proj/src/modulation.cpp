#include "relay_aser/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

#include "relay_aser/errors.hpp"

namespace relay_aser::modulation {

namespace {

using relay::ArccotRatio;
using relay::ArctanRatio;
using relay::HalfPi;

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

double clamp_probability(double raw, const char* op) {
  if (raw < -1e-9 || raw > 1.0 + 1e-9) {
    std::cerr << "warning: " << op << " produced " << raw << " outside [0, 1]; clamped\n";
  }
  return std::clamp(raw, 0.0, 1.0);
}

struct Sums {
  double first = 0.0;   // sum coef * I1
  double second = 0.0;  // sum coef * I2
};

template <class F1, class F2>
Sums sum_terms(const std::vector<SerTerm>& terms, bool need_second, F1&& f1, F2&& f2) {
  Sums s;
  for (const auto& t : terms) {
    s.first += t.coef * f1(t);
    if (need_second) s.second += t.coef * f2(t);
  }
  return s;
}

}  // namespace

RqamSpec::RqamSpec(int m_i, int m_q, double beta) : m_i_(m_i), m_q_(m_q), beta_(beta) {
  if (m_i < 1 || m_q < 1 || m_i * m_q < 2) throw DomainError("rqam: need M_I, M_Q >= 1 and M_I*M_Q >= 2");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw DomainError("rqam: beta must be >= 0");
  if (beta == 0.0 && m_q > 1) throw DomainError("rqam: beta = 0 only allowed with M_Q = 1");
  a_ = std::sqrt(6.0 / ((m_i * m_i - 1.0) + (m_q * m_q - 1.0) * beta * beta));
}

XqamSpec::XqamSpec(int m) : m_(m) {
  const int bits = is_power_of_two(m) ? static_cast<int>(std::lround(std::log2(m))) : 0;
  if (m < 32 || bits % 2 == 0) throw DomainError("xqam: M must be 2^odd and >= 32");
  nu_ = static_cast<int>(std::lround(std::sqrt(2.0 * m) / 8.0));
}

double XqamSpec::g1() const { return 4.0 - 6.0 / std::sqrt(2.0 * m_); }
double XqamSpec::g2() const { return 4.0 / m_; }
double XqamSpec::g3() const { return 4.0 - 12.0 / std::sqrt(2.0 * m_) + 12.0 / m_; }
double XqamSpec::a0() const { return std::sqrt(96.0 / (31.0 * m_ - 32.0)); }
double XqamSpec::a_k(int k) const { return std::numbers::sqrt2 * k * a0(); }

std::vector<SerTerm> ser_terms(const Constellation& c) {
  std::vector<SerTerm> out;
  if (const auto* r = std::get_if<RqamSpec>(&c)) {
    const double p = r->p(), q = r->q(), a = r->a(), b = r->b();
    if (p > 0.0) out.push_back({2.0 * p, a, HalfPi{}});
    if (q > 0.0) out.push_back({2.0 * q, b, HalfPi{}});
    if (p > 0.0 && q > 0.0) {
      // arccot(b/a) at x = a, and arctan(b/a) = arccot(a/b) at x = b
      out.push_back({-2.0 * p * q, a, ArccotRatio{b}});
      out.push_back({-2.0 * p * q, b, ArccotRatio{a}});
    }
    return out;
  }
  if (const auto* s = std::get_if<Sqam>(&c)) {
    const double root = std::sqrt(static_cast<double>(s->m));
    const double pt = 1.0 - 1.0 / root;
    const double at = std::sqrt(3.0 / (s->m - 1.0));
    out.push_back({4.0 * pt, at, HalfPi{}});
    out.push_back({-4.0 * pt * pt, at, ArccotRatio{at}});
    return out;
  }
  if (std::holds_alternative<Bpsk>(c)) {
    out.push_back({1.0, std::numbers::sqrt2, HalfPi{}});
    return out;
  }
  const auto& x = std::get<XqamSpec>(c);
  const double g1 = x.g1(), g2 = x.g2(), g3 = x.g3(), a0 = x.a0();
  const int nu = x.nu();
  out.push_back({g1, a0, HalfPi{}});
  for (int k = 1; k <= nu - 1; ++k) {
    out.push_back({-g2, x.a_k(k), ArctanRatio{static_cast<double>(k), k + 1.0}});
  }
  out.push_back({g2, x.a_k(1), HalfPi{}});
  for (int k = 2; k <= nu; ++k) {
    out.push_back({g2, x.a_k(k), ArctanRatio{static_cast<double>(k), k - 1.0}});
  }
  out.push_back({-g3, a0, ArccotRatio{a0}});
  for (int k = 1; k <= nu - 1; ++k) {
    out.push_back({-2.0 * g2, a0, ArctanRatio{1.0, 2.0 * k + 1.0}});
  }
  return out;
}

double conditional_ser(const Constellation& c, double gamma) {
  if (!(gamma >= 0.0)) throw DomainError("conditional_ser: gamma must be >= 0");
  const double r = std::sqrt(gamma);
  double acc = 0.0;
  for (const auto& t : ser_terms(c)) {
    acc += t.coef * specfun::bounded_q(t.x * r, relay::angle_of(t.angle, t.x));
  }
  return std::clamp(acc, 0.0, 1.0);
}

double rqam_conditional_ser(const RqamSpec& spec, double gamma) { return conditional_ser(spec, gamma); }
double xqam_conditional_ser(const XqamSpec& spec, double gamma) { return conditional_ser(spec, gamma); }

double aser(const RelaySystem& sys, const Constellation& c, const specfun::SeriesControl& ctl) {
  if (!sys.closed_form_ready()) return aser_quadrature(sys, c);
  const double a_sr = relay::outage_prob_sr(sys, ctl);
  const bool relay_active = a_sr < 1.0;
  const auto s = sum_terms(
      ser_terms(c), relay_active,
      [&](const SerTerm& t) { return relay::i1_exact(t.x, t.angle, sys.sd(), ctl); },
      [&](const SerTerm& t) { return relay::i2_exact(t.x, t.angle, sys.sd(), sys.rd(), ctl); });
  return clamp_probability(a_sr * s.first + (1.0 - a_sr) * s.second, "aser");
}

double aser_rqam(const RelaySystem& sys, const RqamSpec& spec, const specfun::SeriesControl& ctl) {
  return aser(sys, spec, ctl);
}

double aser_sqam(const RelaySystem& sys, int m, const specfun::SeriesControl& ctl) {
  const int root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
  if (root < 2 || root * root != m) throw DomainError("sqam: M must be a perfect square >= 4");
  return aser(sys, Sqam{m}, ctl);
}

double aser_bpsk(const RelaySystem& sys, const specfun::SeriesControl& ctl) { return aser(sys, Bpsk{}, ctl); }

double aser_xqam(const RelaySystem& sys, const XqamSpec& spec, const specfun::SeriesControl& ctl) {
  return aser(sys, spec, ctl);
}

double aser_quadrature(const RelaySystem& sys, const Constellation& c) {
  const double a_sr = relay::outage_prob_sr(sys);
  double acc = 0.0;
  for (const auto& t : ser_terms(c)) {
    acc += t.coef * relay::mgf_theta_quadrature(
                        [&](double z) { return relay::end_to_end_mgf(sys, z, a_sr); }, t.x,
                        relay::angle_of(t.angle, t.x));
  }
  return clamp_probability(acc, "aser_quadrature");
}

// ---------------------------------------------------------------------------
// High SNR

double AsymptoticCoefficients::evaluate(double total_snr) const {
  return e1 * std::pow(total_snr, -d1) + e2 * std::pow(total_snr, -d2);
}

double aser_asym(const RelaySystem& sys, const Constellation& c, const specfun::SeriesControl& ctl) {
  const bool closed = sys.closed_form_ready();
  const bool relay_active = !sys.direct_only();
  const auto s = sum_terms(
      ser_terms(c), relay_active,
      [&](const SerTerm& t) {
        return closed ? relay::i1_asym(t.x, t.angle, sys.sd(), ctl)
                      : relay::i1_asym_quadrature(t.x, t.angle, sys.sd());
      },
      [&](const SerTerm& t) {
        return closed ? relay::i2_asym(t.x, t.angle, sys.sd(), sys.rd(), ctl)
                      : relay::i2_asym_quadrature(t.x, t.angle, sys.sd(), sys.rd());
      });
  if (!relay_active) return s.first;
  // 1 - A_sr is taken as 1 at high SNR
  return relay::outage_prob_sr_asym(sys) * s.first + s.second;
}

double aser_rqam_asym(const RelaySystem& sys, const RqamSpec& spec, const specfun::SeriesControl& ctl) {
  return aser_asym(sys, spec, ctl);
}

double aser_xqam_asym(const RelaySystem& sys, const XqamSpec& spec, const specfun::SeriesControl& ctl) {
  return aser_asym(sys, spec, ctl);
}

double aser_asym_quadrature(const RelaySystem& sys, const Constellation& c) {
  double first = 0.0, second = 0.0;
  for (const auto& t : ser_terms(c)) {
    first += t.coef * relay::i1_asym_quadrature(t.x, t.angle, sys.sd());
    if (!sys.direct_only()) second += t.coef * relay::i2_asym_quadrature(t.x, t.angle, sys.sd(), sys.rd());
  }
  if (sys.direct_only()) return first;
  return relay::outage_prob_sr_asym(sys) * first + second;
}

AsymptoticCoefficients extract_coefficients(const RelaySystem& sys, const Constellation& c,
                                            const specfun::SeriesControl& ctl) {
  const auto unit = sys.with_total_snr(1.0);
  const bool closed = unit.closed_form_ready();
  AsymptoticCoefficients out;
  const double d_sd = channel::diversity(unit.sd().fading);
  const auto s = sum_terms(
      ser_terms(c), !unit.direct_only(),
      [&](const SerTerm& t) {
        return closed ? relay::i1_asym(t.x, t.angle, unit.sd(), ctl)
                      : relay::i1_asym_quadrature(t.x, t.angle, unit.sd());
      },
      [&](const SerTerm& t) {
        return closed ? relay::i2_asym(t.x, t.angle, unit.sd(), unit.rd(), ctl)
                      : relay::i2_asym_quadrature(t.x, t.angle, unit.sd(), unit.rd());
      });
  if (unit.direct_only()) {
    out.e1 = s.first;
    out.d1 = d_sd;
    return out;
  }
  out.e1 = relay::outage_prob_sr_asym(unit) * s.first;
  out.d1 = d_sd + channel::diversity(unit.sr().fading);
  out.e2 = s.second;
  out.d2 = d_sd + channel::diversity(unit.rd().fading);
  return out;
}

double diversity_order(const RelaySystem& sys) {
  const double d_sd = channel::diversity(sys.sd().fading);
  if (sys.direct_only()) return d_sd;
  return d_sd + std::min(channel::diversity(sys.sr().fading), channel::diversity(sys.rd().fading));
}

// ---------------------------------------------------------------------------
// Point sets and JSON

int constellation_size(const Constellation& c) {
  if (const auto* r = std::get_if<RqamSpec>(&c)) return r->m_i() * r->m_q();
  if (const auto* s = std::get_if<Sqam>(&c)) return s->m;
  if (std::holds_alternative<Bpsk>(c)) return 2;
  return std::get<XqamSpec>(c).m();
}

std::vector<std::complex<double>> constellation_points(const Constellation& c) {
  std::vector<std::complex<double>> pts;
  auto grid = [&](int mi, int mq, double beta) {
    for (int i = 0; i < mi; ++i) {
      for (int j = 0; j < mq; ++j) {
        pts.emplace_back(2.0 * i - mi + 1, beta * (2.0 * j - mq + 1));
      }
    }
  };
  if (const auto* r = std::get_if<RqamSpec>(&c)) {
    grid(r->m_i(), r->m_q(), r->beta());
  } else if (const auto* s = std::get_if<Sqam>(&c)) {
    const int root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(s->m))));
    grid(root, root, 1.0);
  } else if (std::holds_alternative<Bpsk>(c)) {
    grid(2, 1, 0.0);
  } else {
    // square of side 1.5 s, s = sqrt(M/2), with s/4 x s/4 corner blocks removed
    const int m = std::get<XqamSpec>(c).m();
    const int s = static_cast<int>(std::lround(std::sqrt(m / 2.0)));
    const int side = 3 * s / 2;
    const int corner = s / 4;
    for (int i = 0; i < side; ++i) {
      for (int j = 0; j < side; ++j) {
        const bool edge_i = i < corner || i >= side - corner;
        const bool edge_j = j < corner || j >= side - corner;
        if (edge_i && edge_j) continue;
        pts.emplace_back(2.0 * i - side + 1, 2.0 * j - side + 1);
      }
    }
  }
  double energy = 0.0;
  for (const auto& p : pts) energy += std::norm(p);
  const double scale = 1.0 / std::sqrt(energy / pts.size());
  for (auto& p : pts) p *= scale;
  return pts;
}

namespace {

int int_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw DomainError(std::string("constellation: missing field '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw DomainError(std::string("constellation: field '") + key + "' must be an integer");
  return v.get<int>();
}

}  // namespace

Constellation constellation_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw DomainError("constellation: expected an object with a string 'type'");
  }
  const auto type = j.at("type").get<std::string>();
  if (type == "rqam") {
    double beta = 1.0;
    if (j.contains("beta")) {
      if (!j.at("beta").is_number()) throw DomainError("constellation: field 'beta' must be a number");
      beta = j.at("beta").get<double>();
    }
    return RqamSpec(int_field(j, "mi"), int_field(j, "mq"), beta);
  }
  if (type == "sqam") {
    const int m = int_field(j, "m");
    const int root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(std::max(m, 0)))));
    if (root < 2 || root * root != m) throw DomainError("constellation: sqam M must be a perfect square >= 4");
    return Sqam{m};
  }
  if (type == "bpsk") return Bpsk{};
  if (type == "xqam") return XqamSpec(int_field(j, "m"));
  throw DomainError("constellation: unknown type '" + type + "'");
}

nlohmann::json constellation_to_json(const Constellation& c) {
  if (const auto* r = std::get_if<RqamSpec>(&c)) {
    return {{"type", "rqam"}, {"mi", r->m_i()}, {"mq", r->m_q()}, {"beta", r->beta()}};
  }
  if (const auto* s = std::get_if<Sqam>(&c)) return {{"type", "sqam"}, {"m", s->m}};
  if (std::holds_alternative<Bpsk>(c)) return {{"type", "bpsk"}};
  return {{"type", "xqam"}, {"m", std::get<XqamSpec>(c).m()}};
}

std::string describe(const Constellation& c) {
  std::ostringstream os;
  if (const auto* r = std::get_if<RqamSpec>(&c)) {
    os << r->m_i() << "x" << r->m_q() << "-RQAM(beta=" << r->beta() << ")";
  } else if (const auto* s = std::get_if<Sqam>(&c)) {
    os << s->m << "-SQAM";
  } else if (std::holds_alternative<Bpsk>(c)) {
    os << "BPSK";
  } else {
    os << std::get<XqamSpec>(c).m() << "-XQAM";
  }
  return os.str();
}

}  // namespace relay_aser::modulation
