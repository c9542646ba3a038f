#include "relay_aser/relay.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "relay_aser/errors.hpp"
#include "relay_aser/quadrature.hpp"

namespace relay_aser::relay {

namespace {

constexpr double kPi = std::numbers::pi;
const double kLogTwoPi = std::log(2.0 * kPi);
const double kLogTwoSqrtPi = std::log(2.0 * std::sqrt(kPi));

using channel::EtaMuParams;
using channel::KappaMuParams;
using specfun::log_beta;
using specfun::log_gamma;

const EtaMuParams& eta_mu_of(const LinkBudget& link, const char* op) {
  const auto* p = std::get_if<EtaMuParams>(&link.fading);
  if (p == nullptr) throw DomainError(std::string(op) + ": closed form needs an eta-mu sd link");
  return *p;
}

const KappaMuParams& kappa_mu_of(const LinkBudget& link, const char* op) {
  const auto* p = std::get_if<KappaMuParams>(&link.fading);
  if (p == nullptr) throw DomainError(std::string(op) + ": closed form needs a kappa-mu rd link");
  return *p;
}

void check_x(double x, const char* op) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError(std::string(op) + ": x must be positive");
}

void check_gbar(const LinkBudget& link, const char* op) {
  if (!(link.gbar > 0.0) || !std::isfinite(link.gbar)) {
    throw DomainError(std::string(op) + ": link mean SNR must be positive");
  }
}

void check_angle(const AngleVariant& v, const char* op) {
  if (const auto* a = std::get_if<ArccotRatio>(&v)) {
    if (!(a->y > 0.0)) throw DomainError(std::string(op) + ": arccot variant needs y > 0");
  } else if (const auto* b = std::get_if<ArctanRatio>(&v)) {
    if (!(b->y > 0.0) || !(b->z > 0.0)) {
      throw DomainError(std::string(op) + ": arctan variant needs y, z > 0");
    }
  }
}

double log_mgf_eta_mu(const EtaMuParams& p, double z, double g) {
  const double mu = p.mu();
  return -mu * (std::log1p(z * g / (2.0 * mu * (p.h() - p.big_h()))) +
                std::log1p(z * g / (2.0 * mu * (p.h() + p.big_h()))));
}

// log (4 mu sqrt(h))^{2 mu}, shared by the high-SNR forms.
double log_eta_mu_asym_scale(const EtaMuParams& p) {
  return 2.0 * p.mu() * std::log(4.0 * p.mu() * std::sqrt(p.h()));
}

double fd_checked(double a, std::span<const double> b, double c, std::span<const double> x,
                  const specfun::SeriesControl& ctl) {
  return specfun::lauricella_fd(a, b, c, x, ctl, specfun::Evaluation::Integral);
}

}  // namespace

double angle_of(const AngleVariant& v, double x) {
  if (std::holds_alternative<HalfPi>(v)) return kPi / 2.0;
  if (const auto* a = std::get_if<ArccotRatio>(&v)) return std::atan2(x, a->y);
  const auto& b = std::get<ArctanRatio>(v);
  return std::atan2(b.y, b.z);
}

std::string describe(const AngleVariant& v) {
  std::ostringstream os;
  if (std::holds_alternative<HalfPi>(v)) {
    os << "pi/2";
  } else if (const auto* a = std::get_if<ArccotRatio>(&v)) {
    os << "arccot(" << a->y << "/x)";
  } else {
    const auto& b = std::get<ArctanRatio>(v);
    os << "arctan(" << b.y << "/" << b.z << ")";
  }
  return os.str();
}

double gamma_th_from_rate(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("rate must be positive");
  return std::exp2(2.0 * rate) - 1.0;
}

RelaySystem RelaySystem::make(const LinkSpec& sd, const LinkSpec& sr, const LinkSpec& rd,
                              double total_snr, double xi, double gamma_th, double rate,
                              bool direct_only) {
  for (const auto* l : {&sd, &sr, &rd}) {
    if (!(l->omega > 0.0) || !std::isfinite(l->omega)) {
      throw DomainError("link variance omega must be positive");
    }
  }
  RelaySystem s;
  s.sd_.fading = sd.fading;
  s.sd_.omega = sd.omega;
  s.sr_.fading = sr.fading;
  s.sr_.omega = sr.omega;
  s.rd_.fading = rd.fading;
  s.rd_.omega = rd.omega;
  s.direct_only_ = direct_only;
  if (gamma_th < 0.0) {
    s.rate_ = rate;
    s.gamma_th_ = gamma_th_from_rate(rate);
  } else {
    s.gamma_th_ = gamma_th;
    s.rate_ = std::log2(1.0 + gamma_th) / 2.0;
  }
  s.xi_ = xi;
  s.total_snr_ = total_snr;
  s.refresh();
  return s;
}

void RelaySystem::refresh() {
  if (!(total_snr_ > 0.0) || !std::isfinite(total_snr_)) {
    throw DomainError("total SNR must be positive and finite");
  }
  if (!(xi_ > 0.0 && xi_ < 1.0)) throw DomainError("power allocation factor xi must be in (0, 1)");
  if (std::isnan(gamma_th_) || gamma_th_ < 0.0) throw DomainError("gamma_th must be >= 0");
  sd_.power_share = direct_only_ ? 1.0 : xi_;
  sr_.power_share = xi_;
  rd_.power_share = 1.0 - xi_;
  for (auto* l : {&sd_, &sr_, &rd_}) l->gbar = l->omega * l->power_share * total_snr_;
}

RelaySystem RelaySystem::with_xi(double xi) const {
  RelaySystem s = *this;
  s.xi_ = xi;
  s.refresh();
  return s;
}

RelaySystem RelaySystem::with_total_snr(double total_snr) const {
  RelaySystem s = *this;
  s.total_snr_ = total_snr;
  s.refresh();
  return s;
}

RelaySystem RelaySystem::with_gamma_th(double gamma_th) const {
  RelaySystem s = *this;
  s.gamma_th_ = gamma_th;
  s.rate_ = std::log2(1.0 + gamma_th) / 2.0;
  s.refresh();
  return s;
}

bool RelaySystem::closed_form_ready() const {
  return channel::is_eta_mu(sd_.fading) && channel::is_kappa_mu(rd_.fading);
}

double outage_prob_sr(const RelaySystem& sys, const specfun::SeriesControl& ctl) {
  if (sys.direct_only()) return 1.0;
  return channel::fading_cdf(sys.sr().fading, sys.gamma_th(), sys.sr().gbar, ctl);
}

double outage_prob_sr_asym(const RelaySystem& sys) {
  if (sys.direct_only()) return 1.0;
  const auto& sr = sys.sr();
  if (const auto* em = std::get_if<EtaMuParams>(&sr.fading)) {
    const double mu = em->mu();
    return std::exp(2.0 * mu * std::log(2.0 * mu * std::sqrt(em->h()) * sys.gamma_th() / sr.gbar) -
                    log_gamma(2.0 * mu + 1.0));
  }
  const auto& km = std::get<KappaMuParams>(sr.fading);
  const double mu = km.mu();
  return std::exp(mu * std::log(mu * (1.0 + km.kappa()) * sys.gamma_th() / sr.gbar) -
                  mu * km.kappa() - log_gamma(mu + 1.0));
}

double end_to_end_mgf(const RelaySystem& sys, double z, double a_sr) {
  const double m_sd = channel::mgf(sys.sd().fading, z, sys.sd().gbar);
  if (a_sr >= 1.0) return m_sd;
  const double m_rd = channel::mgf(sys.rd().fading, z, sys.rd().gbar);
  return a_sr * m_sd + (1.0 - a_sr) * m_sd * m_rd;
}

double end_to_end_mgf(const RelaySystem& sys, double z, const specfun::SeriesControl& ctl) {
  return end_to_end_mgf(sys, z, outage_prob_sr(sys, ctl));
}

double mgf_asym(const FadingParams& p, double z, double gbar) {
  if (const auto* em = std::get_if<EtaMuParams>(&p)) return channel::eta_mu_mgf_asym(*em, z, gbar);
  return channel::kappa_mu_mgf_asym(std::get<KappaMuParams>(p), z, gbar);
}

// ---------------------------------------------------------------------------
// Exact closed forms

double i1_exact(double x, const AngleVariant& phi, const LinkBudget& sd,
                const specfun::SeriesControl& ctl) {
  constexpr const char* op = "i1_exact";
  check_x(x, op);
  check_gbar(sd, op);
  check_angle(phi, op);
  const auto& p = eta_mu_of(sd, op);
  const double mu = p.mu();
  const double g = sd.gbar;
  const double cm = 4.0 * mu * (p.h() - p.big_h());
  const double cp = 4.0 * mu * (p.h() + p.big_h());
  const double x2 = x * x;

  if (std::holds_alternative<HalfPi>(phi)) {
    const std::array<double, 2> b{mu, mu};
    const std::array<double, 2> args{cm / (cm + x2 * g), cp / (cp + x2 * g)};
    const double log_pref = log_gamma(2.0 * mu + 0.5) - kLogTwoSqrtPi -
                            log_gamma(2.0 * mu + 1.0) + log_mgf_eta_mu(p, x2 / 2.0, g);
    return std::exp(log_pref) * fd_checked(0.5, b, 2.0 * mu + 1.0, args, ctl);
  }

  const std::array<double, 3> b{1.0, mu, mu};
  if (const auto* v = std::get_if<ArccotRatio>(&phi)) {
    const double y = v->y;
    const double s = x2 + y * y;
    const std::array<double, 3> args{x2 / s, (cm + x2 * g) / (cm + s * g),
                                     (cp + x2 * g) / (cp + s * g)};
    const double log_pref = std::log(x * y / s) - kLogTwoPi - std::log(2.0 * mu + 0.5) +
                            log_mgf_eta_mu(p, s / 2.0, g);
    return std::exp(log_pref) * fd_checked(1.0, b, 2.0 * mu + 1.5, args, ctl);
  }

  const auto& v = std::get<ArctanRatio>(phi);
  const double y2 = v.y * v.y;
  const double t = y2 + v.z * v.z;
  const double s = x2 * t / y2;  // x^2 / sin^2 phi
  const std::array<double, 3> args{y2 / t, (cm + x2 * g) / (cm + s * g),
                                   (cp + x2 * g) / (cp + s * g)};
  const double log_pref = std::log(v.y * v.z / t) - kLogTwoPi - std::log(2.0 * mu + 0.5) +
                          log_mgf_eta_mu(p, s / 2.0, g);
  return std::exp(log_pref) * fd_checked(1.0, b, 2.0 * mu + 1.5, args, ctl);
}

double i2_exact(double x, const AngleVariant& phi, const LinkBudget& sd, const LinkBudget& rd,
                const specfun::SeriesControl& ctl) {
  constexpr const char* op = "i2_exact";
  check_x(x, op);
  check_gbar(sd, op);
  check_gbar(rd, op);
  check_angle(phi, op);
  const auto& p = eta_mu_of(sd, op);
  const auto& q = kappa_mu_of(rd, op);
  const double mu = p.mu();
  const double g = sd.gbar;
  const double mr = q.mu();
  const double kappa = q.kappa();
  const double gr = rd.gbar;
  const double cm = 4.0 * mu * (p.h() - p.big_h());
  const double cp = 4.0 * mu * (p.h() + p.big_h());
  const double big_k = 2.0 * mr * (1.0 + kappa);
  const double big_a = 2.0 * mu + mr + 0.5;
  const double x2 = x * x;
  const double log_sd_scale = 2.0 * mu * std::log(4.0 * mu * std::sqrt(p.h()) * gr / g);
  const double lin_k = 2.0 * mr * mr * kappa * (1.0 + kappa);

  // With s = x^2 / sin^2 phi every variant reduces to the same kernel; the
  // pi/2 one has a single radical fewer.
  auto sd_args = [&](double s) {
    const double den = s * g * gr + big_k * g;
    return std::array<double, 2>{(big_k * g - cm * gr) / den, (big_k * g - cp * gr) / den};
  };

  if (std::holds_alternative<HalfPi>(phi)) {
    const double w = x2 * gr + big_k;
    const auto sa = sd_args(x2);
    const std::array<double, 3> b{1.0, mu, mu};
    const std::array<double, 3> args{big_k / w, sa[0], sa[1]};
    const double log_pref = -mr * kappa + log_gamma(big_a) - log_gamma(big_a + 0.5) + std::log(x) +
                            mr * std::log(big_k) + log_sd_scale + 0.5 * std::log(gr) -
                            kLogTwoSqrtPi - big_a * std::log(w);
    return std::exp(log_pref) *
           specfun::lauricella_phi1(big_a, b, big_a + 0.5, args, lin_k / w, ctl);
  }

  double s = 0.0;  // x^2 / sin^2 phi
  if (const auto* v = std::get_if<ArccotRatio>(&phi)) {
    s = x2 + v->y * v->y;
  } else {
    const auto& w = std::get<ArctanRatio>(phi);
    s = x2 * (w.y * w.y + w.z * w.z) / (w.y * w.y);
  }
  const double w = s * gr + big_k;
  const auto sa = sd_args(s);
  const std::array<double, 4> b{1.0, 0.5, mu, mu};
  const std::array<double, 4> args{big_k / w, (x2 * gr + big_k) / w, sa[0], sa[1]};
  const double log_pref = -mr * kappa + std::log(x) + 0.5 * std::log(gr) - std::log(big_a) +
                          mr * std::log(big_k) + log_sd_scale - kLogTwoPi - big_a * std::log(w);
  return std::exp(log_pref) * specfun::lauricella_phi1(big_a, b, big_a + 1.0, args, lin_k / w, ctl);
}

// ---------------------------------------------------------------------------
// High-SNR closed forms

namespace {

// With s = x^2 / sin^2 phi and e the total decay exponent of the MGF product,
// the angle integral of sin^{2e} leaves
//   sin(phi) cos(phi) / (2 pi) B(1, e + 1/2) F(1, e + 1; e + 3/2; sin^2 phi) * s^{-e}.
double asym_angle_factor(double x, const AngleVariant& phi, double e,
                         const specfun::SeriesControl& ctl, double& log_s) {
  const double x2 = x * x;
  if (std::holds_alternative<HalfPi>(phi)) {
    log_s = std::log(x2);
    return std::exp(log_beta(0.5, e + 0.5)) / (2.0 * kPi);
  }
  double sin2 = 0.0, sin_cos = 0.0;
  if (const auto* v = std::get_if<ArccotRatio>(&phi)) {
    const double s = x2 + v->y * v->y;
    sin2 = x2 / s;
    sin_cos = x * v->y / s;
    log_s = std::log(s);
  } else {
    const auto& w = std::get<ArctanRatio>(phi);
    const double t = w.y * w.y + w.z * w.z;
    sin2 = w.y * w.y / t;
    sin_cos = w.y * w.z / t;
    log_s = std::log(x2 * t / (w.y * w.y));
  }
  const std::array<double, 1> b{e + 1.0};
  const std::array<double, 1> args{sin2};
  return sin_cos / (2.0 * kPi) * std::exp(log_beta(1.0, e + 0.5)) *
         specfun::lauricella_fd(1.0, b, e + 1.5, args, ctl);
}

}  // namespace

double i1_asym(double x, const AngleVariant& phi, const LinkBudget& sd,
               const specfun::SeriesControl& ctl) {
  constexpr const char* op = "i1_asym";
  check_x(x, op);
  check_gbar(sd, op);
  check_angle(phi, op);
  const auto& p = eta_mu_of(sd, op);
  const double e = 2.0 * p.mu();
  double log_s = 0.0;
  const double factor = asym_angle_factor(x, phi, e, ctl, log_s);
  return factor * std::exp(log_eta_mu_asym_scale(p) - e * (log_s + std::log(sd.gbar)));
}

double i2_asym(double x, const AngleVariant& phi, const LinkBudget& sd, const LinkBudget& rd,
               const specfun::SeriesControl& ctl) {
  constexpr const char* op = "i2_asym";
  check_x(x, op);
  check_gbar(sd, op);
  check_gbar(rd, op);
  check_angle(phi, op);
  const auto& p = eta_mu_of(sd, op);
  const auto& q = kappa_mu_of(rd, op);
  const double mr = q.mu();
  const double e = 2.0 * p.mu() + mr;
  double log_s = 0.0;
  const double factor = asym_angle_factor(x, phi, e, ctl, log_s);
  // M_rd^inf(s/2) = (2 mu_rd (1+kappa) / (s gbar_rd))^{mu_rd} e^{-mu_rd kappa}
  const double log_rd = mr * (std::log(2.0 * mr * (1.0 + q.kappa())) - log_s - std::log(rd.gbar)) -
                        mr * q.kappa();
  const double log_sd =
      log_eta_mu_asym_scale(p) - 2.0 * p.mu() * (log_s + std::log(sd.gbar));
  return factor * std::exp(log_sd + log_rd);
}

// ---------------------------------------------------------------------------
// Quadrature

double mgf_theta_quadrature(const std::function<double(double)>& mgf, double x, double phi,
                            double rel_tol) {
  if (!(x >= 0.0)) throw DomainError("mgf_theta_quadrature: x must be >= 0");
  if (!(phi > 0.0) || phi > kPi / 2.0 + 1e-15) {
    throw DomainError("mgf_theta_quadrature: phi must be in (0, pi/2]");
  }
  quad::Options opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = 0.0;
  const double x2 = x * x;
  const double v = quad::integrate_or_throw(
      "mgf_theta_quadrature",
      [&](double t) {
        const double s = std::sin(t);
        if (s == 0.0) return 0.0;
        return mgf(x2 / (2.0 * s * s));
      },
      0.0, phi, opt);
  return v / kPi;
}

double i1_quadrature(double x, const AngleVariant& phi, const LinkBudget& sd) {
  check_x(x, "i1_quadrature");
  check_angle(phi, "i1_quadrature");
  return mgf_theta_quadrature([&](double z) { return channel::mgf(sd.fading, z, sd.gbar); }, x,
                              angle_of(phi, x));
}

double i2_quadrature(double x, const AngleVariant& phi, const LinkBudget& sd,
                     const LinkBudget& rd) {
  check_x(x, "i2_quadrature");
  check_angle(phi, "i2_quadrature");
  return mgf_theta_quadrature(
      [&](double z) {
        return channel::mgf(sd.fading, z, sd.gbar) * channel::mgf(rd.fading, z, rd.gbar);
      },
      x, angle_of(phi, x));
}

double i1_asym_quadrature(double x, const AngleVariant& phi, const LinkBudget& sd) {
  check_x(x, "i1_asym_quadrature");
  check_angle(phi, "i1_asym_quadrature");
  return mgf_theta_quadrature([&](double z) { return mgf_asym(sd.fading, z, sd.gbar); }, x,
                              angle_of(phi, x));
}

double i2_asym_quadrature(double x, const AngleVariant& phi, const LinkBudget& sd,
                          const LinkBudget& rd) {
  check_x(x, "i2_asym_quadrature");
  check_angle(phi, "i2_asym_quadrature");
  return mgf_theta_quadrature(
      [&](double z) { return mgf_asym(sd.fading, z, sd.gbar) * mgf_asym(rd.fading, z, rd.gbar); },
      x, angle_of(phi, x));
}

}  // namespace relay_aser::relay
