#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "relay_aser/channel.hpp"
#include "relay_aser/errors.hpp"
#include "relay_aser/quadrature.hpp"

using namespace relay_aser;
using namespace relay_aser::channel;

namespace {

bool rel_close(double got, double want, double tol) {
  return std::abs(got - want) <= tol * std::abs(want);
}

double integrate_pdf(const FadingParams& p, double gbar, double weight_z = 0.0) {
  quad::Options opt;
  opt.rel_tol = 1e-11;
  auto f = [&](double t) {
    // gamma = t / (1 - t) maps [0, 1) onto [0, inf)
    if (t >= 1.0) return 0.0;
    const double g = t / (1.0 - t);
    return pdf(p, g, gbar) * std::exp(-weight_z * g) / ((1.0 - t) * (1.0 - t));
  };
  return quad::integrate(f, 0.0, 1.0, opt).value;
}

}  // namespace

TEST_CASE("SNR densities against reference values") {
  // tests/oracles/specfun_channel.py
  CHECK(rel_close(eta_mu_pdf(EtaMuParams(0.3, 0.8), 0.7, 2.0), 0.3911122289301411, 1e-12));
  CHECK(rel_close(eta_mu_pdf(EtaMuParams(2.5, 1.7), 1.3, 1.0), 0.44544354698021972, 1e-12));
  CHECK(rel_close(kappa_mu_pdf(KappaMuParams(2.0, 1.5), 0.9, 2.0), 0.33305843973316763, 1e-12));
  CHECK(rel_close(kappa_mu_pdf(KappaMuParams(5.0, 3.0), 40.0, 10.0), 2.3833898030430406e-10, 1e-11));
}

TEST_CASE("densities integrate to one") {
  for (const FadingParams& p : std::vector<FadingParams>{EtaMuParams(0.3, 0.8), EtaMuParams(1.0, 0.5),
                                                          EtaMuParams(4.0, 2.25), KappaMuParams(0.0, 1.5),
                                                          KappaMuParams(3.0, 2.0), KappaMuParams(1.0, 0.7)}) {
    CAPTURE(describe(p));
    CHECK(integrate_pdf(p, 1.7) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("MGF is the Laplace transform of the density") {
  for (const FadingParams& p : std::vector<FadingParams>{EtaMuParams(0.3, 0.8), EtaMuParams(2.0, 1.5),
                                                          KappaMuParams(2.5, 1.5), KappaMuParams(0.5, 3.0)}) {
    for (double z : {0.1, 1.0, 4.0}) {
      CAPTURE(describe(p));
      CAPTURE(z);
      CHECK(rel_close(mgf(p, z, 2.0), integrate_pdf(p, 2.0, z), 1e-9));
    }
  }
  CHECK(mgf(EtaMuParams(0.4, 1.1), 0.0, 3.0) == 1.0);
  CHECK_THROWS_AS(mgf(EtaMuParams(0.4, 1.1), -1.0, 3.0), DomainError);
  CHECK_THROWS_AS(mgf(KappaMuParams(0.4, 1.1), 1.0, 0.0), DomainError);
}

TEST_CASE("high-SNR MGF forms") {
  const EtaMuParams em(0.6, 1.3);
  const KappaMuParams km(1.8, 2.2);
  for (double gbar : {1e4, 1e6}) {
    CHECK(rel_close(eta_mu_mgf_asym(em, 0.5, gbar), eta_mu_mgf(em, 0.5, gbar), 50.0 / gbar));
    CHECK(rel_close(kappa_mu_mgf_asym(km, 0.5, gbar), kappa_mu_mgf(km, 0.5, gbar), 50.0 / gbar));
  }
  CHECK(diversity(em) == 2.6);
  CHECK(diversity(km) == 2.2);
}

TEST_CASE("eta-mu Format 1 symmetry eta <-> 1/eta") {
  const EtaMuParams a(0.25, 1.2), b(4.0, 1.2);
  CHECK(a.h() == doctest::Approx(b.h()));
  CHECK(a.big_h() == doctest::Approx(-b.big_h()));
  for (double g : {0.05, 0.8, 3.0}) CHECK(rel_close(eta_mu_pdf(a, g, 1.3), eta_mu_pdf(b, g, 1.3), 1e-13));
  CHECK(rel_close(eta_mu_mgf(a, 0.7, 1.3), eta_mu_mgf(b, 0.7, 1.3), 1e-14));
}

TEST_CASE("CDF against reference values") {
  struct Row {
    FadingParams p;
    double th, gbar, want;
  };
  const std::vector<Row> rows{
      {EtaMuParams(0.3, 0.8), 1.0, 2.0, 0.34459657225851969},
      {EtaMuParams(2.5, 1.7), 3.0, 1.0, 0.99190740663169854},
      {EtaMuParams(0.05, 0.25), 0.5, 1.0, 0.62634855056461901},
      {EtaMuParams(1.0, 1.5), 4.0, 3.0, 0.76189669444645566},
      {KappaMuParams(2.0, 1.5), 1.0, 2.0, 0.21706467164011707},
      {KappaMuParams(0.0, 0.6), 0.3, 1.0, 0.37443408921700198},
      {KappaMuParams(5.0, 3.0), 2.0, 1.0, 0.99589542313363078},
      {KappaMuParams(0.8, 0.4), 1.0, 1.5, 0.58959664414339764},
  };
  for (const auto& r : rows) {
    CAPTURE(describe(r.p));
    CHECK(rel_close(fading_cdf(r.p, r.th, r.gbar), r.want, 1e-9));
  }
  CHECK(fading_cdf(EtaMuParams(0.3, 0.8), 0.0, 1.0) == 0.0);
  CHECK(fading_cdf(KappaMuParams(1.0, 1.0), INFINITY, 1.0) == 1.0);
}

TEST_CASE("classical special cases") {
  const double gbar = 2.0;
  SUBCASE("Rayleigh is exponential") {
    const auto p = special_case(SpecialCase::Rayleigh);
    for (double g : {0.1, 1.0, 5.0}) CHECK(rel_close(pdf(p, g, gbar), std::exp(-g / gbar) / gbar, 1e-13));
    CHECK(rel_close(mgf(p, 0.8, gbar), 1.0 / (1.0 + 0.8 * gbar), 1e-14));
  }
  SUBCASE("Nakagami-m is Gamma") {
    const double m = 2.5;
    const auto p = special_case(SpecialCase::Nakagami, m);
    for (double g : {0.1, 1.0, 5.0}) {
      const double want = std::pow(m / gbar, m) * std::pow(g, m - 1) * std::exp(-m * g / gbar) / std::tgamma(m);
      CHECK(rel_close(pdf(p, g, gbar), want, 1e-12));
    }
    CHECK(rel_close(mgf(p, 0.8, gbar), std::pow(1.0 + 0.8 * gbar / m, -m), 1e-13));
  }
  SUBCASE("Hoyt MGF") {
    const double q = 0.4;
    const auto p = special_case(SpecialCase::Hoyt, q);
    const double q2 = q * q, z = 0.8;
    const double want = 1.0 / std::sqrt(1.0 + 2.0 * z * gbar + 4.0 * q2 * z * z * gbar * gbar / ((1 + q2) * (1 + q2)));
    CHECK(rel_close(mgf(p, z, gbar), want, 1e-13));
  }
  SUBCASE("Rice density") {
    const double k = 3.0;
    const auto p = special_case(SpecialCase::Rice, k);
    for (double g : {0.1, 1.0, 5.0}) {
      const double want = (1 + k) / gbar * std::exp(-k - (1 + k) * g / gbar) *
                          std::cyl_bessel_i(0.0, 2.0 * std::sqrt(k * (1 + k) * g / gbar));
      CHECK(rel_close(pdf(p, g, gbar), want, 1e-12));
    }
  }
  SUBCASE("parameter checks") {
    CHECK_THROWS_AS(special_case(SpecialCase::Hoyt, 1.5), DomainError);
    CHECK_THROWS_AS(special_case(SpecialCase::Nakagami, 0.3), DomainError);
    CHECK_THROWS_AS(EtaMuParams(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(KappaMuParams(-0.1, 1.0), DomainError);
  }
}

TEST_CASE("samplers reproduce the distribution") {
  const int n = 200000;
  const std::vector<std::pair<FadingParams, SamplerMode>> cases{
      {EtaMuParams(0.3, 1.0), SamplerMode::Physical},  {EtaMuParams(2.0, 1.5), SamplerMode::Physical},
      {KappaMuParams(2.5, 2.0), SamplerMode::Physical}, {KappaMuParams(0.7, 0.6), SamplerMode::InverseCdf},
      {EtaMuParams(0.5, 0.35), SamplerMode::Auto},
  };
  for (const auto& [p, mode] : cases) {
    CAPTURE(describe(p));
    FadingSampler sampler(p, mode);
    Rng rng(1234);
    std::vector<double> draws(n);
    double mean = 0.0;
    for (auto& d : draws) {
      d = sampler.power(rng, 1.5);
      mean += d / n;
    }
    CHECK(mean == doctest::Approx(1.5).epsilon(0.02));
    std::sort(draws.begin(), draws.end());
    double ks = 0.0;
    for (int i = 0; i < n; i += 97) {
      ks = std::max(ks, std::abs(fading_cdf(p, draws[i], 1.5) - (i + 0.5) / n));
    }
    // 99.9% Kolmogorov bound is 1.95 / sqrt(n)
    CHECK(ks < 1.95 / std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("complex coefficients have unit mean power") {
  FadingSampler s(KappaMuParams(4.0, 1.0));
  Rng rng(7);
  double acc = 0.0;
  for (int i = 0; i < 100000; ++i) acc += std::norm(s.coefficient(rng));
  CHECK(acc / 100000 == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("physical construction needs integral cluster counts") {
  CHECK_THROWS_AS(FadingSampler(EtaMuParams(1.0, 0.7), SamplerMode::Physical), UnsupportedParameterError);
  CHECK_THROWS_AS(FadingSampler(KappaMuParams(1.0, 1.5), SamplerMode::Physical), UnsupportedParameterError);
  CHECK_FALSE(FadingSampler(KappaMuParams(1.0, 1.5), SamplerMode::Auto).physical());
  Rng rng(1);
  CHECK_THROWS_AS(sample_power_gain(EtaMuParams(1.0, 0.7), 1.0, rng), UnsupportedParameterError);
}

TEST_CASE("JSON round trip") {
  const FadingParams p = KappaMuParams(1.5, 2.0);
  nlohmann::json j;
  to_json(j, p);
  CHECK(j["type"] == "kappa-mu");
  const auto back = fading_from_json(j);
  CHECK(std::get<KappaMuParams>(back).kappa() == 1.5);
  CHECK(is_eta_mu(fading_from_json(nlohmann::json::parse(R"({"type":"eta-mu","eta":0.5,"mu":1})"))));
  CHECK_THROWS_AS(fading_from_json(nlohmann::json::parse(R"({"type":"eta-mu","eta":0.5})")), DomainError);
  CHECK_THROWS_AS(fading_from_json(nlohmann::json::parse(R"({"type":"eta-mu","format":2,"eta":0.5,"mu":1})")),
                  DomainError);
}
