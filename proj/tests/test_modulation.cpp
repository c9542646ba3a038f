#include <cmath>
#include <numbers>

#include "doctest.h"
#include "relay_aser/errors.hpp"
#include "relay_aser/modulation.hpp"

using namespace relay_aser;
using namespace relay_aser::modulation;
using channel::EtaMuParams;
using channel::KappaMuParams;
using relay::RelaySystem;

namespace {

bool rel_close(double got, double want, double tol) {
  return std::abs(got - want) <= tol * std::abs(want);
}

double db(double v) { return std::pow(10.0, v / 10.0); }

RelaySystem system_of(double snr_db, EtaMuParams sd, EtaMuParams sr, KappaMuParams rd, double xi = 0.5) {
  return RelaySystem::make({sd}, {sr}, {rd}, db(snr_db), xi);
}

RelaySystem mu2_system(double snr_db) {
  return system_of(snr_db, EtaMuParams(1.0, 2.0), EtaMuParams(1.0, 2.0), KappaMuParams(2.0, 2.0));
}

}  // namespace

TEST_CASE("constellation parameters") {
  const RqamSpec r(4, 2, 1.0);
  CHECK(r.p() == 0.75);
  CHECK(r.q() == 0.5);
  CHECK(r.a() == doctest::Approx(std::sqrt(1.0 / 3.0)));
  const XqamSpec x(128);
  CHECK(x.nu() == 2);
  CHECK(x.g2() == 4.0 / 128);
  CHECK(x.a0() == doctest::Approx(std::sqrt(96.0 / (31.0 * 128 - 32))));
  CHECK(XqamSpec(512).nu() == 4);
  CHECK_THROWS_AS(XqamSpec(64), DomainError);
  CHECK_THROWS_AS(XqamSpec(8), DomainError);
  CHECK_THROWS_AS(RqamSpec(1, 1, 1.0), DomainError);
  CHECK_THROWS_AS(RqamSpec(4, 2, 0.0), DomainError);
  for (const Constellation& c : {Constellation{RqamSpec(4, 2, 0.5)}, Constellation{Sqam{16}}, Constellation{Bpsk{}},
                                 Constellation{XqamSpec(32)}, Constellation{XqamSpec(128)}, Constellation{XqamSpec(512)}}) {
    const auto pts = constellation_points(c);
    CHECK(static_cast<int>(pts.size()) == constellation_size(c));
    double e = 0.0;
    for (const auto& p : pts) e += std::norm(p);
    CHECK(e / pts.size() == doctest::Approx(1.0));
  }
}

TEST_CASE("conditional SER in AWGN") {
  SUBCASE("RQAM equals the product form") {
    for (double beta : {0.5, 1.0, 1.7}) {
      const RqamSpec r(8, 4, beta);
      for (double g : {0.0, 1.0, 10.0, 100.0}) {
        const double qa = specfun::gaussian_q(r.a() * std::sqrt(g));
        const double qb = specfun::gaussian_q(r.b() * std::sqrt(g));
        const double want = 1.0 - (1.0 - 2.0 * r.p() * qa) * (1.0 - 2.0 * r.q() * qb);
        CHECK(rel_close(rqam_conditional_ser(r, g), want, 1e-12));
      }
    }
  }
  SUBCASE("BPSK") {
    for (double g : {0.3, 4.0}) CHECK(rel_close(conditional_ser(Bpsk{}, g), specfun::gaussian_q(std::sqrt(2.0 * g)), 1e-14));
  }
  SUBCASE("XQAM against symbol-level Monte Carlo") {
    // tests/oracles/modulation.py --mc: 4e6 symbols each
    struct Row {
      int m;
      double gamma_db, mc, se;
    };
    for (const Row& r : {Row{32, 15, 0.1194955, 0.00016218533031670128}, Row{128, 20, 0.20321625, 0.00020119605223260315},
                         Row{32, 0, 0.85641825, 0.00017533256333817276}}) {
      CAPTURE(r.m);
      CHECK(std::abs(xqam_conditional_ser(XqamSpec(r.m), db(r.gamma_db)) - r.mc) < 3.0 * r.se);
    }
  }
  SUBCASE("monotone and bounded") {
    for (const Constellation& c : {Constellation{RqamSpec(4, 2, 1.0)}, Constellation{XqamSpec(128)}, Constellation{Sqam{64}}}) {
      double prev = 1.0;
      for (double g = 0.0; g < 200.0; g += 2.5) {
        const double v = conditional_ser(c, g);
        CHECK(v <= prev + 1e-15);
        CHECK(v >= 0.0);
        prev = v;
      }
    }
    CHECK(xqam_conditional_ser(XqamSpec(32), 1e6) < 1e-100);
  }
}

TEST_CASE("exact ASER against reference values") {
  // tests/oracles/modulation.py
  CHECK(rel_close(aser_rqam(mu2_system(10), RqamSpec(4, 2, 1.0)), 0.14108459558460643, 1e-9));
  CHECK(rel_close(aser_rqam(mu2_system(20), RqamSpec(4, 2, 1.0)), 5.8641165883340633e-5, 1e-9));
  CHECK(rel_close(aser_rqam(mu2_system(15), RqamSpec(8, 2, 0.7)), 0.20505766258800687, 1e-9));
  CHECK(rel_close(aser_xqam(mu2_system(15), XqamSpec(32)), 0.14921421234104048, 1e-9));
  CHECK(rel_close(aser_xqam(system_of(25, EtaMuParams(0.3, 1.2), EtaMuParams(2.0, 0.75), KappaMuParams(0.5, 1.5)), XqamSpec(128)),
                  0.04652309791788648, 1e-9));
  const auto mu_half = system_of(20, EtaMuParams(1.0, 0.5), EtaMuParams(1.0, 0.5), KappaMuParams(1.0, 0.5));
  CHECK(rel_close(aser_sqam(mu_half, 16), 0.031768383149139389, 1e-9));
  CHECK(rel_close(aser_bpsk(system_of(12, EtaMuParams(0.2, 0.8), EtaMuParams(3.0, 1.1), KappaMuParams(4.0, 0.7), 0.6)),
                  0.0026470224457524071, 1e-9));
}

TEST_CASE("closed form matches the quadrature assembly") {
  const auto sys = system_of(17, EtaMuParams(0.4, 1.3), EtaMuParams(2.0, 0.8), KappaMuParams(3.0, 1.6), 0.62);
  for (const Constellation& c : {Constellation{RqamSpec(4, 2, 1.0)}, Constellation{RqamSpec(16, 8, 0.8)}, Constellation{Sqam{64}},
                                 Constellation{Bpsk{}}, Constellation{XqamSpec(32)}, Constellation{XqamSpec(512)}}) {
    CAPTURE(describe(c));
    CHECK(rel_close(aser(sys, c), aser_quadrature(sys, c), 1e-7));
  }
}

TEST_CASE("structural identities") {
  const auto sys = system_of(14, EtaMuParams(0.6, 0.9), EtaMuParams(1.5, 1.25), KappaMuParams(1.0, 2.5));
  for (int m : {4, 16, 64}) {
    const int r = static_cast<int>(std::lround(std::sqrt(m)));
    CHECK(rel_close(aser_sqam(sys, m), aser_rqam(sys, RqamSpec(r, r, 1.0)), 1e-12));
  }
  CHECK(aser_bpsk(sys) == aser_rqam(sys, RqamSpec(2, 1, 0.0)));
  SUBCASE("no relay decode collapses to the direct link") {
    const auto silent = sys.with_gamma_th(INFINITY);
    auto direct = [&](const Constellation& c) {
      double acc = 0.0;
      for (const auto& t : ser_terms(c)) acc += t.coef * relay::i1_exact(t.x, t.angle, silent.sd());
      return acc;
    };
    CHECK(rel_close(aser_rqam(silent, RqamSpec(4, 2, 1.0)), direct(RqamSpec(4, 2, 1.0)), 1e-13));
    CHECK(rel_close(aser_xqam(silent, XqamSpec(32)), direct(XqamSpec(32)), 1e-13));
    CHECK(rel_close(aser_sqam(silent, 16), direct(Sqam{16}), 1e-13));
  }
  SUBCASE("ASER decreases with SNR") {
    double prev = 1.0;
    for (double s = 0.0; s <= 60.0; s += 5.0) {
      const double v = aser_rqam(sys.with_total_snr(db(s)), RqamSpec(4, 2, 1.0));
      CHECK(v < prev);
      CHECK(v > 0.0);
      prev = v;
    }
  }
}

TEST_CASE("asymptotic ASER") {
  CHECK(rel_close(aser_rqam_asym(mu2_system(40), RqamSpec(4, 2, 1.0)), 1.4185372926630655e-16, 1e-9));
  CHECK(rel_close(aser_xqam_asym(mu2_system(40), XqamSpec(32)), 2.5288399447489347e-13, 1e-9));
  const auto sys = mu2_system(45);
  for (const Constellation& c : {Constellation{RqamSpec(4, 2, 1.0)}, Constellation{XqamSpec(128)}}) {
    const auto co = extract_coefficients(sys, c);
    CHECK(rel_close(co.evaluate(sys.total_snr()), aser_asym(sys, c), 1e-12));
    CHECK(co.d1 == 8.0);
    CHECK(co.d2 == 6.0);
    CHECK(rel_close(aser_asym(sys, c), aser_asym_quadrature(sys, c), 1e-8));
  }
  const auto hi = mu2_system(60);
  const double ratio = aser_xqam_asym(hi, XqamSpec(32)) / aser_xqam(hi, XqamSpec(32));
  CHECK(ratio > 0.9);
  CHECK(ratio < 1.1);
}

TEST_CASE("diversity order") {
  CHECK(diversity_order(system_of(10, EtaMuParams(1.0, 1.0), EtaMuParams(1.0, 1.0), KappaMuParams(1.0, 1.0))) == 3.0);
  CHECK(diversity_order(system_of(10, EtaMuParams(1.0, 0.5), EtaMuParams(1.0, 0.5), KappaMuParams(1.0, 1.0))) == 2.0);
  CHECK(diversity_order(system_of(10, EtaMuParams(0.1, 0.5), EtaMuParams(7.0, 0.5), KappaMuParams(9.0, 1.0))) == 2.0);
}

TEST_CASE("constellation JSON") {
  const auto c = constellation_from_json(nlohmann::json::parse(R"({"type":"rqam","mi":4,"mq":2,"beta":1.0})"));
  CHECK(std::get<RqamSpec>(c).m_i() == 4);
  CHECK(constellation_to_json(c)["mq"] == 2);
  CHECK(std::holds_alternative<XqamSpec>(constellation_from_json(nlohmann::json::parse(R"({"type":"xqam","m":32})"))));
  CHECK(std::holds_alternative<Bpsk>(constellation_from_json(nlohmann::json::parse(R"({"type":"bpsk"})"))));
  CHECK_THROWS_AS(constellation_from_json(nlohmann::json::parse(R"({"type":"sqam","m":15})")), DomainError);
  CHECK_THROWS_AS(constellation_from_json(nlohmann::json::parse(R"({"type":"psk","m":8})")), DomainError);
}
