#include "relay_aser/mcsim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <limits>
#include <thread>
#include <vector>

#include "relay_aser/errors.hpp"

namespace relay_aser::mcsim {

namespace {

using cplx = std::complex<double>;
using channel::FadingSampler;
using channel::Rng;

struct Partial {
  double errors = 0.0;
  double sum_sq = 0.0;
  std::int64_t trials = 0;
  std::int64_t outage = 0;
};

Rng stream_rng(std::uint64_t master, int worker, int lane) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(worker), static_cast<std::uint32_t>(lane)};
  return Rng(seq);
}

// One generator per link plus one for symbols and noise, so changing one
// link's model never shifts the draws of another.
struct Streams {
  Rng sd, sr, rd, aux;
  Streams(std::uint64_t master, int worker)
      : sd(stream_rng(master, worker, 0)),
        sr(stream_rng(master, worker, 1)),
        rd(stream_rng(master, worker, 2)),
        aux(stream_rng(master, worker, 3)) {}
};

// Runs body(streams, count) on each worker's share of the trials and
// merges the partials in worker order.
template <class Body>
SimResult run_streams(const SimConfig& cfg, Body&& body) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const int w = static_cast<int>(std::min<std::int64_t>(cfg.workers, cfg.n_trials));
  std::vector<Partial> parts(w);
  std::vector<std::exception_ptr> failures(w);
  auto work = [&](int k) {
    try {
      const std::int64_t lo = cfg.n_trials * k / w;
      const std::int64_t hi = cfg.n_trials * (k + 1) / w;
      Streams streams(cfg.master_seed, k);
      parts[k] = body(streams, hi - lo);
    } catch (...) {
      failures[k] = std::current_exception();
    }
  };
  if (w == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (int k = 0; k < w; ++k) pool.emplace_back(work, k);
    for (auto& t : pool) t.join();
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  Partial total;
  for (const auto& p : parts) {
    total.errors += p.errors;
    total.sum_sq += p.sum_sq;
    total.trials += p.trials;
    total.outage += p.outage;
  }
  SimResult r;
  r.n_trials = total.trials;
  r.n_errors = total.errors;
  r.n_outage = total.outage;
  const double n = static_cast<double>(total.trials);
  r.aser_hat = total.errors / n;
  const double var = std::max(0.0, total.sum_sq / n - r.aser_hat * r.aser_hat);
  r.std_error = std::sqrt(var / std::max(1.0, n - 1.0));
  r.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

struct Links {
  FadingSampler sd, sr, rd;
};

Links make_samplers(const relay::RelaySystem& sys, channel::SamplerMode mode) {
  return Links{FadingSampler(sys.sd().fading, mode), FadingSampler(sys.sr().fading, mode),
               FadingSampler(sys.rd().fading, mode)};
}

std::size_t nearest(const std::vector<cplx>& pts, cplx z) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = std::norm(z - pts[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

void SimConfig::validate() const {
  if (n_trials < 1) throw DomainError("simulation: n_trials must be >= 1");
  if (workers < 1) throw DomainError("simulation: workers must be >= 1");
}

Mode mode_from_string(const std::string& s) {
  if (s == "semi_analytic" || s == "semi-analytic" || s == "semi") return Mode::SemiAnalytic;
  if (s == "symbol_level" || s == "symbol-level" || s == "symbol") return Mode::SymbolLevel;
  throw DomainError("unknown simulation mode '" + s + "' (semi_analytic | symbol_level)");
}

std::string to_string(Mode m) { return m == Mode::SemiAnalytic ? "semi_analytic" : "symbol_level"; }

SimResult simulate(const relay::RelaySystem& sys, const modulation::Constellation& c, const SimConfig& cfg) {
  return cfg.mode == Mode::SemiAnalytic ? simulate_semi_analytic(sys, c, cfg) : simulate_symbol_level(sys, c, cfg);
}

SimResult simulate_semi_analytic(const relay::RelaySystem& sys, const modulation::Constellation& c,
                                 const SimConfig& cfg) {
  const auto terms = modulation::ser_terms(c);
  std::vector<double> angles;
  for (const auto& t : terms) angles.push_back(relay::angle_of(t.angle, t.x));
  // construct once so the inverse-CDF tables are shared by value
  const Links proto = make_samplers(sys, cfg.sampler);
  return run_streams(cfg, [&](Streams& rng, std::int64_t count) {
    Links links = proto;
    Partial p;
    p.trials = count;
    for (std::int64_t i = 0; i < count; ++i) {
      // all three links are drawn every trial so the stream layout is fixed
      const double g_sd = links.sd.power(rng.sd, sys.sd().gbar);
      const double g_sr = links.sr.power(rng.sr, sys.sr().gbar);
      const double g_rd = links.rd.power(rng.rd, sys.rd().gbar);
      double g_t = g_sd;
      if (!sys.direct_only() && g_sr > sys.gamma_th()) {
        g_t += g_rd;
      } else {
        ++p.outage;
      }
      const double r = std::sqrt(g_t);
      double pe = 0.0;
      for (std::size_t k = 0; k < terms.size(); ++k) pe += terms[k].coef * specfun::bounded_q(terms[k].x * r, angles[k]);
      pe = std::clamp(pe, 0.0, 1.0);
      p.errors += pe;
      p.sum_sq += pe * pe;
    }
    return p;
  });
}

namespace {

void binomial_error(SimResult& r) {
  const double n = static_cast<double>(r.n_trials);
  r.std_error = std::sqrt(r.aser_hat * (1.0 - r.aser_hat) / n);
}

}  // namespace

SimResult simulate_symbol_level(const relay::RelaySystem& sys, const modulation::Constellation& c,
                                const SimConfig& cfg) {
  const auto pts = modulation::constellation_points(c);
  const Links proto = make_samplers(sys, cfg.sampler);
  const double a_sd = std::sqrt(sys.sd().gbar);
  const double a_sr = std::sqrt(sys.sr().gbar);
  const double a_rd = std::sqrt(sys.rd().gbar);
  auto r = run_streams(cfg, [&](Streams& rng, std::int64_t count) {
    Links links = proto;
    std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
    std::normal_distribution<double> noise(0.0, std::sqrt(0.5));  // CN(0, 1)
    Partial p;
    p.trials = count;
    for (std::int64_t i = 0; i < count; ++i) {
      const std::size_t sent = pick(rng.aux);
      const cplx s = pts[sent];
      const cplx h_sd = a_sd * links.sd.coefficient(rng.sd);
      const cplx h_sr = a_sr * links.sr.coefficient(rng.sr);
      const cplx h_rd = a_rd * links.rd.coefficient(rng.rd);
      const cplx n_sd(noise(rng.aux), noise(rng.aux));
      const cplx n_rd(noise(rng.aux), noise(rng.aux));
      const cplx y_sd = h_sd * s + n_sd;
      // relay forwards the source symbol when its SNR clears the threshold
      const bool fired = !sys.direct_only() && std::norm(h_sr) > sys.gamma_th();
      cplx z = std::conj(h_sd) * y_sd;
      double gain = std::norm(h_sd);
      if (fired) {
        z += std::conj(h_rd) * (h_rd * s + n_rd);
        gain += std::norm(h_rd);
      } else {
        ++p.outage;
      }
      const bool err = nearest(pts, z / gain) != sent;
      if (err) {
        p.errors += 1.0;
        p.sum_sq += 1.0;
      }
    }
    return p;
  });
  binomial_error(r);
  return r;
}

SimResult simulate_awgn(const modulation::Constellation& c, double gamma, const SimConfig& cfg) {
  if (!(gamma > 0.0)) throw DomainError("simulate_awgn: gamma must be > 0");
  const auto pts = modulation::constellation_points(c);
  const double amp = std::sqrt(gamma);
  auto r = run_streams(cfg, [&](Streams& rng, std::int64_t count) {
    std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
    std::normal_distribution<double> noise(0.0, std::sqrt(0.5));
    Partial p;
    p.trials = count;
    for (std::int64_t i = 0; i < count; ++i) {
      const std::size_t sent = pick(rng.aux);
      const cplx y = amp * pts[sent] + cplx(noise(rng.aux), noise(rng.aux));
      if (nearest(pts, y / amp) != sent) {
        p.errors += 1.0;
        p.sum_sq += 1.0;
      }
    }
    return p;
  });
  binomial_error(r);
  return r;
}

}  // namespace relay_aser::mcsim
