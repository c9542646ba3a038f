// relay-aser: batch front end over the relay_aser library.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "relay_aser/config.hpp"
#include "relay_aser/errors.hpp"
#include "relay_aser/mcsim.hpp"
#include "relay_aser/modulation.hpp"
#include "relay_aser/parallel.hpp"
#include "relay_aser/poweralloc.hpp"
#include "relay_aser/specfun.hpp"

namespace {

using namespace relay_aser;
using nlohmann::json;

enum Exit { kOk = 0, kFailure = 1, kInvalid = 2, kNoConvergence = 3 };

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw std::runtime_error("cannot write " + out_path);
  f << text;
}

struct Common {
  std::string config_path;
  std::string out_path = "-";
  int workers = 1;
  bool direct_only = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  std::optional<std::string> mode;
};

config::Scenario load_scenario(const Common& o) {
  auto s = config::scenario_from_json(config::load_file(o.config_path));
  if (o.direct_only) s.direct_only = true;
  if (o.seed) s.sim.master_seed = *o.seed;
  if (o.trials) s.sim.n_trials = *o.trials;
  if (o.mode) {
    try {
      s.sim.mode = mcsim::mode_from_string(*o.mode);
    } catch (const DomainError& e) {
      throw config::ConfigError("--mode", e.what());
    }
  }
  if (s.sim.n_trials < 1) throw config::ConfigError("--trials", "must be >= 1");
  return s;
}

struct Point {
  double exact = NAN, asym = NAN;
  mcsim::SimResult mc;
  modulation::AsymptoticCoefficients coef;
};

std::string sweep_csv(const config::Scenario& s, int workers, bool with_mc) {
  // analytic points in a pool; each simulation already spreads over sim.workers threads
  auto pts = parallel_map<Point>(s.snr_db.size(), workers, [&](std::size_t i) {
    const auto sys = s.system_at(s.snr_db[i]);
    Point p;
    if (s.outputs.exact) p.exact = modulation::aser(sys, s.constellation);
    if (s.outputs.asymptotic) p.asym = modulation::aser_asym(sys, s.constellation);
    return p;
  });
  std::ostringstream csv;
  csv << "snr_db,aser_exact,aser_asym" << (with_mc ? ",mc_aser,mc_stderr" : "") << "\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    csv << num(s.snr_db[i]) << "," << num(pts[i].exact) << "," << num(pts[i].asym);
    if (with_mc) {
      const auto r = mcsim::simulate(s.system_at(s.snr_db[i]), s.constellation, s.sim);
      csv << "," << num(r.aser_hat) << "," << num(r.std_error);
    }
    csv << "\n";
  }
  return csv.str();
}

int cmd_aser(const Common& o) {
  const auto s = load_scenario(o);
  emit(o.out_path, sweep_csv(s, o.workers, s.outputs.montecarlo));
  return kOk;
}

int cmd_simulate(const Common& o) {
  auto s = load_scenario(o);
  s.sim.workers = std::max(s.sim.workers, o.workers);
  emit(o.out_path, sweep_csv(s, o.workers, true));
  return kOk;
}

int cmd_asym(const Common& o) {
  const auto s = load_scenario(o);
  auto pts = parallel_map<Point>(s.snr_db.size(), o.workers, [&](std::size_t i) {
    const auto sys = s.system_at(s.snr_db[i]);
    Point p;
    p.asym = modulation::aser_asym(sys, s.constellation);
    p.coef = modulation::extract_coefficients(sys, s.constellation);
    return p;
  });
  std::ostringstream csv;
  csv << "snr_db,aser_asym,e1,d1,e2,d2\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& c = pts[i].coef;
    csv << num(s.snr_db[i]) << "," << num(pts[i].asym) << "," << num(c.e1) << "," << num(c.d1) << "," << num(c.e2)
        << "," << num(c.d2) << "\n";
  }
  emit(o.out_path, csv.str());
  return kOk;
}

int cmd_power_opt(const Common& o) {
  auto batch = config::power_batch_from_json(config::load_file(o.config_path));
  if (o.direct_only) throw config::ConfigError("--direct-only", "power split is undefined without the relay");
  const auto rows = config::solve_power_batch(batch, o.workers);
  emit(o.out_path, config::power_rows_to_json(rows).dump(2) + "\n");
  for (const auto& r : rows) {
    if (r.flags.empty()) continue;
    std::cerr << "note: " << (r.input.label.empty() ? "case" : r.input.label) << " flagged";
    for (const auto& f : r.flags) std::cerr << " " << f;
    std::cerr << std::setprecision(6) << " (xi_opt " << r.solution.xi_opt;
    if (r.input.reference_xi) std::cerr << ", reference " << *r.input.reference_xi;
    for (double c : r.conflicting_references) std::cerr << ", also listed as " << c;
    std::cerr << ")\n";
  }
  return kOk;
}

// specfun eval <name> '<json args>'

double arg(const json& j, const char* k) {
  if (!j.contains(k) || !j.at(k).is_number()) throw config::ConfigError(std::string("args.") + k, "expected a number");
  return j.at(k).get<double>();
}

std::vector<double> vec(const json& j, const char* k) {
  if (!j.contains(k) || !j.at(k).is_array()) throw config::ConfigError(std::string("args.") + k, "expected an array");
  std::vector<double> v;
  for (const auto& e : j.at(k)) {
    if (!e.is_number()) throw config::ConfigError(std::string("args.") + k, "expected numbers");
    v.push_back(e.get<double>());
  }
  return v;
}

specfun::Evaluation method(const json& j) {
  const auto m = j.value("method", std::string("integral"));
  if (m == "integral") return specfun::Evaluation::Integral;
  if (m == "series") return specfun::Evaluation::Series;
  throw config::ConfigError("args.method", "expected \"integral\" or \"series\"");
}

const std::map<std::string, std::function<double(const json&)>>& specfun_table() {
  static const std::map<std::string, std::function<double(const json&)>> t{
      {"gaussian_q", [](const json& j) { return specfun::gaussian_q(arg(j, "x")); }},
      {"bounded_q", [](const json& j) { return specfun::bounded_q(arg(j, "x"), arg(j, "phi")); }},
      {"log_gamma", [](const json& j) { return specfun::log_gamma(arg(j, "x")); }},
      {"beta", [](const json& j) { return specfun::beta(arg(j, "a"), arg(j, "b")); }},
      {"pochhammer", [](const json& j) { return specfun::pochhammer(arg(j, "a"), arg(j, "n")); }},
      {"lauricella_fd",
       [](const json& j) {
         return specfun::lauricella_fd(arg(j, "a"), vec(j, "b"), arg(j, "c"), vec(j, "x"), {}, method(j));
       }},
      {"lauricella_phi1",
       [](const json& j) {
         return specfun::lauricella_phi1(arg(j, "a"), vec(j, "b"), arg(j, "c"), vec(j, "x"), arg(j, "xn"), {},
                                         method(j));
       }},
      {"lauricella_phi2",
       [](const json& j) {
         return specfun::lauricella_phi2(arg(j, "b1"), arg(j, "b2"), arg(j, "c"), arg(j, "x1"), arg(j, "x2"));
       }},
      {"yacoub_y", [](const json& j) { return specfun::yacoub_y(arg(j, "nu"), arg(j, "a"), arg(j, "b")); }},
      {"bessel_i_scaled", [](const json& j) { return specfun::bessel_i_scaled(arg(j, "nu"), arg(j, "z")); }},
  };
  return t;
}

int cmd_specfun(const std::string& name, const std::string& args_text) {
  const auto& t = specfun_table();
  const auto it = t.find(name);
  if (it == t.end()) {
    std::string names;
    for (const auto& [k, v] : t) names += (names.empty() ? "" : ", ") + k;
    throw config::ConfigError("name", "unknown function '" + name + "' (one of " + names + ")");
  }
  const auto j = config::parse_text(args_text.empty() ? "{}" : args_text);
  if (!j.is_object()) throw config::ConfigError("args", "expected a JSON object");
  std::cout << num(it->second(j)) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ASER of dual-hop decode-and-forward relaying over mixed eta-mu / kappa-mu fading"};
  app.require_subcommand(1);
  Common o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out_path, "output file ('-' for stdout)");
    sub->add_option("--workers", o.workers, "worker threads")->check(CLI::Range(1, 1024));
    sub->add_flag("--direct-only", o.direct_only, "suppress the relay branch");
  };
  auto add_sim = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--trials", o.trials, "Monte Carlo trials per grid point");
    sub->add_option("--mode", o.mode, "semi_analytic | symbol_level");
  };

  auto* aser = app.add_subcommand("aser", "exact (and asymptotic) ASER over the SNR grid, CSV");
  add_common(aser);
  add_sim(aser);
  auto* asym = app.add_subcommand("asym", "high-SNR ASER and its coefficients, CSV");
  add_common(asym);
  auto* popt = app.add_subcommand("power-opt", "optimal source power fraction, JSON rows");
  add_common(popt);
  auto* sim = app.add_subcommand("simulate", "Monte Carlo next to the closed form, CSV");
  add_common(sim);
  add_sim(sim);

  auto* sf = app.add_subcommand("specfun", "evaluate a special function");
  sf->require_subcommand(1);
  auto* sf_eval = sf->add_subcommand("eval", "specfun eval <name> '<json args>'");
  std::string sf_name, sf_args;
  sf_eval->add_option("name", sf_name, "function name")->required();
  sf_eval->add_option("args", sf_args, "JSON object of arguments");
  auto* sf_list = sf->add_subcommand("list", "list function names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*aser) return cmd_aser(o);
    if (*asym) return cmd_asym(o);
    if (*popt) return cmd_power_opt(o);
    if (*sim) return cmd_simulate(o);
    if (*sf_eval) return cmd_specfun(sf_name, sf_args);
    if (*sf_list) {
      for (const auto& [k, v] : specfun_table()) std::cout << k << "\n";
      return kOk;
    }
  } catch (const config::ConfigError& e) {
    std::cerr << "error: invalid config at " << e.what() << "\n";
    return kInvalid;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: no convergence in " << e.operation() << ": "
              << std::string(e.what()).substr(e.operation().size() + 2) << "\n";
    return kNoConvergence;
  } catch (const DomainError& e) {
    std::cerr << "error: invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const UnsupportedParameterError& e) {
    std::cerr << "error: invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
