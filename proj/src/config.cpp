#include "relay_aser/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "relay_aser/parallel.hpp"

namespace relay_aser::config {

namespace {

using nlohmann::json;

void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) throw ConfigError(path + "." + k, "unknown field");
  }
}

const json& object_at(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) throw ConfigError(path + "." + key, "missing field");
  const auto& v = j.at(key);
  if (!v.is_object()) throw ConfigError(path + "." + key, "expected an object");
  return v;
}

double number_at(const json& j, const char* key, const std::string& path) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw ConfigError(path + "." + key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(path + "." + key, "must be finite");
  return d;
}

bool bool_at(const json& j, const char* key, const std::string& path) {
  const auto& v = j.at(key);
  if (!v.is_boolean()) throw ConfigError(path + "." + key, "expected true or false");
  return v.get<bool>();
}

std::int64_t int_at(const json& j, const char* key, const std::string& path) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(path + "." + key, "expected an integer");
  return v.get<std::int64_t>();
}

relay::LinkSpec link_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  relay::LinkSpec spec;
  json fading = j;
  if (j.contains("omega")) {
    spec.omega = number_at(j, "omega", path);
    if (!(spec.omega > 0.0)) throw ConfigError(path + ".omega", "must be > 0");
    fading.erase("omega");
  }
  try {
    spec.fading = channel::fading_from_json(fading);
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
  return spec;
}

channel::SamplerMode sampler_from_string(const std::string& s, const std::string& path) {
  if (s == "auto") return channel::SamplerMode::Auto;
  if (s == "physical") return channel::SamplerMode::Physical;
  if (s == "inverse_cdf") return channel::SamplerMode::InverseCdf;
  throw ConfigError(path, "expected \"auto\", \"physical\" or \"inverse_cdf\"");
}

}  // namespace

std::vector<double> sweep_grid(double start_db, double stop_db, double step_db, const std::string& path) {
  if (!(start_db <= stop_db)) throw ConfigError(path, "start_db must be <= stop_db");
  if (!(step_db > 0.0)) throw ConfigError(path + ".step_db", "must be > 0");
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((stop_db - start_db) / step_db + 1e-9));
  if (n > 100000) throw ConfigError(path, "more than 100000 grid points");
  for (long i = 0; i <= n; ++i) out.push_back(start_db + i * step_db);
  return out;
}

relay::RelaySystem Scenario::system_at(double snr_db) const {
  return relay::RelaySystem::make(sd, sr, rd, std::pow(10.0, snr_db / 10.0), xi, gamma_th.value_or(-1.0), rate,
                                  direct_only);
}

nlohmann::json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // byte offset -> line / column
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream where;
    where << "line " << line << ", column " << col;
    throw ConfigError(where.str(), "malformed JSON");
  }
}

nlohmann::json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

Scenario system_from_json(const json& sys, const std::string& path, Scenario s) {
  if (!sys.is_object()) throw ConfigError(path, "expected an object");
  only_keys(sys, path, {"links", "total_snr_db", "sweep", "xi", "rate", "gamma_th", "direct_only"});
  if (sys.contains("links")) {
    const auto& links = object_at(sys, "links", path);
    only_keys(links, path + ".links", {"sd", "sr", "rd"});
    for (const char* name : {"sd", "sr", "rd"}) {
      if (!links.contains(name)) throw ConfigError(path + ".links." + name, "missing link");
    }
    s.sd = link_from_json(links.at("sd"), path + ".links.sd");
    s.sr = link_from_json(links.at("sr"), path + ".links.sr");
    s.rd = link_from_json(links.at("rd"), path + ".links.rd");
  }
  if (sys.contains("total_snr_db") && sys.contains("sweep")) {
    throw ConfigError(path, "give either total_snr_db or sweep, not both");
  }
  if (sys.contains("total_snr_db")) s.snr_db = {number_at(sys, "total_snr_db", path)};
  if (sys.contains("sweep")) {
    const auto& sw = object_at(sys, "sweep", path);
    const std::string sp = path + ".sweep";
    only_keys(sw, sp, {"start_db", "stop_db", "step_db"});
    for (const char* k : {"start_db", "stop_db"}) {
      if (!sw.contains(k)) throw ConfigError(sp + "." + k, "missing field");
    }
    const double start = number_at(sw, "start_db", sp);
    const double stop = number_at(sw, "stop_db", sp);
    const double step = sw.contains("step_db") ? number_at(sw, "step_db", sp) : 1.0;
    s.snr_db = sweep_grid(start, stop, step, sp);
  }
  if (sys.contains("xi")) {
    s.xi = number_at(sys, "xi", path);
    if (!(s.xi > 0.0 && s.xi < 1.0)) throw ConfigError(path + ".xi", "must be in (0, 1)");
  }
  if (sys.contains("rate") && sys.contains("gamma_th")) {
    throw ConfigError(path, "give either rate or gamma_th, not both");
  }
  if (sys.contains("rate")) {
    s.rate = number_at(sys, "rate", path);
    if (!(s.rate > 0.0)) throw ConfigError(path + ".rate", "must be > 0");
    s.gamma_th.reset();
  }
  if (sys.contains("gamma_th")) {
    const double g = number_at(sys, "gamma_th", path);
    if (!(g >= 0.0)) throw ConfigError(path + ".gamma_th", "must be >= 0");
    s.gamma_th = g;
  }
  if (sys.contains("direct_only")) s.direct_only = bool_at(sys, "direct_only", path);
  return s;
}

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("$", "expected a JSON object at the top level");
  only_keys(j, "$", {"system", "constellation", "sim", "outputs"});
  if (!j.contains("system")) throw ConfigError("$.system", "missing field");
  Scenario s = system_from_json(j.at("system"), "$.system");
  if (!j.at("system").contains("links")) throw ConfigError("$.system.links", "missing field");
  if (j.contains("constellation")) {
    try {
      s.constellation = modulation::constellation_from_json(j.at("constellation"));
    } catch (const DomainError& e) {
      throw ConfigError("$.constellation", e.what());
    }
  }
  if (j.contains("sim")) {
    const auto& sim = object_at(j, "sim", "$");
    only_keys(sim, "$.sim", {"seed", "trials", "workers", "mode", "sampler"});
    if (sim.contains("seed")) {
      const auto seed = int_at(sim, "seed", "$.sim");
      if (seed < 0) throw ConfigError("$.sim.seed", "must be >= 0");
      s.sim.master_seed = static_cast<std::uint64_t>(seed);
    }
    if (sim.contains("trials")) s.sim.n_trials = int_at(sim, "trials", "$.sim");
    if (sim.contains("workers")) s.sim.workers = static_cast<int>(int_at(sim, "workers", "$.sim"));
    if (sim.contains("mode")) {
      if (!sim.at("mode").is_string()) throw ConfigError("$.sim.mode", "expected a string");
      try {
        s.sim.mode = mcsim::mode_from_string(sim.at("mode").get<std::string>());
      } catch (const DomainError& e) {
        throw ConfigError("$.sim.mode", e.what());
      }
    }
    if (sim.contains("sampler")) {
      if (!sim.at("sampler").is_string()) throw ConfigError("$.sim.sampler", "expected a string");
      s.sim.sampler = sampler_from_string(sim.at("sampler").get<std::string>(), "$.sim.sampler");
    }
    if (s.sim.n_trials < 1) throw ConfigError("$.sim.trials", "must be >= 1");
    if (s.sim.workers < 1) throw ConfigError("$.sim.workers", "must be >= 1");
  }
  if (j.contains("outputs")) {
    const auto& out = j.at("outputs");
    if (!out.is_array()) throw ConfigError("$.outputs", "expected an array");
    s.outputs = Outputs{false, false, false};
    for (std::size_t i = 0; i < out.size(); ++i) {
      const std::string p = "$.outputs[" + std::to_string(i) + "]";
      if (!out[i].is_string()) throw ConfigError(p, "expected a string");
      const auto v = out[i].get<std::string>();
      if (v == "exact") {
        s.outputs.exact = true;
      } else if (v == "asymptotic") {
        s.outputs.asymptotic = true;
      } else if (v == "montecarlo") {
        s.outputs.montecarlo = true;
      } else {
        throw ConfigError(p, "expected \"exact\", \"asymptotic\" or \"montecarlo\"");
      }
    }
  }
  // parameters must also make a valid system
  try {
    (void)s.system_at(s.snr_db.front());
  } catch (const DomainError& e) {
    throw ConfigError("$.system", e.what());
  }
  return s;
}

nlohmann::json scenario_to_json(const Scenario& s) {
  auto link = [](const relay::LinkSpec& l) {
    json j;
    channel::to_json(j, l.fading);
    j["omega"] = l.omega;
    return j;
  };
  json sys{{"links", {{"sd", link(s.sd)}, {"sr", link(s.sr)}, {"rd", link(s.rd)}}},
           {"xi", s.xi},
           {"direct_only", s.direct_only}};
  if (s.snr_db.size() == 1) {
    sys["total_snr_db"] = s.snr_db.front();
  } else {
    const double step = s.snr_db[1] - s.snr_db[0];
    sys["sweep"] = {{"start_db", s.snr_db.front()}, {"stop_db", s.snr_db.back()}, {"step_db", step}};
  }
  if (s.gamma_th) {
    sys["gamma_th"] = *s.gamma_th;
  } else {
    sys["rate"] = s.rate;
  }
  json outputs = json::array();
  if (s.outputs.exact) outputs.push_back("exact");
  if (s.outputs.asymptotic) outputs.push_back("asymptotic");
  if (s.outputs.montecarlo) outputs.push_back("montecarlo");
  const char* sampler = s.sim.sampler == channel::SamplerMode::Auto         ? "auto"
                        : s.sim.sampler == channel::SamplerMode::Physical ? "physical"
                                                                          : "inverse_cdf";
  return json{{"system", sys},
              {"constellation", modulation::constellation_to_json(s.constellation)},
              {"sim",
               {{"seed", s.sim.master_seed},
                {"trials", s.sim.n_trials},
                {"workers", s.sim.workers},
                {"mode", mcsim::to_string(s.sim.mode)},
                {"sampler", sampler}}},
              {"outputs", outputs}};
}

}  // namespace relay_aser::config

namespace relay_aser::config {

namespace {

constexpr double kReferenceTol = 1e-3;

nlohmann::json case_key(const Scenario& s) {
  auto j = scenario_to_json(s);
  return nlohmann::json{{"system", j.at("system")}, {"constellation", j.at("constellation")}};
}

}  // namespace

PowerBatch power_batch_from_json(const nlohmann::json& j) {
  PowerBatch batch;
  if (!j.is_object()) throw ConfigError("$", "expected a JSON object at the top level");
  if (!j.contains("cases")) {
    Scenario s = scenario_from_json(j);
    if (s.snr_db.size() != 1) throw ConfigError("$.system.sweep", "power-opt needs a single total_snr_db");
    batch.cases.push_back({"", std::move(s), std::nullopt});
    return batch;
  }
  only_keys(j, "$", {"system", "constellation", "tolerance", "cases"});
  if (j.contains("tolerance")) {
    batch.tolerance = number_at(j, "tolerance", "$");
    if (!(batch.tolerance > 0.0 && batch.tolerance < 0.1)) throw ConfigError("$.tolerance", "must be in (0, 0.1)");
  }
  const nlohmann::json base_system = j.value("system", nlohmann::json::object());
  if (!base_system.is_object()) throw ConfigError("$.system", "expected an object");
  const auto& cases = j.at("cases");
  if (!cases.is_array() || cases.empty()) throw ConfigError("$.cases", "expected a non-empty array");
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const std::string p = "$.cases[" + std::to_string(i) + "]";
    const auto& c = cases[i];
    if (!c.is_object()) throw ConfigError(p, "expected an object");
    only_keys(c, p, {"label", "system", "reference_xi"});
    nlohmann::json sys = base_system;
    if (c.contains("system")) {
      if (!c.at("system").is_object()) throw ConfigError(p + ".system", "expected an object");
      sys.merge_patch(c.at("system"));
    }
    nlohmann::json full{{"system", sys}};
    if (j.contains("constellation")) full["constellation"] = j.at("constellation");
    PowerCase pc;
    try {
      pc.scenario = scenario_from_json(full);
    } catch (const ConfigError& e) {
      // re-anchor "$.system..." paths at this case
      std::string where = e.where();
      if (where.rfind("$", 0) == 0) where = p + where.substr(1);
      const std::string msg = std::string(e.what()).substr(e.where().size() + 2);
      throw ConfigError(where, msg);
    }
    if (pc.scenario.snr_db.size() != 1) throw ConfigError(p + ".system.sweep", "power-opt needs a single total_snr_db");
    if (c.contains("label")) {
      if (!c.at("label").is_string()) throw ConfigError(p + ".label", "expected a string");
      pc.label = c.at("label").get<std::string>();
    }
    if (c.contains("reference_xi")) {
      const double r = number_at(c, "reference_xi", p);
      if (!(r > 0.0 && r < 1.0)) throw ConfigError(p + ".reference_xi", "must be in (0, 1)");
      pc.reference_xi = r;
    }
    batch.cases.push_back(std::move(pc));
  }
  return batch;
}

std::vector<PowerRow> solve_power_batch(const PowerBatch& batch, int workers) {
  auto rows = parallel_map<PowerRow>(batch.cases.size(), workers, [&](std::size_t i) {
    const auto& pc = batch.cases[i];
    PowerRow row;
    row.input = pc;
    const auto sys = pc.scenario.system_at(pc.scenario.snr_db.front());
    row.solution = poweralloc::optimize_xi(sys, pc.scenario.constellation, batch.tolerance);
    if (pc.reference_xi) row.deviation = row.solution.xi_opt - *pc.reference_xi;
    return row;
  });
  std::vector<nlohmann::json> keys;
  for (const auto& r : rows) keys.push_back(case_key(r.input.scenario));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& r = rows[i];
    const double xi = r.solution.xi_opt;
    if (xi < 1e-3 || xi > 1.0 - 1e-3) r.flags.push_back("boundary");
    if (!r.deviation) continue;
    if (std::abs(*r.deviation) > kDeviationFlag) r.flags.push_back("deviation");
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (k == i || keys[k] != keys[i] || !rows[k].input.reference_xi) continue;
      const double other = *rows[k].input.reference_xi;
      if (std::abs(other - *r.input.reference_xi) > kReferenceTol) r.conflicting_references.push_back(other);
    }
    // same parameters listed twice with different values: only the one the solver disagrees with is flagged
    if (!r.conflicting_references.empty() && std::abs(*r.deviation) > kReferenceTol) {
      r.flags.push_back("duplicate_conflict");
    }
  }
  return rows;
}

nlohmann::json power_rows_to_json(const std::vector<PowerRow>& rows) {
  auto out = nlohmann::json::array();
  for (const auto& r : rows) {
    const auto& s = r.input.scenario;
    nlohmann::json j{{"label", r.input.label}};
    j["system"] = scenario_to_json(s).at("system");
    j["constellation"] = modulation::constellation_to_json(s.constellation);
    j["xi_opt"] = r.solution.xi_opt;
    j["aser_at_opt"] = r.solution.aser_at_opt;
    j["residual"] = r.solution.residual;
    j["iterations"] = r.solution.iterations;
    j["xi_golden"] = r.solution.xi_golden;
    j["xi_lower"] = r.solution.xi_lower;
    j["reference_xi"] = r.input.reference_xi ? nlohmann::json(*r.input.reference_xi) : nlohmann::json(nullptr);
    j["deviation"] = r.deviation ? nlohmann::json(*r.deviation) : nlohmann::json(nullptr);
    j["conflicting_reference_xi"] = r.conflicting_references;
    j["flags"] = r.flags;
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace relay_aser::config
