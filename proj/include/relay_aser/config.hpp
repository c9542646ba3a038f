#pragma once

// JSON scenario files shared by the CLI and the Python module.
//
// {
//   "system": {
//     "links": {"sd": {"type": "eta-mu", "eta": 1, "mu": 2, "omega": 1}, "sr": {...}, "rd": {...}},
//     "total_snr_db": 20 | "sweep": {"start_db": 0, "stop_db": 40, "step_db": 2},
//     "xi": 0.5, "rate": 1 | "gamma_th": 3, "direct_only": false
//   },
//   "constellation": {"type": "rqam", "mi": 4, "mq": 2, "beta": 1},
//   "sim": {"seed": 1, "trials": 100000, "workers": 1, "mode": "semi_analytic", "sampler": "auto"},
//   "outputs": ["exact", "asymptotic", "montecarlo"]
// }

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relay_aser/errors.hpp"
#include "relay_aser/mcsim.hpp"
#include "relay_aser/modulation.hpp"
#include "relay_aser/poweralloc.hpp"

namespace relay_aser::config {

/// Invalid scenario file; `where` is a JSON path or "line L, column C".
class ConfigError : public DomainError {
 public:
  ConfigError(std::string where, const std::string& what)
      : DomainError(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

struct Outputs {
  bool exact = true;
  bool asymptotic = true;
  bool montecarlo = false;
};

struct Scenario {
  relay::LinkSpec sd, sr, rd;
  std::vector<double> snr_db{20.0};
  double xi = 0.5;
  double rate = 1.0;
  std::optional<double> gamma_th;
  bool direct_only = false;
  modulation::Constellation constellation = modulation::RqamSpec(4, 2, 1.0);
  mcsim::SimConfig sim;
  Outputs outputs;

  relay::RelaySystem system_at(double snr_db) const;
};

/// Grid start, start+step, ... up to stop (inclusive, with a small slack).
std::vector<double> sweep_grid(double start_db, double stop_db, double step_db,
                               const std::string& path = "sweep");

nlohmann::json parse_text(const std::string& text);
nlohmann::json load_file(const std::string& path);

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);

/// Parses only the "system" block (links, snr, xi, threshold), at `path`.
Scenario system_from_json(const nlohmann::json& j, const std::string& path, Scenario base = {});

// Power-split batches.
//
// Either a plain scenario, or
// {"constellation": {...}, "system": {base}, "tolerance": 1e-6,
//  "cases": [{"label": "...", "system": {patch merged onto base}, "reference_xi": 0.6668}, ...]}

struct PowerCase {
  std::string label;
  Scenario scenario;
  std::optional<double> reference_xi;
};

struct PowerBatch {
  std::vector<PowerCase> cases;
  double tolerance = 1e-6;
};

struct PowerRow {
  PowerCase input;
  poweralloc::PowerSolution solution;
  std::optional<double> deviation;             // xi_opt - reference_xi
  std::vector<double> conflicting_references;  // other references listed for the same parameters
  std::vector<std::string> flags;              // "boundary", "deviation", "duplicate_conflict"
};

/// Rows flagged "deviation" miss their reference by more than this.
inline constexpr double kDeviationFlag = 5e-3;

PowerBatch power_batch_from_json(const nlohmann::json& j);
std::vector<PowerRow> solve_power_batch(const PowerBatch& batch, int workers = 1);
nlohmann::json power_rows_to_json(const std::vector<PowerRow>& rows);

}  // namespace relay_aser::config
