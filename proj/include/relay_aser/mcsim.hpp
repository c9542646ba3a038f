#pragma once

// Monte Carlo estimates of the relay ASER: semi-analytic (sampled SNRs
// averaged through the conditional SER) and symbol level (complex fading,
// AWGN, threshold decode at the relay, MRC, minimum-distance detection).

#include <cstdint>
#include <string>

#include "relay_aser/modulation.hpp"

namespace relay_aser::mcsim {

enum class Mode { SemiAnalytic, SymbolLevel };

struct SimConfig {
  std::uint64_t master_seed = 1;
  std::int64_t n_trials = 100000;
  Mode mode = Mode::SemiAnalytic;
  int workers = 1;
  channel::SamplerMode sampler = channel::SamplerMode::Auto;

  void validate() const;
};

struct SimResult {
  double aser_hat = 0.0;
  double std_error = 0.0;
  double n_errors = 0.0;  // error count, or summed conditional SER in semi-analytic mode
  std::int64_t n_trials = 0;
  std::int64_t n_outage = 0;  // trials with gamma_sr <= gamma_th
  double elapsed = 0.0;       // seconds
};

Mode mode_from_string(const std::string& s);
std::string to_string(Mode m);

SimResult simulate(const relay::RelaySystem& sys, const modulation::Constellation& c, const SimConfig& cfg);
SimResult simulate_semi_analytic(const relay::RelaySystem& sys, const modulation::Constellation& c,
                                 const SimConfig& cfg);
SimResult simulate_symbol_level(const relay::RelaySystem& sys, const modulation::Constellation& c,
                                const SimConfig& cfg);

/// Symbol error rate over AWGN alone at a fixed SNR.
SimResult simulate_awgn(const modulation::Constellation& c, double gamma, const SimConfig& cfg);

}  // namespace relay_aser::mcsim
