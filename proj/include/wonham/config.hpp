#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wonham/model.hpp"

namespace wonham {

/*
 * Experiment description parsed from the flat key=value config format.
 *
 * Defaults that depend on the model (stationary initial law, automatic
 * burn-in) are resolved by the runner, not the parser, so that a bad
 * generator surfaces as a NonErgodic runtime error rather than a parse
 * error.  burn_in < 0 means "derive from the generator's relaxation
 * rate".
 */
struct ExperimentConfig {
  ModelSpec spec;                   // nu left empty when defaulted
  Eigen::VectorXd nu_bar;           // alternate initial law (uniform default)
  double dt = 0.0;
  double horizon = 0.0;
  double burn_in = -1.0;
  int replications = 1;
  std::uint64_t master_seed = 0;
  std::string experiment;           // empty until a subcommand selects one
  std::vector<double> sigma_sweep;  // used by snr-sweep only
  std::string outputs;              // filled from the command line
  bool nu_defaulted = true;
  bool nu_bar_defaulted = true;
  bool burn_in_defaulted = true;
};

// Parses the key=value format.  Keys: d, lambda.i.j (1-based, off-diagonal
// only), h.i, sigma, nu.i, nu_bar.i, dt, horizon, burn_in, replications,
// seed, experiment, sigma_sweep.  '#' starts a comment.  Throws
// ConfigError with a "line N:" prefix on any malformed or missing input.
ExperimentConfig parse_config(const std::string& text);

bool is_known_experiment(const std::string& tag);

}  // namespace wonham
