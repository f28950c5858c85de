#pragma once

#include <iosfwd>

#include "wonham/config.hpp"

namespace wonham {

/*
 * Executes the experiment selected by cfg.experiment and writes its
 * artifacts into cfg.outputs: estimates.csv, bounds.csv, verdicts.csv and
 * meta.txt for every run, plus per-experiment extras (chain / observation /
 * trajectory dumps for simulate).  Replications run on up to `threads`
 * workers; each replication draws from its own keyed stream and results
 * are reduced in replication order, so the bytes written are independent
 * of the thread count.
 *
 * Throws Error on failure; see run_experiment_guarded for the exit-code
 * mapping.
 */
void run_experiment(const ExperimentConfig& cfg, int threads);

// catches, reports to err, and maps: 0 success, 2 non-ergodic generator,
// 1 any other failure.  A FAIL row in verdicts.csv is data, not an error.
int run_experiment_guarded(const ExperimentConfig& cfg, int threads,
                           std::ostream& err);

}  // namespace wonham
