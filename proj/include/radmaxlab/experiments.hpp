#pragma once

#include <string>
#include <vector>

#include "radmaxlab/report.hpp"

namespace radmaxlab::harness {

Report run_kato(const ExperimentConfig& cfg);
Report run_rmf(const ExperimentConfig& cfg);
Report run_counterexample(const ExperimentConfig& cfg);
Report run_carleson(const ExperimentConfig& cfg);
Report run_paraproduct(const ExperimentConfig& cfg);
Report run_unperturbed_checks(const ExperimentConfig& cfg);
Report run_quadratic(const ExperimentConfig& cfg);
Report run_rbound(const ExperimentConfig& cfg);

/// Subcommand names, in CLI order (selftest included).
const std::vector<std::string>& experiment_names();
/// Dispatches on cfg.experiment; unknown names throw ConfigError.
Report run_experiment(const ExperimentConfig& cfg);

}  // namespace radmaxlab::harness
