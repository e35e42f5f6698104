#pragma once

// Scenario runs and mesh-convergence studies with file output:
//   <out_dir>/results.csv, geometry.txt, metadata.json      (run)
//   <out_dir>/convergence.csv, metadata.json                (convergence)

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "beamfe/generators.hpp"
#include "beamfe/results.hpp"
#include "beamfe/scenario.hpp"
#include "beamfe/simulation.hpp"

namespace beamfe {

struct RunOptions {
  /// Empty: nothing is written.
  std::string out_dir;
  int threads = 1;
  std::uint64_t seed = 0;
  /// Called after every accepted step with the new record.
  std::function<void(const ResultRecord&)> on_record;
  /// Called with the simulation after the initial state and every accepted step.
  std::function<void(const Simulation&)> on_state;
};

struct RunResult {
  std::vector<ResultRecord> records;
  AdaptiveTrace trace;
  int accumulated_iterations = 0;
  int n_dofs = 0;
  CenterlineCurve curve;  // first fiber at the end of the run
  GeometryFrame final_geometry;
};

RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

struct ConvergenceLevel {
  int n_elements = 0;
  int n_dofs = 0;
  double l2_error = 0.0;
  int accumulated_iterations = 0;
};

/// Runs every level and a reference with config.output.reference_elements
/// elements; errors are measured at the end of the run.
std::vector<ConvergenceLevel> convergence_study(const ScenarioConfig& config, const std::vector<int>& levels,
                                                const RunOptions& options = {});

/// Observed orders log2(e_i / e_{i+1}) / log2(n_{i+1} / n_i) between successive levels.
std::vector<double> observed_orders(const std::vector<ConvergenceLevel>& levels);

void write_convergence_csv(const std::string& path, const std::vector<ConvergenceLevel>& levels);

/// Metadata document (JSON text) with the configuration and the echoed physical parameters.
std::string run_metadata(const ScenarioConfig& config, const Scenario& scenario, const RunOptions& options,
                         const std::string& command);

}  // namespace beamfe
