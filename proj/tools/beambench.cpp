// beambench: command line front end for the benchmark scenarios.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "beamfe/diagnostics.hpp"
#include "beamfe/errors.hpp"
#include "beamfe/runner.hpp"

using namespace beamfe;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_run(const std::string& path, const RunOptions& opt) {
  const ScenarioConfig config = load_config(path);
  const auto t0 = std::chrono::steady_clock::now();
  const RunResult r = run_scenario(config, opt);
  const ResultRecord& last = r.records.back();
  std::printf("scenario %s (%s): %zu steps to t=%s, %d accumulated Newton iterations, %.1f s\n", config.name.c_str(),
              geometry_kind(config.geometry).c_str(), r.records.size() - 1, format_double(last.time).c_str(),
              r.accumulated_iterations, seconds_since(t0));
  std::printf("final energy total=%s, reaction force=(%s, %s, %s), moment=(%s, %s, %s)\n",
              format_double(last.total_energy).c_str(), format_double(last.reaction_force.x()).c_str(),
              format_double(last.reaction_force.y()).c_str(), format_double(last.reaction_force.z()).c_str(),
              format_double(last.reaction_moment.x()).c_str(), format_double(last.reaction_moment.y()).c_str(),
              format_double(last.reaction_moment.z()).c_str());
  if (!opt.out_dir.empty()) std::printf("results written to %s\n", opt.out_dir.c_str());
  return 0;
}

int cmd_convergence(const std::string& path, const std::vector<int>& levels, const RunOptions& opt) {
  const ScenarioConfig config = load_config(path);
  const auto t0 = std::chrono::steady_clock::now();
  const auto study = convergence_study(config, levels, opt);
  const auto orders = observed_orders(study);
  std::printf("%10s %8s %24s %8s\n", "elements", "dofs", "l2_error", "order");
  for (std::size_t i = 0; i < study.size(); ++i) {
    std::printf("%10d %8d %24s %8s\n", study[i].n_elements, study[i].n_dofs,
                format_double(study[i].l2_error).c_str(), i == 0 ? "-" : format_double(orders[i - 1]).substr(0, 6).c_str());
  }
  std::printf("reference: %d elements, %.1f s total\n", config.output.reference_elements, seconds_since(t0));
  return 0;
}

int cmd_validate(const std::string& path, const RunOptions& opt) {
  const ScenarioConfig config = load_config(path);
  const Scenario sc = build_scenario(config);
  std::printf("configuration %s is valid: %s, %s elements, %d elements, %d raw dofs\n", config.name.c_str(),
              geometry_kind(config.geometry).c_str(),
              config.element == ElementType::SimoReissner ? "simo_reissner" : "torsion_free", sc.model.n_elements(),
              sc.model.n_raw());
  if (sc.model.n_raw() > 1500) {
    std::printf("tangent check skipped (model too large for a dense finite difference check)\n");
    return 0;
  }
  // Randomized consistency check of the assembled tangent around the reference state.
  std::mt19937_64 rng(opt.seed);
  const double amplitude = 0.1 * sc.model.min_radius();
  const double h = 1e-6 * sc.model.min_radius();
  bool ok = true;
  for (int k = 0; k < 3; ++k) {
    ModelState s = sc.model.reference_state();
    perturb_state(sc.model, s, amplitude, rng);
    const double err = assembly_fd_error(sc.model, s, sc.contact, 0.5 * sc.t_end, h, opt.threads);
    std::printf("tangent check %d (seed %llu): relative error %.3e\n", k, static_cast<unsigned long long>(opt.seed),
                err);
    ok = ok && err < 1e-5;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"beambench: beam finite element benchmark scenarios"};
  app.require_subcommand(1);
  RunOptions opt;
  app.add_option("--out-dir", opt.out_dir, "Output directory (created if missing)");
  app.add_option("--seed", opt.seed, "Seed of randomized checks");
  app.add_option("--threads", opt.threads, "Worker threads for element and contact evaluation")
      ->check(CLI::PositiveNumber);

  std::string config_path;
  std::vector<int> levels;
  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("config", config_path, "Scenario configuration (JSON)")->required()->check(CLI::ExistingFile);
  run->fallthrough();
  auto* conv = app.add_subcommand("convergence", "Mesh convergence study against a fine reference");
  conv->add_option("config", config_path, "Scenario configuration (JSON)")->required()->check(CLI::ExistingFile);
  conv->add_option("--levels", levels, "Element counts")->required()->expected(1, -1);
  conv->fallthrough();
  auto* val = app.add_subcommand("validate", "Validate a configuration and check the assembled tangent");
  val->add_option("config", config_path, "Scenario configuration (JSON)")->required()->check(CLI::ExistingFile);
  val->fallthrough();

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(config_path, opt);
    if (conv->parsed()) return cmd_convergence(config_path, levels, opt);
    if (val->parsed()) return cmd_validate(config_path, opt);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
