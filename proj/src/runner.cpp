#include "beamfe/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "beamfe/errors.hpp"
#include "json.hpp"

namespace beamfe {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

void prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

ResultRecord make_record(const Simulation& sim, const Scenario& sc, int step, int iterations) {
  ResultRecord r;
  r.step = step;
  r.time = sim.time();
  r.n_dofs = sim.dofs().n_free();
  const Energies e = sim.energies();
  r.kinetic_energy = e.kinetic;
  r.internal_energy = e.internal;
  r.contact_energy = e.contact;
  r.total_energy = e.total;
  r.reaction_force = sim.reaction_force(sc.reaction_nodes);
  r.reaction_moment = sim.reaction_moment(sc.reaction_nodes, sc.moment_point);
  r.newton_iterations = iterations;
  r.accumulated_iterations = sim.accumulated_iterations();
  const ContactStatistics& c = sim.last_output().contact;
  r.active_contact_points = c.active_points;
  r.active_line_points = c.active_line_points;
  r.rigid_contact_points = c.rigid_points;
  r.candidate_pairs = c.candidate_pairs;
  return r;
}

}  // namespace

std::string run_metadata(const ScenarioConfig& config, const Scenario& scenario, const RunOptions& options,
                         const std::string& command) {
  json meta;
  meta["command"] = command;
  meta["config"] = json::parse(serialize_config(config));
  json params = json::object();
  for (const auto& [name, value] : scenario.parameters) params[name] = value;
  meta["parameters"] = params;
  meta["seed"] = options.seed;
  meta["threads"] = options.threads;
  meta["n_raw_dofs"] = scenario.model.n_raw();
  meta["n_elements"] = scenario.model.n_elements();
  return meta.dump(2) + "\n";
}

RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  Scenario sc = build_scenario(config);
  const bool write = !options.out_dir.empty();
  std::ofstream geometry;
  if (write) {
    prepare_dir(options.out_dir);
    write_text(fs::path(options.out_dir) / "metadata.json", run_metadata(config, sc, options, "run"));
    if (config.output.geometry) {
      geometry.open(fs::path(options.out_dir) / "geometry.txt", std::ios::binary);
      if (!geometry) throw IoError("cannot write geometry dump in " + options.out_dir);
    }
  }

  Simulation sim(sc.model, sc.contact, sc.solver, sc.dynamics, options.threads);
  if (sc.dynamics.enabled) sim.initialize_dynamics();
  if (sc.initial_equilibrium && !sc.dynamics.enabled) {
    const NewtonResult pre = sim.step(0.0);
    if (!pre.converged) throw NonConvergence("initial equilibrium: " + pre.failure, pre.iterations);
  }
  RunResult result;
  result.n_dofs = sim.dofs().n_free();
  result.records.push_back(make_record(sim, sc, 0, 0));
  if (options.on_record) options.on_record(result.records.back());
  if (options.on_state) options.on_state(sim);
  if (geometry.is_open()) write_geometry_frame(geometry, sample_geometry(sim.model(), sim.state(), sim.time()));

  int step = 0;
  bool last_written = true;
  result.trace = sim.run(sc.t_end, [&](const Simulation& s, int iterations) {
    ++step;
    result.records.push_back(make_record(s, sc, step, iterations));
    if (options.on_record) options.on_record(result.records.back());
    if (options.on_state) options.on_state(s);
    last_written = false;
    if (geometry.is_open() && step % config.output.geometry_every == 0) {
      write_geometry_frame(geometry, sample_geometry(s.model(), s.state(), s.time()));
      last_written = true;
    }
  });
  if (geometry.is_open() && !last_written) {
    write_geometry_frame(geometry, sample_geometry(sim.model(), sim.state(), sim.time()));
  }
  result.accumulated_iterations = sim.accumulated_iterations();
  result.curve = fiber_curve(sim.model(), sim.state(), 0);
  result.final_geometry = sample_geometry(sim.model(), sim.state(), sim.time());
  if (write && config.output.csv) write_csv((fs::path(options.out_dir) / "results.csv").string(), result.records);
  return result;
}

std::vector<ConvergenceLevel> convergence_study(const ScenarioConfig& config, const std::vector<int>& levels,
                                                const RunOptions& options) {
  RunOptions quiet = options;
  quiet.out_dir.clear();
  quiet.on_record = {};
  quiet.on_state = {};
  const RunResult reference = run_scenario(with_elements(config, config.output.reference_elements), quiet);
  std::vector<ConvergenceLevel> out;
  for (int n : levels) {
    const RunResult r = run_scenario(with_elements(config, n), quiet);
    out.push_back({n, r.n_dofs, l2_error(r.curve, reference.curve), r.accumulated_iterations});
  }
  if (!options.out_dir.empty()) {
    prepare_dir(options.out_dir);
    const Scenario sc = build_scenario(config);
    json meta = json::parse(run_metadata(config, sc, options, "convergence"));
    meta["levels"] = levels;
    meta["reference_elements"] = config.output.reference_elements;
    meta["reference_accumulated_iterations"] = reference.accumulated_iterations;
    write_text(fs::path(options.out_dir) / "metadata.json", meta.dump(2) + "\n");
    write_convergence_csv((fs::path(options.out_dir) / "convergence.csv").string(), out);
  }
  return out;
}

std::vector<double> observed_orders(const std::vector<ConvergenceLevel>& levels) {
  std::vector<double> orders;
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    orders.push_back(std::log(levels[i].l2_error / levels[i + 1].l2_error) /
                     std::log(static_cast<double>(levels[i + 1].n_elements) / levels[i].n_elements));
  }
  return orders;
}

void write_convergence_csv(const std::string& path, const std::vector<ConvergenceLevel>& levels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "n_elements,n_dofs,l2_error,observed_order,accumulated_iterations\n";
  const std::vector<double> orders = observed_orders(levels);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    out << levels[i].n_elements << ',' << levels[i].n_dofs << ',' << format_double(levels[i].l2_error) << ','
        << (i == 0 ? std::string("nan") : format_double(orders[i - 1])) << ',' << levels[i].accumulated_iterations
        << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace beamfe
