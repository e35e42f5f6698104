#include "beamfe/assembly.hpp"

#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

namespace beamfe {

namespace {

using Triplet = Eigen::Triplet<double>;

struct LocalBlock {
  std::vector<int> dofs;
  Eigen::VectorXd r;
  Eigen::MatrixXd k;
  double energy = 0.0;
};

void scatter(const LocalBlock& b, Eigen::VectorXd& r, std::vector<Triplet>* trip) {
  const int n = static_cast<int>(b.dofs.size());
  for (int i = 0; i < n; ++i) r(b.dofs[i]) += b.r(i);
  if (!trip || b.k.size() == 0) return;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (b.k(i, j) != 0.0) trip->emplace_back(b.dofs[i], b.dofs[j], b.k(i, j));
    }
}

std::vector<int> pair_dofs(const Model& m, int e1, int e2) {
  const auto a = m.centerline_raw_dofs(e1);
  const auto b = m.centerline_raw_dofs(e2);
  std::vector<int> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

LocalBlock from_pair(const Model& m, const PairContribution& p) {
  return {pair_dofs(m, p.slave, p.master), p.residual, p.stiffness, p.energy};
}

// One unit of contact work: a point pair or a slave element with the masters of one fiber.
struct ContactTask {
  int slave = 0;
  std::vector<int> masters;
  bool point = false;
};

struct ContactTaskResult {
  std::vector<PairContribution> pairs;
  int active_points = 0;
  int active_line_points = 0;
};

ContactTaskResult run_contact_task(const ContactTask& task, const std::vector<ContactElement>& ces,
                                   const ContactSettings& set, bool with_stiffness) {
  ContactTaskResult out;
  const ContactElement& s = ces[task.slave];
  if (task.point) {
    const ContactElement& m = ces[task.masters.front()];
    const ClosestPointResult cp = closest_point_bilateral(s.curve, m.curve);
    if (!cp.ok()) return out;
    PairContribution pc = set.formulation == ContactFormulation::AllAngle
                              ? abc_point_contribution(s, m, cp, set, with_stiffness)
                              : point_contact_contribution(s, m, cp, set.point_law, with_stiffness);
    if (pc.active_points == 0) return out;
    out.active_points += pc.active_points;
    out.pairs.push_back(std::move(pc));
    return out;
  }
  std::vector<const ContactElement*> masters;
  for (int j : task.masters) masters.push_back(&ces[j]);
  const auto records = line_contact_records(s, masters, set, set.line_law.activation_gap());
  if (records.empty()) return out;
  for (const ContactElement* m : masters) {
    PairContribution pc = set.formulation == ContactFormulation::AllAngle
                              ? abc_line_contribution(s, *m, records, set, with_stiffness)
                              : line_contact_contribution(s, *m, records, set.line_law, with_stiffness);
    if (pc.active_line_points == 0) continue;
    out.active_line_points += pc.active_line_points;
    out.pairs.push_back(std::move(pc));
  }
  return out;
}

}  // namespace

void parallel_for(int n, int threads, const std::function<void(int)>& f) {
  if (threads <= 1 || n < 2) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const int nt = std::min(threads, n);
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::vector<ContactElement> contact_elements(const Model& model, const ModelState& state) {
  std::vector<ContactElement> out(model.n_elements());
  for (int e = 0; e < model.n_elements(); ++e) {
    const ElementTopology& t = model.topology(e);
    ContactElement& c = out[e];
    c.id = e;
    c.fiber = t.fiber;
    c.index_in_fiber = t.index_in_fiber;
    c.reference = &model.reference(e);
    c.curve = {model.centerline(e, state).to_vector(), c.reference->length()};
    c.radius = model.radius(e);
  }
  return out;
}

AssemblyOutput assemble(const Model& model, const ModelState& state, double t, const ContactModel& contact,
                        const AssemblyOptions& opt) {
  const int n = model.n_raw();
  AssemblyOutput out;
  out.residual = Eigen::VectorXd::Zero(n);
  out.contact_residual = Eigen::VectorXd::Zero(n);
  std::vector<Triplet> trip;
  std::vector<Triplet>* tp = opt.stiffness ? &trip : nullptr;

  // Elements.
  const int ne = model.n_elements();
  std::vector<LocalBlock> blocks(ne);
  const bool sr = model.type() == ElementType::SimoReissner;
  parallel_for(ne, opt.threads, [&](int e) {
    LocalBlock& b = blocks[e];
    b.dofs = model.element_raw_dofs(e);
    if (sr) {
      const SRElementDofs d = model.sr_dofs(e, state);
      Vector21 r;
      Matrix21 k;
      model.sr(e).evaluate_internal(d, &r, opt.stiffness ? &k : nullptr);
      b.r = r;
      if (opt.stiffness) b.k = k;
      if (opt.energy) b.energy = model.sr(e).strain_energy(d);
    } else {
      const ElementCenterlineDofs d = model.centerline(e, state);
      Vector12<double> r;
      Matrix12 k;
      model.tf(e).evaluate_internal(d, &r, opt.stiffness ? &k : nullptr);
      b.r = r;
      if (opt.stiffness) b.k = k;
      if (opt.energy) b.energy = model.tf(e).strain_energy(d);
    }
  });
  for (const LocalBlock& b : blocks) {
    scatter(b, out.residual, tp);
    out.internal_energy += b.energy;
  }

  // External loads.
  const ModelState ref = model.reference_state();
  for (const NodalLoad& load : model.loads()) {
    const double s = load.scale(t);
    const NodeDofs& nd = model.nodes()[load.node];
    out.residual.segment<3>(nd.centerline) -= s * load.force;
    if (load.moment.squaredNorm() == 0.0) continue;
    if (sr) {
      out.residual.segment<3>(nd.rotation) -= s * load.moment;
    } else {
      check_perpendicular_moment(ref.q.segment<3>(nd.centerline + 3), load.moment);
      const Eigen::Vector3d tan = state.q.segment<3>(nd.centerline + 3);
      out.residual.segment<3>(nd.centerline + 3) -= nodal_moment_load(tan, s * load.moment);
      if (tp) {
        const Eigen::Matrix3d d = nodal_moment_load_derivative(tan, s * load.moment);
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) tp->emplace_back(nd.centerline + 3 + i, nd.centerline + 3 + j, -d(i, j));
      }
    }
  }

  if (contact.enabled) {
    const ContactSettings& set = contact.settings;
    const std::vector<ContactElement> ces = contact_elements(model, state);
    // Regularized laws act before the surfaces touch, so the search has to reach that far.
    const double reach = std::max(set.point_law.activation_gap(), set.line_law.activation_gap());
    const auto pairs = broadphase_search(ces, set.search_margin + reach);
    out.contact.candidate_pairs = static_cast<int>(pairs.size());

    std::vector<ContactTask> tasks;
    if (set.formulation != ContactFormulation::Line) {
      for (const auto& [i, j] : pairs) tasks.push_back({i, {j}, true});
    }
    if (set.formulation != ContactFormulation::Point) {
      // Masters of each slave grouped by fiber; the map keeps the order deterministic.
      std::map<std::pair<int, int>, std::vector<int>> groups;
      for (const auto& [i, j] : pairs) groups[{i, ces[j].fiber}].push_back(j);
      for (auto& [key, masters] : groups) tasks.push_back({key.first, masters, false});
    }
    std::vector<ContactTaskResult> results(tasks.size());
    parallel_for(static_cast<int>(tasks.size()), opt.threads,
                 [&](int k) { results[k] = run_contact_task(tasks[k], ces, set, opt.stiffness); });
    for (const ContactTaskResult& res : results) {
      out.contact.active_points += res.active_points;
      out.contact.active_line_points += res.active_line_points;
      for (const PairContribution& pc : res.pairs) {
        const LocalBlock b = from_pair(model, pc);
        scatter(b, out.residual, tp);
        for (int i = 0; i < 24; ++i) out.contact_residual(b.dofs[i]) += b.r(i);
        out.contact_energy += pc.energy;
      }
    }

    // Rigid primitives.
    for (int e = 0; e < ne; ++e) {
      auto add_rigid = [&](const RigidContribution& rc) {
        if (rc.active_points == 0) return;
        const auto d = model.centerline_raw_dofs(e);
        const LocalBlock b{{d.begin(), d.end()}, rc.residual, rc.stiffness, rc.energy};
        scatter(b, out.residual, tp);
        out.contact_energy += rc.energy;
        out.contact.rigid_points += rc.active_points;
      };
      for (const RigidSphere& s : contact.spheres) add_rigid(rigid_primitive_contact(ces[e], s, set, opt.stiffness));
      for (const RigidCylinder& c : contact.cylinders)
        add_rigid(rigid_primitive_contact(ces[e], c, set, opt.stiffness));
    }
  }

  if (opt.stiffness) {
    out.stiffness.resize(n, n);
    out.stiffness.setFromTriplets(trip.begin(), trip.end());
  }
  return out;
}

SparseMatrix assemble_mass(const Model& model) {
  std::vector<Triplet> trip;
  for (int e = 0; e < model.n_elements(); ++e) {
    const auto d = model.centerline_raw_dofs(e);
    const Matrix12 m = model.type() == ElementType::SimoReissner ? Matrix12(model.sr(e).translational_mass())
                                                                 : model.tf(e).mass_matrix();
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) {
        if (m(i, j) != 0.0) trip.emplace_back(d[i], d[j], m(i, j));
      }
  }
  SparseMatrix out(model.n_raw(), model.n_raw());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

}  // namespace beamfe
