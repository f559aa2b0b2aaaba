#include "p2pmkt/core_geometry.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace p2pmkt {

HalfSpace::HalfSpace(Eigen::VectorXd normal_in, double offset_in,
                     ConstraintKind kind_in, std::string label_in)
    : normal(std::move(normal_in)),
      offset(offset_in),
      kind(kind_in),
      label(std::move(label_in)) {
  if (normal.size() == 0 || normal.squaredNorm() == 0.0)
    throw std::invalid_argument("HalfSpace: normal must be nonzero");
  if (!std::isfinite(offset))
    throw std::invalid_argument("HalfSpace: offset must be finite");
}

int agent_index(const AssignmentOutcome& outcome, const std::string& agent_id) {
  const auto& b = outcome.matrix.buyer_ids;
  const auto& s = outcome.matrix.seller_ids;
  for (std::size_t i = 0; i < b.size(); ++i)
    if (b[i] == agent_id) return static_cast<int>(i);
  for (std::size_t j = 0; j < s.size(); ++j)
    if (s[j] == agent_id) return static_cast<int>(b.size() + j);
  throw std::invalid_argument("unknown agent id '" + agent_id + "'");
}

std::vector<std::string> stacked_agent_ids(const AssignmentOutcome& outcome) {
  std::vector<std::string> ids = outcome.matrix.buyer_ids;
  ids.insert(ids.end(), outcome.matrix.seller_ids.begin(),
             outcome.matrix.seller_ids.end());
  return ids;
}

namespace {

HalfSpace singleton_constraint(int n, int idx, const std::string& id) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  e(idx) = 1.0;
  return {std::move(e), 0.0, ConstraintKind::inequality, "singleton:" + id};
}

HalfSpace pair_constraint(int n, int nb, int i, int j, double value,
                          const std::string& buyer, const std::string& seller) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  e(i) = 1.0;
  e(nb + j) = 1.0;
  return {std::move(e), value, ConstraintKind::inequality,
          "pair:" + buyer + ":" + seller};
}

HalfSpace efficiency_constraint(int n, double grand_value) {
  return {Eigen::VectorXd::Ones(n), grand_value, ConstraintKind::hyperplane,
          "efficiency"};
}

}  // namespace

BoundingSet bounding_set_for(const std::string& agent_id,
                             const AssignmentOutcome& outcome) {
  const int nb = static_cast<int>(outcome.matrix.buyer_ids.size());
  const int ns = static_cast<int>(outcome.matrix.seller_ids.size());
  const int n = nb + ns;
  const int idx = agent_index(outcome, agent_id);

  BoundingSet out;
  out.agent_id = agent_id;
  out.halfspaces.push_back(singleton_constraint(n, idx, agent_id));
  if (idx < nb) {
    for (int j = 0; j < ns; ++j)
      out.halfspaces.push_back(pair_constraint(
          n, nb, idx, j, outcome.matrix.values(idx, j), agent_id,
          outcome.matrix.seller_ids[static_cast<std::size_t>(j)]));
  } else {
    const int j = idx - nb;
    for (int i = 0; i < nb; ++i)
      out.halfspaces.push_back(pair_constraint(
          n, nb, i, j, outcome.matrix.values(i, j),
          outcome.matrix.buyer_ids[static_cast<std::size_t>(i)], agent_id));
  }
  out.halfspaces.push_back(efficiency_constraint(n, outcome.grand_value));
  return out;
}

CoreDescription core_constraints(const AssignmentOutcome& outcome) {
  const int nb = static_cast<int>(outcome.matrix.buyer_ids.size());
  const int ns = static_cast<int>(outcome.matrix.seller_ids.size());
  const int n = nb + ns;

  CoreDescription core;
  core.grand_value = outcome.grand_value;
  if (n == 0) return core;

  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < ns; ++j)
      core.constraints.push_back(pair_constraint(
          n, nb, i, j, outcome.matrix.values(i, j),
          outcome.matrix.buyer_ids[static_cast<std::size_t>(i)],
          outcome.matrix.seller_ids[static_cast<std::size_t>(j)]));
  const auto ids = stacked_agent_ids(outcome);
  for (int a = 0; a < n; ++a)
    core.constraints.push_back(
        singleton_constraint(n, a, ids[static_cast<std::size_t>(a)]));
  core.constraints.push_back(efficiency_constraint(n, outcome.grand_value));
  return core;
}

Eigen::VectorXd project_halfspace(const Eigen::VectorXd& x, const HalfSpace& h) {
  if (x.size() != h.normal.size())
    throw std::invalid_argument("project_halfspace: dimension mismatch");
  const double s = h.normal.dot(x);
  if (h.kind == ConstraintKind::inequality && s >= h.offset) return x;
  return x + ((h.offset - s) / h.normal.squaredNorm()) * h.normal;
}

Eigen::VectorXd overproject_halfspace(const Eigen::VectorXd& x,
                                      const HalfSpace& h) {
  return 2.0 * project_halfspace(x, h) - x;
}

Eigen::VectorXd paracontraction_step(const Eigen::VectorXd& x,
                                     const HalfSpace& h, double beta) {
  if (!(beta >= 0.0 && beta < 1.0))
    throw std::invalid_argument("paracontraction_step: beta must lie in [0, 1)");
  const Eigen::VectorXd p = project_halfspace(x, h);
  // (1 - beta) p + beta (2p - x)
  return (1.0 + beta) * p - beta * x;
}

MembershipResult core_membership(const Eigen::VectorXd& x,
                                 const CoreDescription& core, double tol) {
  if (tol < 0.0) throw std::invalid_argument("core_membership: tol must be >= 0");
  MembershipResult r;
  r.member = true;
  for (const auto& h : core.constraints) {
    if (h.normal.size() != x.size())
      throw std::invalid_argument("core_membership: dimension mismatch");
    const double s = h.normal.dot(x);
    const double violation = h.kind == ConstraintKind::hyperplane
                                 ? std::abs(s - h.offset)
                                 : std::max(0.0, h.offset - s);
    if (violation > r.worst_violation) {
      r.worst_violation = violation;
      r.worst_label = h.label;
    }
    if (violation > tol) r.member = false;
  }
  return r;
}

Eigen::VectorXd dykstra_project(const Eigen::VectorXd& x,
                                const std::vector<HalfSpace>& sets, double tol,
                                int max_sweeps) {
  if (sets.empty()) return x;

  Eigen::VectorXd y = x;
  std::vector<Eigen::VectorXd> corrections(
      sets.size(), Eigen::VectorXd::Zero(x.size()));

  double residual = 0.0;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    residual = 0.0;
    for (std::size_t c = 0; c < sets.size(); ++c) {
      const Eigen::VectorXd z = y + corrections[c];
      y = project_halfspace(z, sets[c]);
      Eigen::VectorXd next = z - y;
      residual += (next - corrections[c]).squaredNorm();
      corrections[c] = std::move(next);
    }
    residual = std::sqrt(residual);
    if (residual <= tol) {
      double worst = 0.0;
      for (const auto& h : sets) {
        const double s = h.normal.dot(y);
        worst = std::max(worst, h.kind == ConstraintKind::hyperplane
                                    ? std::abs(s - h.offset)
                                    : std::max(0.0, h.offset - s));
      }
      if (worst <= tol) return y;
    }
  }
  std::ostringstream os;
  os << "dykstra_project: no convergence after " << max_sweeps
     << " sweeps (residual " << residual << ", tol " << tol << ")";
  throw std::runtime_error(os.str());
}

Eigen::VectorXd project_core(const Eigen::VectorXd& x,
                             const CoreDescription& core, double tol,
                             int max_sweeps) {
  return dykstra_project(x, core.constraints, tol, max_sweeps);
}

}  // namespace p2pmkt
