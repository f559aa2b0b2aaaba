// Linear-constraint description of stable payoffs: per-agent bounding
// sets, the market core polytope, closed-form half-space projection and
// its relaxations, and Dykstra's method for projecting onto the core.
//
// Payoff vectors live in R^N with buyers first (matrix row order) followed
// by sellers (column order).
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "p2pmkt/matching.hpp"

namespace p2pmkt {

enum class ConstraintKind {
  inequality,  // normal . x >= offset
  hyperplane   // normal . x == offset
};

struct HalfSpace {
  HalfSpace(Eigen::VectorXd normal_in, double offset_in, ConstraintKind kind_in,
            std::string label_in = "");

  Eigen::VectorXd normal;  // nonzero, enforced at construction
  double offset = 0.0;
  ConstraintKind kind = ConstraintKind::inequality;
  std::string label;  // "pair:B1:S2", "singleton:B1", "efficiency"
};

// Everything one agent demands of a payoff vector: its own nonnegativity,
// one inequality per partner pair, and the efficiency hyperplane. This is
// the only game information the agent needs during negotiation.
struct BoundingSet {
  std::string agent_id;
  std::vector<HalfSpace> halfspaces;
};

// The set of stable payoff allocations: all pair inequalities, all
// singleton nonnegativity inequalities, and the efficiency hyperplane.
// Equals the intersection of every agent's bounding set; never empty for
// a bilateral matching market.
struct CoreDescription {
  std::vector<HalfSpace> constraints;
  double grand_value = 0.0;
};

struct MembershipResult {
  bool member = false;
  double worst_violation = 0.0;
  std::string worst_label;
};

// Stacked coordinate of an agent: buyers 0..NB-1, sellers NB..N-1.
// Throws for unknown ids.
int agent_index(const AssignmentOutcome& outcome, const std::string& agent_id);

std::vector<std::string> stacked_agent_ids(const AssignmentOutcome& outcome);

// Constraint list for one agent, in its negotiation visiting order:
// singleton, pair constraints by partner index, efficiency hyperplane.
BoundingSet bounding_set_for(const std::string& agent_id,
                             const AssignmentOutcome& outcome);

CoreDescription core_constraints(const AssignmentOutcome& outcome);

// Closed-form Euclidean projection; identity on satisfied inequalities.
Eigen::VectorXd project_halfspace(const Eigen::VectorXd& x, const HalfSpace& h);

// Reflection through the constraint: 2 proj(x) - x.
Eigen::VectorXd overproject_halfspace(const Eigen::VectorXd& x,
                                      const HalfSpace& h);

// (1 - beta) proj + beta overproj, beta in [0, 1). The fixed-point set is
// exactly the constraint set; beta = 0 is the plain projection.
Eigen::VectorXd paracontraction_step(const Eigen::VectorXd& x,
                                     const HalfSpace& h, double beta);

MembershipResult core_membership(const Eigen::VectorXd& x,
                                 const CoreDescription& core, double tol);

// Dykstra's alternating projections onto an intersection of constraints.
// Stops when the correction residual and the worst violation both fall
// below tol; throws std::runtime_error (reporting the residual) if the
// sweep cap is reached first.
Eigen::VectorXd dykstra_project(const Eigen::VectorXd& x,
                                const std::vector<HalfSpace>& sets, double tol,
                                int max_sweeps);

// Euclidean projection onto the core (defaults per the library's
// documented Dykstra settings: 10000 sweeps, 1e-10 residual).
Eigen::VectorXd project_core(const Eigen::VectorXd& x,
                             const CoreDescription& core, double tol = 1e-10,
                             int max_sweeps = 10000);

}  // namespace p2pmkt
