// Distributed price negotiation: agents hold payoff proposals, average
// them over a time-varying bipartite communication graph, and apply one
// relaxed projection onto a scheduled half-space of their bounding set per
// round. The stacked iteration contracts towards consensus on a point of
// the core.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "p2pmkt/core_geometry.hpp"

namespace p2pmkt {

struct EdgesPolicy {
  // probability of activating each non-backbone buyer-seller link in a
  // round, on top of the rotating matching that guarantees coverage
  double extra_edge_prob = 0.0;
};

// Finite family of symmetric doubly stochastic mixing matrices, activated
// cyclically (iteration k uses family[k % size]). Off-diagonal weight only
// on buyer-seller links; every pair link is active somewhere in the family,
// so the union over any window of q_window iterations is connected.
struct AdjacencySchedule {
  std::vector<Eigen::MatrixXd> family;
  int n_buyers = 0;
  int n_sellers = 0;
  int q_window = 0;    // window length that touches every matrix
  double gamma = 0.0;  // lower bound on positive entries
  const Eigen::MatrixXd& at(long k) const {
    return family[static_cast<std::size_t>(k) % family.size()];
  }
};

// Empty when the schedule satisfies all invariants (stochasticity, positive
// diagonals, bipartite sparsity, connected union within the window).
std::vector<std::string> validate_schedule(const AdjacencySchedule& s);

// One rotating partial matching per round plus seeded extra links, weighted
// Metropolis-style: w_ij = 1/(1 + max(deg_i, deg_j)), diagonal absorbs the
// remainder. q_window = 0 derives the minimal feasible window; a positive
// q_window smaller than that throws.
AdjacencySchedule build_schedule(int n_buyers, int n_sellers,
                                 const EdgesPolicy& policy, int q_window,
                                 std::uint64_t seed);

enum class CycleOrder { round_robin, shuffled };

// Per-agent cyclic visiting order over its bounding half-spaces, plus the
// relaxation parameter shared by all agents. Each constraint of each agent
// appears exactly once per cycle, so any window of q_window iterations
// covers every constraint.
struct OperatorSchedule {
  std::vector<BoundingSet> bounding_sets;  // one per agent, stacked order
  std::vector<std::vector<int>> cycles;    // indices into each bounding set
  double beta = 0.0;
  int q_window = 0;

  const HalfSpace& active(int agent, long k) const {
    const auto& cycle = cycles[static_cast<std::size_t>(agent)];
    return bounding_sets[static_cast<std::size_t>(agent)]
        .halfspaces[static_cast<std::size_t>(
            cycle[static_cast<std::size_t>(k) % cycle.size()])];
  }
};

OperatorSchedule build_operator_schedule(const AssignmentOutcome& outcome,
                                         double beta, CycleOrder order,
                                         std::uint64_t seed);

struct NegotiationState {
  Eigen::MatrixXd proposals;  // row i = agent i's proposed payoff vector
  long iteration = 0;
};

struct TraceRow {
  long k = 0;
  double consensus_spread = 0.0;  // max_i |x_i - mean|
  double core_dist_mean = 0.0;    // dist(mean, core); NaN when not sampled
  double dist = 0.0;              // dist(stacked state, target set)
  double dist_ratio = 0.0;        // dist / dist at k = 0
  double max_violation = 0.0;     // worst bounding violation of the mean
  std::int64_t step_wall_ns = 0;  // duration of the step that produced k
};

struct NegotiationTrace {
  std::vector<TraceRow> rows;
  double initial_distance = 0.0;
};

enum class InitMode { selfish, zeros, random };
enum class RunStatus { converged, max_iterations };

struct RunConfig {
  double tol = 1e-6;  // consensus spread and bounding violation threshold
  long max_iters = 0;  // 0 = 5000 * q_window
  InitMode init = InitMode::selfish;
  std::uint64_t init_seed = 0;  // used by InitMode::random
  bool record_trace = true;
  int dist_every = 1;       // sample distance columns every n rows; 0 = never
  double dist_tol = 1e-10;  // Dykstra tolerance for distance evaluations
  // benchmark variant: project onto the whole bounding set each round
  // instead of a single scheduled half-space
  bool project_full_set = false;
};

struct RunResult {
  Eigen::VectorXd payoff;  // mean proposal at termination
  NegotiationState final_state;
  NegotiationTrace trace;
  RunStatus status = RunStatus::max_iterations;
  long iterations = 0;
  int q_window = 0;  // effective window (graph and operator schedules)
  double final_spread = 0.0;
  double final_violation = 0.0;
};

// One synchronous round: every agent averages the proposals of its current
// neighbours (only entries with positive weight are read) and applies its
// scheduled operator. The iteration counter selects each agent's active
// half-space.
NegotiationState step(const NegotiationState& state, const Eigen::MatrixXd& W,
                      const OperatorSchedule& ops);

double consensus_spread(const Eigen::MatrixXd& proposals);

// Distance from the stacked state to the target set (consensus on a core
// point): dist^2 = sum_i |x_i - mean|^2 + N dist(mean, core)^2.
double distance_to_target(const Eigen::MatrixXd& proposals,
                          const CoreDescription& core, double dist_tol = 1e-10);

// Iterates until the consensus spread and the worst bounding violation of
// the mean proposal are both <= cfg.tol, or until the iteration cap; the
// result always carries the final residuals.
RunResult run(const AssignmentOutcome& outcome,
              const AdjacencySchedule& schedule, const OperatorSchedule& ops,
              const RunConfig& cfg);

}  // namespace p2pmkt
