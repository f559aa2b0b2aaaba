#include "p2pmkt/negotiation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "p2pmkt/rng.hpp"

namespace p2pmkt {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

Eigen::MatrixXd metropolis_matrix(int n_buyers, int n_sellers,
                                  const std::vector<std::pair<int, int>>& edges) {
  const int n = n_buyers + n_sellers;
  std::vector<int> degree(static_cast<std::size_t>(n), 0);
  for (auto [b, s] : edges) {
    ++degree[static_cast<std::size_t>(b)];
    ++degree[static_cast<std::size_t>(n_buyers + s)];
  }
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (auto [b, s] : edges) {
    const int u = b, v = n_buyers + s;
    const double weight =
        1.0 / (1.0 + std::max(degree[static_cast<std::size_t>(u)],
                              degree[static_cast<std::size_t>(v)]));
    w(u, v) = weight;
    w(v, u) = weight;
  }
  for (int i = 0; i < n; ++i) w(i, i) = 1.0 - w.row(i).sum();
  return w;
}

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  }
  void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

}  // namespace

std::vector<std::string> validate_schedule(const AdjacencySchedule& s) {
  std::vector<std::string> problems;
  const int n = s.n_buyers + s.n_sellers;
  if (s.family.empty()) {
    problems.push_back("family is empty");
    return problems;
  }
  if (s.q_window < static_cast<int>(s.family.size()))
    problems.push_back("q_window shorter than the activation period");

  double min_positive = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < s.family.size(); ++m) {
    const auto& w = s.family[m];
    const std::string tag = "family[" + std::to_string(m) + "]: ";
    if (w.rows() != n || w.cols() != n) {
      problems.push_back(tag + "wrong dimensions");
      continue;
    }
    for (int i = 0; i < n; ++i) {
      if (std::abs(w.row(i).sum() - 1.0) > 1e-12)
        problems.push_back(tag + "row " + std::to_string(i) + " does not sum to 1");
      if (std::abs(w.col(i).sum() - 1.0) > 1e-12)
        problems.push_back(tag + "column " + std::to_string(i) + " does not sum to 1");
      if (!(w(i, i) > 0.0))
        problems.push_back(tag + "diagonal " + std::to_string(i) + " not positive");
      for (int j = 0; j < n; ++j) {
        const double v = w(i, j);
        if (v < 0.0) problems.push_back(tag + "negative entry");
        if (v > 0.0) min_positive = std::min(min_positive, v);
        const bool same_side = (i < s.n_buyers) == (j < s.n_buyers);
        if (i != j && v > 0.0 && same_side)
          problems.push_back(tag + "off-diagonal weight inside one market side");
      }
    }
  }
  if (s.gamma > min_positive + 1e-15)
    problems.push_back("gamma exceeds the smallest positive entry");

  // cyclic activation: any window of q_window >= period sees every matrix,
  // so window connectivity reduces to the union over the family
  DisjointSet dsu(n);
  for (const auto& w : s.family)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (w(i, j) > 0.0) dsu.unite(i, j);
  for (int i = 1; i < n; ++i)
    if (dsu.find(i) != dsu.find(0)) {
      problems.push_back("union graph over the window is not connected");
      break;
    }
  return problems;
}

AdjacencySchedule build_schedule(int n_buyers, int n_sellers,
                                 const EdgesPolicy& policy, int q_window,
                                 std::uint64_t seed) {
  if (n_buyers < 1 || n_sellers < 1)
    throw std::invalid_argument("build_schedule: need at least one buyer and one seller");
  if (policy.extra_edge_prob < 0.0 || policy.extra_edge_prob > 1.0)
    throw std::invalid_argument("build_schedule: extra_edge_prob must lie in [0, 1]");

  const int rounds = std::max(n_buyers, n_sellers);
  if (q_window > 0 && q_window < rounds) {
    std::ostringstream os;
    os << "build_schedule: q_window " << q_window << " infeasible, need at least "
       << rounds << " rounds to activate every pair";
    throw std::invalid_argument(os.str());
  }

  AdjacencySchedule sched;
  sched.n_buyers = n_buyers;
  sched.n_sellers = n_sellers;

  // round r activates the rotating partial matching j = (i + r) mod rounds,
  // which covers each buyer-seller pair exactly once per cycle; extra
  // random links only densify the mixing
  for (int r = 0; r < rounds; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<char>> present(
        static_cast<std::size_t>(n_buyers),
        std::vector<char>(static_cast<std::size_t>(n_sellers), 0));
    for (int i = 0; i < n_buyers; ++i) {
      const int j = (i + r) % rounds;
      if (j < n_sellers) {
        edges.emplace_back(i, j);
        present[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
      }
    }
    if (policy.extra_edge_prob > 0.0) {
      for (int i = 0; i < n_buyers; ++i)
        for (int j = 0; j < n_sellers; ++j)
          if (!present[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] &&
              rng.bernoulli(policy.extra_edge_prob))
            edges.emplace_back(i, j);
    }
    sched.family.push_back(metropolis_matrix(n_buyers, n_sellers, edges));
  }

  sched.q_window = std::max(q_window, rounds);
  double min_positive = std::numeric_limits<double>::infinity();
  for (const auto& w : sched.family)
    for (int i = 0; i < w.rows(); ++i)
      for (int j = 0; j < w.cols(); ++j)
        if (w(i, j) > 0.0) min_positive = std::min(min_positive, w(i, j));
  sched.gamma = min_positive;

  const auto problems = validate_schedule(sched);
  if (!problems.empty())
    throw std::logic_error("build_schedule: construction failed validation: " +
                           problems.front());
  return sched;
}

OperatorSchedule build_operator_schedule(const AssignmentOutcome& outcome,
                                         double beta, CycleOrder order,
                                         std::uint64_t seed) {
  if (!(beta >= 0.0 && beta < 1.0))
    throw std::invalid_argument("build_operator_schedule: beta must lie in [0, 1)");

  OperatorSchedule ops;
  ops.beta = beta;
  const auto ids = stacked_agent_ids(outcome);
  for (std::size_t a = 0; a < ids.size(); ++a) {
    ops.bounding_sets.push_back(bounding_set_for(ids[a], outcome));
    const int m = static_cast<int>(ops.bounding_sets.back().halfspaces.size());
    std::vector<int> cycle(static_cast<std::size_t>(m));
    std::iota(cycle.begin(), cycle.end(), 0);
    if (order == CycleOrder::shuffled) {
      // fixed per-agent permutation (Fisher-Yates); keeps the cycle
      // periodic so every constraint still appears once per window
      Rng rng(derive_seed(seed, a));
      for (int i = m - 1; i > 0; --i) {
        const long j = rng.uniform_int(0, i);
        std::swap(cycle[static_cast<std::size_t>(i)],
                  cycle[static_cast<std::size_t>(j)]);
      }
    }
    ops.cycles.push_back(std::move(cycle));
    ops.q_window = std::max(ops.q_window, m);
  }
  return ops;
}

NegotiationState step(const NegotiationState& state, const Eigen::MatrixXd& W,
                      const OperatorSchedule& ops) {
  const long n = state.proposals.rows();
  if (state.proposals.cols() != n)
    throw std::invalid_argument("step: proposals must be N x N");
  if (W.rows() != n || W.cols() != n)
    throw std::invalid_argument("step: mixing matrix dimension mismatch");
  if (static_cast<long>(ops.cycles.size()) != n)
    throw std::invalid_argument("step: operator schedule dimension mismatch");

  NegotiationState next;
  next.proposals.resize(n, n);
  next.iteration = state.iteration + 1;

  Eigen::RowVectorXd mixed(n);
  for (long i = 0; i < n; ++i) {
    // agents read neighbours only: positive weights contribute, in a
    // fixed (ascending) reduction order
    mixed.setZero();
    for (long j = 0; j < n; ++j) {
      const double w = W(i, j);
      if (w > 0.0) mixed += w * state.proposals.row(j);
    }
    const HalfSpace& h = ops.active(static_cast<int>(i), state.iteration);
    next.proposals.row(i) =
        paracontraction_step(mixed.transpose(), h, ops.beta).transpose();
  }
  return next;
}

double consensus_spread(const Eigen::MatrixXd& proposals) {
  const Eigen::RowVectorXd mean = proposals.colwise().mean();
  double spread = 0.0;
  for (long i = 0; i < proposals.rows(); ++i)
    spread = std::max(spread, (proposals.row(i) - mean).norm());
  return spread;
}

double distance_to_target(const Eigen::MatrixXd& proposals,
                          const CoreDescription& core, double dist_tol) {
  const long n = proposals.rows();
  const Eigen::VectorXd mean = proposals.colwise().mean().transpose();
  double sum_sq = 0.0;
  for (long i = 0; i < n; ++i)
    sum_sq += (proposals.row(i).transpose() - mean).squaredNorm();
  const Eigen::VectorXd projected = project_core(mean, core, dist_tol);
  const double core_dist_sq = (mean - projected).squaredNorm();
  return std::sqrt(sum_sq + static_cast<double>(n) * core_dist_sq);
}

namespace {

Eigen::MatrixXd initial_proposals(const AssignmentOutcome& outcome,
                                  const RunConfig& cfg) {
  const int nb = static_cast<int>(outcome.matrix.buyer_ids.size());
  const int ns = static_cast<int>(outcome.matrix.seller_ids.size());
  const int n = nb + ns;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
  switch (cfg.init) {
    case InitMode::zeros:
      break;
    case InitMode::random: {
      Rng rng(cfg.init_seed);
      const double hi = std::max(1.0, outcome.matrix.values.size() > 0
                                          ? outcome.matrix.values.maxCoeff()
                                          : 0.0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) x(i, j) = rng.uniform(0.0, hi);
      break;
    }
    case InitMode::selfish:
      // every agent opens by demanding its best pair value for itself
      for (int i = 0; i < nb; ++i)
        if (ns > 0) x(i, i) = outcome.matrix.values.row(i).maxCoeff();
      for (int j = 0; j < ns; ++j)
        if (nb > 0) x(nb + j, nb + j) = outcome.matrix.values.col(j).maxCoeff();
      break;
  }
  return x;
}

}  // namespace

RunResult run(const AssignmentOutcome& outcome,
              const AdjacencySchedule& schedule, const OperatorSchedule& ops,
              const RunConfig& cfg) {
  const int nb = static_cast<int>(outcome.matrix.buyer_ids.size());
  const int ns = static_cast<int>(outcome.matrix.seller_ids.size());
  const int n = nb + ns;
  if (n == 0) throw std::invalid_argument("run: empty market");
  if (schedule.n_buyers != nb || schedule.n_sellers != ns)
    throw std::invalid_argument("run: schedule does not match the market size");
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("run: tol must be positive");

  const CoreDescription core = core_constraints(outcome);

  RunResult result;
  result.q_window = std::max(schedule.q_window, ops.q_window);
  const long max_iters =
      cfg.max_iters > 0 ? cfg.max_iters : 5000L * result.q_window;

  NegotiationState state{initial_proposals(outcome, cfg), 0};

  std::int64_t last_step_ns = 0;
  const bool want_dist = cfg.record_trace && cfg.dist_every > 0;

  while (true) {
    const long k = state.iteration;
    const Eigen::VectorXd mean = state.proposals.colwise().mean().transpose();
    const double spread = consensus_spread(state.proposals);

    double violation = kNan;
    if (cfg.record_trace || spread <= cfg.tol)
      violation = core_membership(mean, core, cfg.tol).worst_violation;

    if (cfg.record_trace) {
      TraceRow row;
      row.k = k;
      row.consensus_spread = spread;
      row.max_violation = violation;
      row.step_wall_ns = last_step_ns;
      row.core_dist_mean = kNan;
      row.dist = kNan;
      row.dist_ratio = kNan;
      if (want_dist && k % cfg.dist_every == 0) {
        const Eigen::VectorXd projected =
            project_core(mean, core, cfg.dist_tol);
        const double core_dist = (mean - projected).norm();
        double sum_sq = 0.0;
        for (long i = 0; i < n; ++i)
          sum_sq +=
              (state.proposals.row(i).transpose() - mean).squaredNorm();
        row.core_dist_mean = core_dist;
        row.dist = std::sqrt(sum_sq +
                             static_cast<double>(n) * core_dist * core_dist);
        if (k == 0) result.trace.initial_distance = row.dist;
        row.dist_ratio = result.trace.initial_distance > 0.0
                             ? row.dist / result.trace.initial_distance
                             : 0.0;
      }
      result.trace.rows.push_back(row);
    }

    if (spread <= cfg.tol && violation <= cfg.tol) {
      result.status = RunStatus::converged;
      result.iterations = k;
      result.final_spread = spread;
      result.final_violation = violation;
      break;
    }
    if (k >= max_iters) {
      result.status = RunStatus::max_iterations;
      result.iterations = k;
      result.final_spread = spread;
      result.final_violation =
          std::isnan(violation)
              ? core_membership(mean, core, cfg.tol).worst_violation
              : violation;
      break;
    }

    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.project_full_set) {
      // benchmark variant: whole bounding set per agent, via Dykstra
      NegotiationState next;
      next.proposals.resize(n, n);
      next.iteration = state.iteration + 1;
      const Eigen::MatrixXd& w = schedule.at(k);
      Eigen::RowVectorXd mixed(n);
      for (long i = 0; i < n; ++i) {
        mixed.setZero();
        for (long j = 0; j < n; ++j)
          if (w(i, j) > 0.0) mixed += w(i, j) * state.proposals.row(j);
        next.proposals.row(i) =
            dykstra_project(mixed.transpose(),
                            ops.bounding_sets[static_cast<std::size_t>(i)]
                                .halfspaces,
                            cfg.dist_tol, 10000)
                .transpose();
      }
      state = std::move(next);
    } else {
      state = step(state, schedule.at(k), ops);
    }
    last_step_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  }

  result.payoff = state.proposals.colwise().mean().transpose();
  result.final_state = std::move(state);
  return result;
}

}  // namespace p2pmkt
