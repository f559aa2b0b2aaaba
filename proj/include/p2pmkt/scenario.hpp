// Seeded scenario generation, the clear/negotiate/settle pipeline, batch
// statistics, and the step-cost benchmark against full-set projection.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "p2pmkt/market.hpp"
#include "p2pmkt/negotiation.hpp"
#include "p2pmkt/settlement.hpp"

namespace p2pmkt {

struct BuyerProfile {
  bool env_concern = false;
  bool rating_concern = false;
};

struct SellerProfile {
  bool green = false;
};

enum class MarketMode { single_contract, multi_contract };

// Default residential panel: buyers (env), (none), (rating), (env+rating);
// sellers green, brown, green, brown. Cycled when the market is larger.
std::vector<BuyerProfile> default_buyer_profiles();
std::vector<SellerProfile> default_seller_profiles();

struct ScenarioConfig {
  int n_buyers = 4;
  int n_sellers = 4;
  double range_lo = 2.0;  // kWh bounds for demand and supply draws
  double range_hi = 8.0;
  GridPrices grid{0.05, 0.17};
  std::vector<BuyerProfile> buyer_profiles;    // empty = defaults
  std::vector<SellerProfile> seller_profiles;  // empty = defaults
  std::uint64_t seed = 1;
  MarketMode mode = MarketMode::single_contract;
  double unit_size = 1.0;
  double price_margin = 0.005;  // clearance kept from the band edges

  // negotiation knobs
  double beta = 0.5;
  int q_window = 0;  // 0 = derived from the schedules
  double tol = 1e-6;
  long max_iters = 0;  // 0 = 5000 * q_window
  EdgesPolicy edges{};
  CycleOrder order = CycleOrder::shuffled;
  InitMode init = InitMode::selfish;
  bool record_trace = true;
  int dist_every = 1;
  double dist_tol = 1e-10;
};

// Deterministic in (cfg.seed, cfg): draws seller ratings/supplies/prices,
// then buyer concerns/demands/prices inside the band that keeps every
// effective bid valid against every seller. Throws when the band is too
// narrow to satisfy the price conditions.
MarketInstance generate_scenario(const ScenarioConfig& cfg);

struct ScenarioResult {
  MarketInstance base;    // as generated
  MarketInstance market;  // granulated in multi-contract mode
  AssignmentOutcome outcome;
  RunResult run;
  std::vector<Contract> contracts;  // empty unless converged
  EconomicReport report;
};

ScenarioResult run_scenario(const ScenarioConfig& cfg);

struct ScenarioSummary {
  int index = 0;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::max_iterations;
  long iterations = 0;
  double final_spread = 0.0;
  double final_violation = 0.0;
  double grand_value = 0.0;
  int satisfaction = 0;
};

struct TrajectoryPoint {
  long k = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct BatchResult {
  std::vector<ScenarioSummary> scenarios;
  std::vector<std::string> failures;  // diagnostics of non-converged runs
  int converged = 0;
  // pointwise stats of dist ratio trajectories; converged runs carry their
  // final value forward so the envelope stays defined
  std::vector<TrajectoryPoint> trajectory;
  double mean_seller_delta = 0.0;  // average per-seller revenue improvement
  double mean_buyer_delta = 0.0;   // average per-buyer cost change
  double internal_kwh = 0.0;
  double grid_sold_kwh = 0.0;
  double grid_bought_kwh = 0.0;
  int satisfaction_total = 0;
};

// Runs n seeded scenarios (seed derived per index); failures are recorded
// and the batch continues.
BatchResult run_batch(const ScenarioConfig& cfg, int n_scenarios);

struct ScalingEntry {
  int n_agents = 0;
  long iterations = 0;
  bool converged = false;
  double wall_s = 0.0;
  double per_agent_s = 0.0;  // wall_s / n_agents (agents update in parallel
                             // in a deployed setting)
};

struct BenchmarkResult {
  double half_step_ns = 0.0;  // mean wall per negotiation step
  double full_step_ns = 0.0;  // same, projecting the whole bounding set
  double speedup = 0.0;       // full / half
  long half_iters_ratio_1e4 = -1;  // first k with dist ratio <= 1e-4
  long full_iters_ratio_1e4 = -1;
  std::vector<ScalingEntry> scaling;
};

// Times the scheduled half-space iteration against the variant that
// projects each agent onto its entire bounding set (Dykstra) every round,
// on identical instances and schedules. Throws if the half-space step is
// not strictly faster. `sizes` optionally adds total-agent-count scaling
// rows (negotiation only, distance tracing off).
BenchmarkResult benchmark(const ScenarioConfig& cfg,
                          const std::vector<int>& sizes = {});

}  // namespace p2pmkt
