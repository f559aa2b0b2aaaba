// JSON and CSV serialization for instances, outcomes, payoffs, contracts,
// reports and traces. Schemas are documented in the README.
#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <json.hpp>
#include <string>
#include <vector>

#include "p2pmkt/matching.hpp"
#include "p2pmkt/negotiation.hpp"
#include "p2pmkt/scenario.hpp"
#include "p2pmkt/settlement.hpp"

namespace p2pmkt {

nlohmann::json instance_to_json(const MarketInstance& m);
MarketInstance instance_from_json(const nlohmann::json& j);

nlohmann::json outcome_to_json(const AssignmentOutcome& outcome);
nlohmann::json core_to_json(const CoreDescription& core,
                            const std::vector<std::string>& agent_ids);

nlohmann::json payoff_to_json(const RunResult& result,
                              const std::vector<std::string>& agent_ids);
Eigen::VectorXd payoff_from_json(const nlohmann::json& j);

nlohmann::json contracts_to_json(const std::vector<Contract>& contracts);
nlohmann::json report_to_json(const EconomicReport& report);
nlohmann::json schedule_to_json(const AdjacencySchedule& schedule);
nlohmann::json config_to_json(const ScenarioConfig& cfg);
nlohmann::json batch_to_json(const BatchResult& batch);
nlohmann::json benchmark_to_json(const BenchmarkResult& bench);

// trace CSV: k, consensus_spread, core_dist_mean, dist_ratio, step_wall_ns
void write_trace_csv(std::ostream& os, const NegotiationTrace& trace);
void write_contracts_csv(std::ostream& os,
                         const std::vector<Contract>& contracts);
void write_report_csv(std::ostream& os, const EconomicReport& report);
void write_trajectory_csv(std::ostream& os,
                          const std::vector<TrajectoryPoint>& trajectory);

}  // namespace p2pmkt
