// Turns an agreed payoff vector into bilateral contract prices and
// compares the outcome against trading with the grid.
#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "p2pmkt/matching.hpp"

namespace p2pmkt {

struct Contract {
  std::string buyer_id;
  std::string seller_id;
  double quantity = 0.0;      // kWh, min(supply, demand)
  double unit_price = 0.0;    // per kWh; lies in [reservation, effective bid]
  double payment = 0.0;       // unit_price * quantity
  double buyer_payoff = 0.0;  // agreed surplus shares
  double seller_payoff = 0.0;
};

struct AgentEconomics {
  double baseline = 0.0;      // revenue (sellers) or cost (buyers) with grid only
  double actual = 0.0;        // with the bilateral contracts plus grid residuals
  double delta = 0.0;         // actual - baseline
  double internal_kwh = 0.0;  // energy traded bilaterally
  double grid_kwh = 0.0;      // residual routed to the grid
};

// Keyed by participant id; granulated unit agents are folded back into
// their parents.
struct EconomicReport {
  std::map<std::string, AgentEconomics> sellers;
  std::map<std::string, AgentEconomics> buyers;
  double internal_kwh = 0.0;
  double grid_sold_kwh = 0.0;    // residual supply sold to the grid
  double grid_bought_kwh = 0.0;  // residual demand bought from the grid
  int satisfaction = 0;  // green-concerned buyers matched to green sellers
};

// One contract per optimally matched pair: the buyer pays its effective
// valuation minus its payoff share, so unit_price = effective_bid -
// buyer_payoff / quantity. Refuses (throws std::runtime_error) when the
// payoff fails core membership at tol; unstable prices are never issued.
std::vector<Contract> settle(const AssignmentOutcome& outcome,
                             const Eigen::VectorXd& payoff,
                             const MarketInstance& m, double tol);

// Reference outcome with no bilateral trades: all supply sold at grid.buy,
// all demand bought at grid.sell.
EconomicReport grid_baseline(const MarketInstance& m);

// Per-participant deltas vs the grid baseline, energy flows, and the
// green-match satisfaction count.
EconomicReport economic_report(const std::vector<Contract>& contracts,
                               const MarketInstance& m);

}  // namespace p2pmkt
