#include "p2pmkt/settlement.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "p2pmkt/core_geometry.hpp"

namespace p2pmkt {

namespace {

const std::string& parent_of(const std::string& id, const std::string& parent) {
  return parent.empty() ? id : parent;
}

}  // namespace

std::vector<Contract> settle(const AssignmentOutcome& outcome,
                             const Eigen::VectorXd& payoff,
                             const MarketInstance& m, double tol) {
  const CoreDescription core = core_constraints(outcome);
  const MembershipResult mem = core_membership(payoff, core, tol);
  if (!mem.member) {
    std::ostringstream os;
    os << "settle: refusing to settle a payoff outside the core (violation "
       << mem.worst_violation << " at " << mem.worst_label << ", tol " << tol
       << ")";
    throw std::runtime_error(os.str());
  }

  std::unordered_map<std::string, const BuyerBid*> buyers;
  std::unordered_map<std::string, const SellerOffer*> sellers;
  for (const auto& b : m.buyers) buyers[b.id] = &b;
  for (const auto& s : m.sellers) sellers[s.id] = &s;

  const int nb = static_cast<int>(outcome.matrix.buyer_ids.size());
  std::vector<Contract> contracts;
  for (const auto& [i, j] : outcome.optimal.pairs) {
    const std::string& buyer_id =
        outcome.matrix.buyer_ids[static_cast<std::size_t>(i)];
    const std::string& seller_id =
        outcome.matrix.seller_ids[static_cast<std::size_t>(j)];
    const auto bit = buyers.find(buyer_id);
    const auto sit = sellers.find(seller_id);
    if (bit == buyers.end() || sit == sellers.end())
      throw std::invalid_argument(
          "settle: instance does not contain the matched agents " + buyer_id +
          "/" + seller_id);
    const BuyerBid& buyer = *bit->second;
    const SellerOffer& seller = *sit->second;

    Contract c;
    c.buyer_id = buyer_id;
    c.seller_id = seller_id;
    c.quantity = std::min(seller.supply, buyer.demand);
    c.buyer_payoff = payoff(i);
    c.seller_payoff = payoff(nb + j);
    // the buyer keeps its payoff share out of its full valuation
    c.payment = preference_factor(buyer, seller) * buyer.base_price * c.quantity -
                c.buyer_payoff;
    c.unit_price = c.payment / c.quantity;
    contracts.push_back(std::move(c));
  }
  return contracts;
}

EconomicReport grid_baseline(const MarketInstance& m) {
  EconomicReport r;
  for (const auto& s : m.sellers) {
    auto& agent = r.sellers[parent_of(s.id, s.parent)];
    agent.baseline += s.supply * m.grid.buy;
    agent.actual = agent.baseline;
    agent.grid_kwh += s.supply;
    r.grid_sold_kwh += s.supply;
  }
  for (const auto& b : m.buyers) {
    auto& agent = r.buyers[parent_of(b.id, b.parent)];
    agent.baseline += b.demand * m.grid.sell;
    agent.actual = agent.baseline;
    agent.grid_kwh += b.demand;
    r.grid_bought_kwh += b.demand;
  }
  return r;
}

EconomicReport economic_report(const std::vector<Contract>& contracts,
                               const MarketInstance& m) {
  std::unordered_map<std::string, const BuyerBid*> buyers;
  std::unordered_map<std::string, const SellerOffer*> sellers;
  for (const auto& b : m.buyers) buyers[b.id] = &b;
  for (const auto& s : m.sellers) sellers[s.id] = &s;

  EconomicReport r;
  // totals per parent participant; unit agents fold into their parents
  std::unordered_map<std::string, double> supply_total, demand_total;
  for (const auto& s : m.sellers) {
    const auto& key = parent_of(s.id, s.parent);
    supply_total[key] += s.supply;
    r.sellers[key];  // materialize entries even when nothing trades
  }
  for (const auto& b : m.buyers) {
    const auto& key = parent_of(b.id, b.parent);
    demand_total[key] += b.demand;
    r.buyers[key];
  }

  std::unordered_map<std::string, double> seller_internal, buyer_internal;
  for (const auto& c : contracts) {
    const auto bit = buyers.find(c.buyer_id);
    const auto sit = sellers.find(c.seller_id);
    if (bit == buyers.end() || sit == sellers.end())
      throw std::invalid_argument("economic_report: contract references unknown agent " +
                                  c.buyer_id + "/" + c.seller_id);
    const auto& skey = parent_of(sit->second->id, sit->second->parent);
    const auto& bkey = parent_of(bit->second->id, bit->second->parent);
    r.sellers[skey].actual += c.payment;
    r.buyers[bkey].actual += c.payment;
    seller_internal[skey] += c.quantity;
    buyer_internal[bkey] += c.quantity;
    r.internal_kwh += c.quantity;
    if (bit->second->green_concern > 0 && sit->second->green) ++r.satisfaction;
  }

  for (auto& [key, agent] : r.sellers) {
    agent.internal_kwh = seller_internal[key];
    agent.grid_kwh = std::max(0.0, supply_total[key] - agent.internal_kwh);
    agent.actual += agent.grid_kwh * m.grid.buy;
    agent.baseline = supply_total[key] * m.grid.buy;
    agent.delta = agent.actual - agent.baseline;
    r.grid_sold_kwh += agent.grid_kwh;
  }
  for (auto& [key, agent] : r.buyers) {
    agent.internal_kwh = buyer_internal[key];
    agent.grid_kwh = std::max(0.0, demand_total[key] - agent.internal_kwh);
    agent.actual += agent.grid_kwh * m.grid.sell;
    agent.baseline = demand_total[key] * m.grid.sell;
    agent.delta = agent.actual - agent.baseline;
    r.grid_bought_kwh += agent.grid_kwh;
  }
  return r;
}

}  // namespace p2pmkt
