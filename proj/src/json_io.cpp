#include "p2pmkt/json_io.hpp"

#include <cmath>
#include <ostream>

namespace p2pmkt {

using nlohmann::json;

json instance_to_json(const MarketInstance& m) {
  json j;
  j["grid"] = {{"buy", m.grid.buy}, {"sell", m.grid.sell}};
  j["unit_size"] = m.unit_size;
  j["buyers"] = json::array();
  for (const auto& b : m.buyers) {
    json jb = {{"id", b.id},
               {"base_price", b.base_price},
               {"demand", b.demand},
               {"green_concern", b.green_concern},
               {"rating_concern", b.rating_concern}};
    if (!b.parent.empty()) jb["parent"] = b.parent;
    j["buyers"].push_back(std::move(jb));
  }
  j["sellers"] = json::array();
  for (const auto& s : m.sellers) {
    json js = {{"id", s.id},
               {"reservation_price", s.reservation_price},
               {"supply", s.supply},
               {"green", s.green},
               {"rating", s.rating}};
    if (!s.parent.empty()) js["parent"] = s.parent;
    j["sellers"].push_back(std::move(js));
  }
  return j;
}

MarketInstance instance_from_json(const json& j) {
  MarketInstance m;
  m.grid.buy = j.at("grid").at("buy").get<double>();
  m.grid.sell = j.at("grid").at("sell").get<double>();
  m.unit_size = j.value("unit_size", 1.0);
  for (const auto& jb : j.value("buyers", json::array())) {
    BuyerBid b;
    b.id = jb.at("id").get<std::string>();
    b.base_price = jb.at("base_price").get<double>();
    b.demand = jb.at("demand").get<double>();
    b.green_concern = jb.value("green_concern", 0);
    b.rating_concern = jb.value("rating_concern", false);
    b.parent = jb.value("parent", std::string{});
    m.buyers.push_back(std::move(b));
  }
  for (const auto& js : j.value("sellers", json::array())) {
    SellerOffer s;
    s.id = js.at("id").get<std::string>();
    s.reservation_price = js.at("reservation_price").get<double>();
    s.supply = js.at("supply").get<double>();
    s.green = js.value("green", false);
    s.rating = js.value("rating", 0.0);
    s.parent = js.value("parent", std::string{});
    m.sellers.push_back(std::move(s));
  }
  return m;
}

json outcome_to_json(const AssignmentOutcome& outcome) {
  json j;
  j["buyer_ids"] = outcome.matrix.buyer_ids;
  j["seller_ids"] = outcome.matrix.seller_ids;
  json rows = json::array();
  for (long i = 0; i < outcome.matrix.values.rows(); ++i) {
    json row = json::array();
    for (long c = 0; c < outcome.matrix.values.cols(); ++c)
      row.push_back(outcome.matrix.values(i, c));
    rows.push_back(std::move(row));
  }
  j["matrix"] = std::move(rows);
  j["pairs"] = json::array();
  for (const auto& [i, c] : outcome.optimal.pairs)
    j["pairs"].push_back(
        {{"buyer", outcome.matrix.buyer_ids[static_cast<std::size_t>(i)]},
         {"seller", outcome.matrix.seller_ids[static_cast<std::size_t>(c)]},
         {"value", outcome.matrix.values(i, c)}});
  j["grand_value"] = outcome.grand_value;
  return j;
}

json core_to_json(const CoreDescription& core,
                  const std::vector<std::string>& agent_ids) {
  json j;
  j["agent_ids"] = agent_ids;
  j["grand_value"] = core.grand_value;
  j["constraints"] = json::array();
  for (const auto& h : core.constraints) {
    json c;
    c["label"] = h.label;
    c["kind"] = h.kind == ConstraintKind::hyperplane ? "hyperplane" : "inequality";
    c["offset"] = h.offset;
    json support = json::array();
    for (long i = 0; i < h.normal.size(); ++i)
      if (h.normal(i) != 0.0) support.push_back({{"index", i}, {"coeff", h.normal(i)}});
    c["normal"] = std::move(support);
    j["constraints"].push_back(std::move(c));
  }
  return j;
}

json payoff_to_json(const RunResult& result,
                    const std::vector<std::string>& agent_ids) {
  json j;
  j["agent_ids"] = agent_ids;
  j["payoff"] = json::array();
  for (long i = 0; i < result.payoff.size(); ++i) j["payoff"].push_back(result.payoff(i));
  j["status"] =
      result.status == RunStatus::converged ? "converged" : "max_iterations";
  j["iterations"] = result.iterations;
  j["q_window"] = result.q_window;
  j["final_spread"] = result.final_spread;
  j["final_violation"] = result.final_violation;
  return j;
}

Eigen::VectorXd payoff_from_json(const json& j) {
  const auto& arr = j.contains("payoff") ? j.at("payoff") : j;
  Eigen::VectorXd x(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i)
    x(static_cast<long>(i)) = arr.at(i).get<double>();
  return x;
}

json contracts_to_json(const std::vector<Contract>& contracts) {
  json j = json::array();
  for (const auto& c : contracts)
    j.push_back({{"buyer", c.buyer_id},
                 {"seller", c.seller_id},
                 {"quantity", c.quantity},
                 {"unit_price", c.unit_price},
                 {"payment", c.payment},
                 {"buyer_payoff", c.buyer_payoff},
                 {"seller_payoff", c.seller_payoff}});
  return j;
}

namespace {

json agent_economics_to_json(const std::map<std::string, AgentEconomics>& agents) {
  json j = json::object();
  for (const auto& [id, a] : agents)
    j[id] = {{"baseline", a.baseline},
             {"actual", a.actual},
             {"delta", a.delta},
             {"internal_kwh", a.internal_kwh},
             {"grid_kwh", a.grid_kwh}};
  return j;
}

}  // namespace

json report_to_json(const EconomicReport& report) {
  json j;
  j["sellers"] = agent_economics_to_json(report.sellers);
  j["buyers"] = agent_economics_to_json(report.buyers);
  j["internal_kwh"] = report.internal_kwh;
  j["grid_sold_kwh"] = report.grid_sold_kwh;
  j["grid_bought_kwh"] = report.grid_bought_kwh;
  j["satisfaction"] = report.satisfaction;
  return j;
}

json schedule_to_json(const AdjacencySchedule& schedule) {
  json j;
  j["n_buyers"] = schedule.n_buyers;
  j["n_sellers"] = schedule.n_sellers;
  j["q_window"] = schedule.q_window;
  j["gamma"] = schedule.gamma;
  j["family"] = json::array();
  for (const auto& w : schedule.family) {
    json rows = json::array();
    for (long i = 0; i < w.rows(); ++i) {
      json row = json::array();
      for (long c = 0; c < w.cols(); ++c) row.push_back(w(i, c));
      rows.push_back(std::move(row));
    }
    j["family"].push_back(std::move(rows));
  }
  return j;
}

json config_to_json(const ScenarioConfig& cfg) {
  json j;
  j["n_buyers"] = cfg.n_buyers;
  j["n_sellers"] = cfg.n_sellers;
  j["range_lo"] = cfg.range_lo;
  j["range_hi"] = cfg.range_hi;
  j["grid"] = {{"buy", cfg.grid.buy}, {"sell", cfg.grid.sell}};
  j["seed"] = cfg.seed;
  j["mode"] =
      cfg.mode == MarketMode::multi_contract ? "multi" : "single";
  j["unit_size"] = cfg.unit_size;
  j["price_margin"] = cfg.price_margin;
  j["beta"] = cfg.beta;
  j["q_window"] = cfg.q_window;
  j["tol"] = cfg.tol;
  j["max_iters"] = cfg.max_iters;
  j["extra_edge_prob"] = cfg.edges.extra_edge_prob;
  j["order"] = cfg.order == CycleOrder::shuffled ? "shuffled" : "round_robin";
  j["init"] = cfg.init == InitMode::selfish
                  ? "selfish"
                  : (cfg.init == InitMode::zeros ? "zeros" : "random");
  return j;
}

json batch_to_json(const BatchResult& batch) {
  json j;
  j["converged"] = batch.converged;
  j["scenarios"] = json::array();
  for (const auto& s : batch.scenarios)
    j["scenarios"].push_back(
        {{"index", s.index},
         {"seed", s.seed},
         {"status", s.status == RunStatus::converged ? "converged" : "max_iterations"},
         {"iterations", s.iterations},
         {"final_spread", s.final_spread},
         {"final_violation", s.final_violation},
         {"grand_value", s.grand_value},
         {"satisfaction", s.satisfaction}});
  j["failures"] = batch.failures;
  j["mean_seller_delta"] = batch.mean_seller_delta;
  j["mean_buyer_delta"] = batch.mean_buyer_delta;
  j["internal_kwh"] = batch.internal_kwh;
  j["grid_sold_kwh"] = batch.grid_sold_kwh;
  j["grid_bought_kwh"] = batch.grid_bought_kwh;
  j["satisfaction_total"] = batch.satisfaction_total;
  return j;
}

json benchmark_to_json(const BenchmarkResult& bench) {
  json j;
  j["half_step_ns"] = bench.half_step_ns;
  j["full_step_ns"] = bench.full_step_ns;
  j["speedup"] = bench.speedup;
  j["half_iters_ratio_1e4"] = bench.half_iters_ratio_1e4;
  j["full_iters_ratio_1e4"] = bench.full_iters_ratio_1e4;
  j["scaling"] = json::array();
  for (const auto& e : bench.scaling)
    j["scaling"].push_back({{"n_agents", e.n_agents},
                            {"iterations", e.iterations},
                            {"converged", e.converged},
                            {"wall_s", e.wall_s},
                            {"per_agent_s", e.per_agent_s}});
  return j;
}

void write_trace_csv(std::ostream& os, const NegotiationTrace& trace) {
  os << "k,consensus_spread,core_dist_mean,dist_ratio,step_wall_ns\n";
  for (const auto& row : trace.rows) {
    os << row.k << ',' << row.consensus_spread << ',';
    if (std::isnan(row.core_dist_mean))
      os << "nan";
    else
      os << row.core_dist_mean;
    os << ',';
    if (std::isnan(row.dist_ratio))
      os << "nan";
    else
      os << row.dist_ratio;
    os << ',' << row.step_wall_ns << '\n';
  }
}

void write_contracts_csv(std::ostream& os,
                         const std::vector<Contract>& contracts) {
  os << "buyer,seller,quantity,unit_price,payment,buyer_payoff,seller_payoff\n";
  for (const auto& c : contracts)
    os << c.buyer_id << ',' << c.seller_id << ',' << c.quantity << ','
       << c.unit_price << ',' << c.payment << ',' << c.buyer_payoff << ','
       << c.seller_payoff << '\n';
}

void write_report_csv(std::ostream& os, const EconomicReport& report) {
  os << "side,agent,baseline,actual,delta,internal_kwh,grid_kwh\n";
  for (const auto& [id, a] : report.sellers)
    os << "seller," << id << ',' << a.baseline << ',' << a.actual << ','
       << a.delta << ',' << a.internal_kwh << ',' << a.grid_kwh << '\n';
  for (const auto& [id, a] : report.buyers)
    os << "buyer," << id << ',' << a.baseline << ',' << a.actual << ','
       << a.delta << ',' << a.internal_kwh << ',' << a.grid_kwh << '\n';
}

void write_trajectory_csv(std::ostream& os,
                          const std::vector<TrajectoryPoint>& trajectory) {
  os << "k,mean_ratio,min_ratio,max_ratio\n";
  for (const auto& p : trajectory)
    os << p.k << ',' << p.mean << ',' << p.min << ',' << p.max << '\n';
}

}  // namespace p2pmkt
