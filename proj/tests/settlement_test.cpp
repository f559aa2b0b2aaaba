#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "p2pmkt/core_geometry.hpp"
#include "p2pmkt/rng.hpp"
#include "p2pmkt/scenario.hpp"
#include "p2pmkt/settlement.hpp"

using namespace p2pmkt;

namespace {

// buyer bids 0.12 for 3 kWh, seller reserves 0.08 with 5 kWh: pair value 0.12
MarketInstance single_pair_market() {
  MarketInstance m;
  m.grid = {0.05, 0.17};
  m.buyers.push_back({"B1", 0.12, 3.0, 0, false, ""});
  m.sellers.push_back({"S1", 0.08, 5.0, false, 0.0, ""});
  return m;
}

}  // namespace

TEST_CASE("settle on a single pair") {
  const auto m = single_pair_market();
  const auto outcome = solve_assignment(build_matrix(m));
  REQUIRE(outcome.grand_value == doctest::Approx(0.12).epsilon(1e-12));

  SUBCASE("even split prices at the midpoint") {
    const auto contracts = settle(outcome, Eigen::Vector2d(0.06, 0.06), m, 1e-9);
    REQUIRE(contracts.size() == 1);
    CHECK(contracts[0].quantity == doctest::Approx(3.0));
    CHECK(contracts[0].payment == doctest::Approx(0.30).epsilon(1e-9));
    CHECK(contracts[0].unit_price == doctest::Approx(0.10).epsilon(1e-9));
  }

  SUBCASE("buyer-optimal payoff leaves the seller at its reservation") {
    const auto contracts =
        settle(outcome, Eigen::Vector2d(outcome.grand_value, 0.0), m, 1e-9);
    CHECK(contracts[0].unit_price == doctest::Approx(0.08).epsilon(1e-9));
  }

  SUBCASE("zero buyer payoff prices at the full valuation") {
    const auto contracts =
        settle(outcome, Eigen::Vector2d(0.0, outcome.grand_value), m, 1e-9);
    CHECK(contracts[0].unit_price == doctest::Approx(0.12).epsilon(1e-9));
  }

  SUBCASE("payoffs outside the core are refused") {
    CHECK_THROWS_AS(settle(outcome, Eigen::Vector2d(0.2, 0.2), m, 1e-9),
                    std::runtime_error);
  }
}

TEST_CASE("grid baseline") {
  auto m = single_pair_market();
  const auto base = grid_baseline(m);
  CHECK(base.sellers.at("S1").baseline == doctest::Approx(0.25));
  CHECK(base.buyers.at("B1").baseline == doctest::Approx(0.51));
  CHECK(base.internal_kwh == 0.0);
  CHECK(base.grid_sold_kwh == doctest::Approx(5.0));
  CHECK(base.grid_bought_kwh == doctest::Approx(3.0));

  SUBCASE("empty market reports zeros") {
    const auto empty = grid_baseline(MarketInstance{{}, {}, {0.05, 0.17}, 1.0});
    CHECK(empty.sellers.empty());
    CHECK(empty.buyers.empty());
    CHECK(empty.grid_sold_kwh == 0.0);
  }
}

TEST_CASE("economic report") {
  const auto m = single_pair_market();
  const auto outcome = solve_assignment(build_matrix(m));
  const auto contracts = settle(outcome, Eigen::Vector2d(0.06, 0.06), m, 1e-9);
  const auto report = economic_report(contracts, m);

  // lambda = 0.10 on 3 kWh: seller +3(0.10-0.05), buyer -3(0.17-0.10)
  CHECK(report.sellers.at("S1").delta == doctest::Approx(0.15).epsilon(1e-9));
  CHECK(report.buyers.at("B1").delta == doctest::Approx(-0.21).epsilon(1e-9));
  CHECK(report.internal_kwh == doctest::Approx(3.0));
  CHECK(report.grid_sold_kwh == doctest::Approx(2.0));  // 5 - 3 residual
  CHECK(report.grid_bought_kwh == doctest::Approx(0.0));

  SUBCASE("energy is conserved per side") {
    double supply = 0.0;
    for (const auto& s : m.sellers) supply += s.supply;
    CHECK(report.internal_kwh + report.grid_sold_kwh == doctest::Approx(supply));
    double demand = 0.0;
    for (const auto& b : m.buyers) demand += b.demand;
    CHECK(report.internal_kwh + report.grid_bought_kwh == doctest::Approx(demand));
  }

  SUBCASE("no contracts means zero deltas") {
    const auto zero = economic_report({}, m);
    CHECK(zero.sellers.at("S1").delta == doctest::Approx(0.0));
    CHECK(zero.buyers.at("B1").delta == doctest::Approx(0.0));
    CHECK(zero.internal_kwh == 0.0);
  }
}

TEST_CASE("negotiated settlements respect prices and dominate the grid") {
  Rng rng(606);
  for (int t = 0; t < 12; ++t) {
    ScenarioConfig cfg;
    cfg.seed = 4000 + static_cast<std::uint64_t>(t);
    cfg.n_buyers = static_cast<int>(rng.uniform_int(1, 3));
    cfg.n_sellers = static_cast<int>(rng.uniform_int(1, 3));
    cfg.tol = 1e-9;
    cfg.record_trace = false;
    const auto r = run_scenario(cfg);
    REQUIRE(r.run.status == RunStatus::converged);

    double paid = 0.0, received = 0.0;
    for (const auto& c : r.contracts) {
      const auto& buyer = *std::find_if(r.market.buyers.begin(),
                                        r.market.buyers.end(),
                                        [&](const auto& b) { return b.id == c.buyer_id; });
      const auto& seller = *std::find_if(r.market.sellers.begin(),
                                         r.market.sellers.end(),
                                         [&](const auto& s) { return s.id == c.seller_id; });
      const double bid = preference_factor(buyer, seller) * buyer.base_price;
      CHECK(c.unit_price >= seller.reservation_price - 1e-7);
      CHECK(c.unit_price <= bid + 1e-7);
      // matched pairs split their value exactly
      CHECK(c.buyer_payoff + c.seller_payoff ==
            doctest::Approx(contract_value(buyer, seller)).epsilon(1e-6));
      paid += c.payment;
      received += c.payment;
    }
    CHECK(paid == doctest::Approx(received));  // bilateral budget balance

    for (const auto& [id, agent] : r.report.sellers)
      CHECK(agent.delta >= -1e-7);
    for (const auto& [id, agent] : r.report.buyers)
      CHECK(agent.delta <= 1e-7);
  }
}

TEST_CASE("balanced multi-contract markets clear entirely inside") {
  // integral quantities, all pairs viable, unit size divides everything
  MarketInstance m;
  m.grid = {0.05, 0.17};
  m.unit_size = 1.0;
  m.buyers.push_back({"B1", 0.15, 2.0, 0, false, ""});
  m.buyers.push_back({"B2", 0.14, 3.0, 0, false, ""});
  m.sellers.push_back({"S1", 0.06, 1.0, false, 0.0, ""});
  m.sellers.push_back({"S2", 0.07, 4.0, false, 0.0, ""});

  const auto g = granulate(m);
  const auto outcome = solve_assignment(build_matrix(g));
  const auto sched = build_schedule(5, 5, {}, 0, 3);
  const auto ops = build_operator_schedule(outcome, 0.5, CycleOrder::shuffled, 3);
  RunConfig rc;
  rc.tol = 1e-8;
  rc.record_trace = false;
  const auto result = run(outcome, sched, ops, rc);
  REQUIRE(result.status == RunStatus::converged);

  const auto report =
      economic_report(settle(outcome, result.payoff, g, 1e-8), g);
  CHECK(report.grid_sold_kwh == 0.0);
  CHECK(report.grid_bought_kwh == 0.0);
  CHECK(report.internal_kwh == doctest::Approx(5.0));
  // unit contracts fold back into the two parents per side
  CHECK(report.sellers.size() == 2);
  CHECK(report.buyers.size() == 2);
}
