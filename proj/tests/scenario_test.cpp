#include <doctest.h>

#include <cmath>
#include <sstream>

#include "p2pmkt/json_io.hpp"
#include "p2pmkt/scenario.hpp"

using namespace p2pmkt;

TEST_CASE("scenario generation") {
  ScenarioConfig cfg;
  cfg.seed = 1;
  const auto m = generate_scenario(cfg);

  REQUIRE(m.buyers.size() == 4);
  REQUIRE(m.sellers.size() == 4);
  // default panel: S1 and S3 sell green energy, B1 and B4 care about it
  CHECK(m.sellers[0].green);
  CHECK(!m.sellers[1].green);
  CHECK(m.sellers[2].green);
  CHECK(!m.sellers[3].green);
  CHECK(m.buyers[1].green_concern == 0);
  CHECK(m.buyers[2].rating_concern);
  CHECK(validate_instance(m).empty());

  SUBCASE("same seed reproduces the instance bit for bit") {
    const auto again = generate_scenario(cfg);
    CHECK(instance_to_json(m) == instance_to_json(again));
  }

  SUBCASE("different seeds differ") {
    cfg.seed = 2;
    CHECK(instance_to_json(m) != instance_to_json(generate_scenario(cfg)));
  }

  SUBCASE("draws stay in the configured ranges and always validate") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      ScenarioConfig c;
      c.seed = seed;
      const auto inst = generate_scenario(c);
      CHECK(validate_instance(inst).empty());
      for (const auto& b : inst.buyers) {
        CHECK(b.demand >= 2.0);
        CHECK(b.demand <= 8.0);
      }
      for (const auto& s : inst.sellers) {
        CHECK(s.supply >= 2.0);
        CHECK(s.supply <= 8.0);
        CHECK(s.rating >= 3.0);
        CHECK(s.rating <= 5.0);
      }
    }
  }

  SUBCASE("impossible price bands are reported") {
    cfg.grid = {0.05, 0.051};
    CHECK_THROWS(generate_scenario(cfg));
  }
}

TEST_CASE("batch runs") {
  ScenarioConfig cfg;
  cfg.seed = 31;

  SUBCASE("a batch of one matches the single scenario") {
    const auto batch = run_batch(cfg, 1);
    REQUIRE(batch.scenarios.size() == 1);
    CHECK(batch.converged == 1);
    ScenarioConfig single = cfg;
    single.seed = batch.scenarios[0].seed;
    const auto r = run_scenario(single);
    CHECK(batch.scenarios[0].iterations == r.run.iterations);
    REQUIRE(!batch.trajectory.empty());
    CHECK(batch.trajectory.front().mean ==
          doctest::Approx(r.run.trace.rows.front().dist_ratio));
  }

  SUBCASE("envelopes bracket the mean pointwise") {
    const auto batch = run_batch(cfg, 5);
    CHECK(batch.converged == 5);
    for (const auto& p : batch.trajectory) {
      CHECK(p.min <= p.mean + 1e-15);
      CHECK(p.mean <= p.max + 1e-15);
    }
  }

  SUBCASE("deterministic given the config") {
    const auto a = run_batch(cfg, 3);
    const auto b = run_batch(cfg, 3);
    CHECK(batch_to_json(a) == batch_to_json(b));
  }
}

TEST_CASE("benchmark") {
  ScenarioConfig cfg;
  cfg.seed = 17;
  cfg.n_buyers = 1;
  cfg.n_sellers = 1;
  const auto result = benchmark(cfg);
  // the degenerate market is reported, not asserted, beyond basic sanity
  CHECK(result.half_step_ns > 0.0);
  CHECK(result.full_step_ns > 0.0);
  CHECK(result.speedup > 0.0);
  CHECK(result.half_iters_ratio_1e4 >= 0);
}

TEST_CASE("serialization") {
  ScenarioConfig cfg;
  cfg.seed = 8;

  SUBCASE("instances round-trip through JSON") {
    const auto m = generate_scenario(cfg);
    const auto back = instance_from_json(instance_to_json(m));
    CHECK(instance_to_json(back) == instance_to_json(m));
    CHECK(back.buyers[2].base_price == m.buyers[2].base_price);
    CHECK(back.sellers[1].rating == m.sellers[1].rating);
  }

  SUBCASE("payoff vectors round-trip") {
    const auto r = run_scenario(cfg);
    const auto ids = stacked_agent_ids(r.outcome);
    const auto j = payoff_to_json(r.run, ids);
    const auto x = payoff_from_json(j);
    CHECK((x - r.run.payoff).norm() == 0.0);
    CHECK(j.at("status") == "converged");
  }

  SUBCASE("trace CSV carries the documented columns") {
    const auto r = run_scenario(cfg);
    std::ostringstream os;
    write_trace_csv(os, r.run.trace);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    CHECK(header == "k,consensus_spread,core_dist_mean,dist_ratio,step_wall_ns");
    std::size_t lines = 0;
    for (std::string line; std::getline(is, line);) ++lines;
    CHECK(lines == r.run.trace.rows.size());
  }

  SUBCASE("outcome, core, contracts and report serialize") {
    const auto r = run_scenario(cfg);
    CHECK(outcome_to_json(r.outcome).contains("pairs"));
    const auto core = core_constraints(r.outcome);
    const auto cj = core_to_json(core, stacked_agent_ids(r.outcome));
    CHECK(cj.at("constraints").size() == core.constraints.size());
    CHECK(contracts_to_json(r.contracts).is_array());
    CHECK(report_to_json(r.report).contains("satisfaction"));
    CHECK(config_to_json(cfg).at("mode") == "single");
  }
}
