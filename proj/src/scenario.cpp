#include "p2pmkt/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "p2pmkt/rng.hpp"

namespace p2pmkt {

std::vector<BuyerProfile> default_buyer_profiles() {
  return {{true, false}, {false, false}, {false, true}, {true, true}};
}

std::vector<SellerProfile> default_seller_profiles() {
  return {{true}, {false}, {true}, {false}};
}

MarketInstance generate_scenario(const ScenarioConfig& cfg) {
  if (cfg.n_buyers < 0 || cfg.n_sellers < 0)
    throw std::invalid_argument("generate_scenario: negative market size");
  if (!(cfg.range_lo >= 0.0 && cfg.range_lo <= cfg.range_hi))
    throw std::invalid_argument("generate_scenario: bad energy range");
  if (!(cfg.grid.buy >= 0.0 && cfg.grid.buy < cfg.grid.sell))
    throw std::invalid_argument("generate_scenario: bad grid prices");
  if (!(cfg.price_margin > 0.0))
    throw std::invalid_argument("generate_scenario: price_margin must be positive");

  const auto buyer_profiles =
      cfg.buyer_profiles.empty() ? default_buyer_profiles() : cfg.buyer_profiles;
  const auto seller_profiles = cfg.seller_profiles.empty()
                                   ? default_seller_profiles()
                                   : cfg.seller_profiles;

  Rng rng(derive_seed(cfg.seed, 0));
  MarketInstance m;
  m.grid = cfg.grid;
  m.unit_size = cfg.unit_size;

  // draw order is part of the reproducibility contract: sellers first
  // (rating, supply, price), then buyers (concern, demand, price)
  for (int j = 0; j < cfg.n_sellers; ++j) {
    const auto& profile =
        seller_profiles[static_cast<std::size_t>(j) % seller_profiles.size()];
    SellerOffer s;
    s.id = "S" + std::to_string(j + 1);
    s.green = profile.green;
    s.rating = rng.uniform(3.0, 5.0);
    s.supply = rng.uniform(cfg.range_lo, cfg.range_hi);
    s.reservation_price =
        rng.uniform(cfg.grid.buy, cfg.grid.sell - cfg.price_margin);
    m.sellers.push_back(std::move(s));
  }

  for (int i = 0; i < cfg.n_buyers; ++i) {
    const auto& profile =
        buyer_profiles[static_cast<std::size_t>(i) % buyer_profiles.size()];
    BuyerBid b;
    b.id = "B" + std::to_string(i + 1);
    b.green_concern =
        profile.env_concern ? static_cast<int>(rng.uniform_int(0, 5)) : 0;
    b.rating_concern = profile.rating_concern;
    b.demand = rng.uniform(cfg.range_lo, cfg.range_hi);

    // the base price must keep every effective bid inside (grid.buy,
    // grid.sell]; the strongest preference factor over the actual sellers
    // caps it from above
    double max_factor = 1.0;
    for (const auto& s : m.sellers)
      max_factor = std::max(max_factor, preference_factor(b, s));
    const double lo = cfg.grid.buy + cfg.price_margin;
    const double hi = cfg.grid.sell / max_factor;
    if (lo > hi) {
      std::ostringstream os;
      os << "generate_scenario: price band (" << cfg.grid.buy << ", "
         << cfg.grid.sell << "] too narrow for preference factor " << max_factor;
      throw std::runtime_error(os.str());
    }
    b.base_price = rng.uniform(lo, hi);
    m.buyers.push_back(std::move(b));
  }

  const auto violations = validate_instance(m);
  if (!violations.empty())
    throw std::logic_error("generate_scenario: generated instance invalid: " +
                           violations.front().message);
  return m;
}

namespace {

RunConfig run_config_from(const ScenarioConfig& cfg) {
  RunConfig rc;
  rc.tol = cfg.tol;
  rc.max_iters = cfg.max_iters;
  rc.init = cfg.init;
  rc.init_seed = derive_seed(cfg.seed, 3);
  rc.record_trace = cfg.record_trace;
  rc.dist_every = cfg.dist_every;
  rc.dist_tol = cfg.dist_tol;
  return rc;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  ScenarioResult r;
  r.base = generate_scenario(cfg);
  r.market = cfg.mode == MarketMode::multi_contract ? granulate(r.base) : r.base;
  r.outcome = solve_assignment(build_matrix(r.market));

  const int nb = static_cast<int>(r.outcome.matrix.buyer_ids.size());
  const int ns = static_cast<int>(r.outcome.matrix.seller_ids.size());
  const auto schedule = build_schedule(nb, ns, cfg.edges, cfg.q_window,
                                       derive_seed(cfg.seed, 1));
  const auto ops = build_operator_schedule(r.outcome, cfg.beta, cfg.order,
                                           derive_seed(cfg.seed, 2));
  r.run = run(r.outcome, schedule, ops, run_config_from(cfg));

  if (r.run.status == RunStatus::converged) {
    r.contracts = settle(r.outcome, r.run.payoff, r.market, cfg.tol);
    r.report = economic_report(r.contracts, r.market);
  }
  return r;
}

BatchResult run_batch(const ScenarioConfig& cfg, int n_scenarios) {
  if (n_scenarios < 0)
    throw std::invalid_argument("run_batch: negative scenario count");

  BatchResult batch;
  std::vector<std::vector<double>> ratio_series;
  double seller_delta_sum = 0.0, buyer_delta_sum = 0.0;
  long seller_count = 0, buyer_count = 0;

  for (int s = 0; s < n_scenarios; ++s) {
    ScenarioConfig scfg = cfg;
    scfg.seed = derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(s));
    ScenarioSummary summary;
    summary.index = s;
    summary.seed = scfg.seed;
    try {
      const ScenarioResult r = run_scenario(scfg);
      summary.status = r.run.status;
      summary.iterations = r.run.iterations;
      summary.final_spread = r.run.final_spread;
      summary.final_violation = r.run.final_violation;
      summary.grand_value = r.outcome.grand_value;
      summary.satisfaction = r.report.satisfaction;
      if (r.run.status == RunStatus::converged) {
        ++batch.converged;
        for (const auto& [id, agent] : r.report.sellers) {
          seller_delta_sum += agent.delta;
          ++seller_count;
        }
        for (const auto& [id, agent] : r.report.buyers) {
          buyer_delta_sum += agent.delta;
          ++buyer_count;
        }
        batch.internal_kwh += r.report.internal_kwh;
        batch.grid_sold_kwh += r.report.grid_sold_kwh;
        batch.grid_bought_kwh += r.report.grid_bought_kwh;
        batch.satisfaction_total += r.report.satisfaction;
      } else {
        std::ostringstream os;
        os << "scenario " << s << ": no convergence after "
           << r.run.iterations << " iterations (spread "
           << r.run.final_spread << ", violation " << r.run.final_violation
           << ")";
        batch.failures.push_back(os.str());
      }
      std::vector<double> ratios;
      for (const auto& row : r.run.trace.rows)
        if (!std::isnan(row.dist_ratio)) ratios.push_back(row.dist_ratio);
      if (!ratios.empty()) ratio_series.push_back(std::move(ratios));
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "scenario " << s << ": " << e.what();
      batch.failures.push_back(os.str());
    }
    batch.scenarios.push_back(summary);
  }

  if (seller_count > 0)
    batch.mean_seller_delta = seller_delta_sum / static_cast<double>(seller_count);
  if (buyer_count > 0)
    batch.mean_buyer_delta = buyer_delta_sum / static_cast<double>(buyer_count);

  // pointwise envelope; finished runs carry their last ratio forward
  std::size_t longest = 0;
  for (const auto& s : ratio_series) longest = std::max(longest, s.size());
  for (std::size_t k = 0; k < longest; ++k) {
    TrajectoryPoint p;
    p.k = static_cast<long>(k);
    p.min = std::numeric_limits<double>::infinity();
    p.max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const auto& s : ratio_series) {
      const double v = k < s.size() ? s[k] : s.back();
      sum += v;
      p.min = std::min(p.min, v);
      p.max = std::max(p.max, v);
    }
    p.mean = sum / static_cast<double>(ratio_series.size());
    batch.trajectory.push_back(p);
  }
  return batch;
}

namespace {

long first_ratio_below(const NegotiationTrace& trace, double threshold) {
  for (const auto& row : trace.rows)
    if (!std::isnan(row.dist_ratio) && row.dist_ratio <= threshold) return row.k;
  return -1;
}

double mean_step_ns(const NegotiationTrace& trace) {
  double sum = 0.0;
  long count = 0;
  for (const auto& row : trace.rows) {
    if (row.k == 0) continue;  // no step produced the initial state
    sum += static_cast<double>(row.step_wall_ns);
    ++count;
  }
  return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

}  // namespace

BenchmarkResult benchmark(const ScenarioConfig& cfg,
                          const std::vector<int>& sizes) {
  ScenarioConfig base = cfg;
  base.record_trace = true;
  if (base.dist_every <= 0) base.dist_every = 1;

  const MarketInstance instance =
      base.mode == MarketMode::multi_contract ? granulate(generate_scenario(base))
                                              : generate_scenario(base);
  const AssignmentOutcome outcome = solve_assignment(build_matrix(instance));
  const int nb = static_cast<int>(outcome.matrix.buyer_ids.size());
  const int ns = static_cast<int>(outcome.matrix.seller_ids.size());
  const auto schedule =
      build_schedule(nb, ns, base.edges, base.q_window, derive_seed(base.seed, 1));
  const auto ops = build_operator_schedule(outcome, base.beta, base.order,
                                           derive_seed(base.seed, 2));

  RunConfig half_cfg = run_config_from(base);
  RunConfig full_cfg = half_cfg;
  full_cfg.project_full_set = true;

  const RunResult half = run(outcome, schedule, ops, half_cfg);
  const RunResult full = run(outcome, schedule, ops, full_cfg);

  BenchmarkResult result;
  result.half_step_ns = mean_step_ns(half.trace);
  result.full_step_ns = mean_step_ns(full.trace);
  result.speedup = result.half_step_ns > 0.0
                       ? result.full_step_ns / result.half_step_ns
                       : 0.0;
  result.half_iters_ratio_1e4 = first_ratio_below(half.trace, 1e-4);
  result.full_iters_ratio_1e4 = first_ratio_below(full.trace, 1e-4);
  if (!(result.half_step_ns < result.full_step_ns))
    throw std::runtime_error(
        "benchmark: half-space step is not faster than full-set projection");

  for (const int n_agents : sizes) {
    ScenarioConfig scfg = cfg;
    scfg.n_buyers = n_agents / 2;
    scfg.n_sellers = n_agents - scfg.n_buyers;
    scfg.record_trace = false;
    scfg.dist_every = 0;
    ScalingEntry entry;
    entry.n_agents = n_agents;
    const auto t0 = std::chrono::steady_clock::now();
    const ScenarioResult r = run_scenario(scfg);
    entry.wall_s = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
    entry.iterations = r.run.iterations;
    entry.converged = r.run.status == RunStatus::converged;
    entry.per_agent_s = entry.wall_s / static_cast<double>(n_agents);
    result.scaling.push_back(entry);
  }
  return result;
}

}  // namespace p2pmkt
