#include "p2pmkt/market.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

namespace p2pmkt {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// smallest packet count n with n * unit >= total, robust to the usual
// division round-off on exactly divisible quantities
long packet_count(double total, double unit) {
  if (total <= 0.0) return 0;
  long n = static_cast<long>(std::floor(total / unit + 1e-9));
  if (static_cast<double>(n) * unit + 1e-9 * std::max(1.0, total) < total) ++n;
  return n;
}

}  // namespace

double preference_factor(const BuyerBid& buyer, const SellerOffer& seller) {
  const double green =
      seller.green ? static_cast<double>(buyer.green_concern) : 0.0;
  const double rating = buyer.rating_concern ? seller.rating : 0.0;
  return 1.0 + 0.1 * (green + rating);
}

double contract_value(const BuyerBid& buyer, const SellerOffer& seller) {
  const double margin =
      preference_factor(buyer, seller) * buyer.base_price -
      seller.reservation_price;
  const double quantity = std::min(seller.supply, buyer.demand);
  return std::max(0.0, margin) * quantity;
}

std::vector<Violation> validate_instance(const MarketInstance& m) {
  std::vector<Violation> out;
  const auto add = [&out](const std::string& id, std::string msg) {
    out.push_back({id, std::move(msg)});
  };

  if (!(m.grid.buy >= 0.0 && m.grid.buy < m.grid.sell))
    add("grid", "grid prices must satisfy 0 <= buy < sell, got buy=" +
                    fmt(m.grid.buy) + " sell=" + fmt(m.grid.sell));
  if (!(m.unit_size > 0.0))
    add("market", "unit_size must be positive, got " + fmt(m.unit_size));

  std::set<std::string> ids;
  for (const auto& b : m.buyers)
    if (!ids.insert(b.id).second) add(b.id, "duplicate agent id");
  for (const auto& s : m.sellers)
    if (!ids.insert(s.id).second) add(s.id, "duplicate agent id");

  for (const auto& b : m.buyers) {
    if (b.demand < 0.0) add(b.id, "demand must be nonnegative");
    if (b.green_concern < 0 || b.green_concern > 5)
      add(b.id, "green_concern must lie in {0..5}");
  }
  for (const auto& s : m.sellers) {
    if (s.supply < 0.0) add(s.id, "supply must be nonnegative");
    if (s.rating < 0.0 || s.rating > 5.0)
      add(s.id, "rating must lie in [0, 5]");
    if (!(s.reservation_price >= m.grid.buy &&
          s.reservation_price < m.grid.sell))
      add(s.id, "reservation price " + fmt(s.reservation_price) +
                    " must lie in [" + fmt(m.grid.buy) + ", " +
                    fmt(m.grid.sell) + ")");
  }

  // the effective-bid band is per pair: the preference factor can push a
  // valid base price past the grid's selling price
  for (const auto& b : m.buyers) {
    for (const auto& s : m.sellers) {
      const double bid = preference_factor(b, s) * b.base_price;
      if (!(bid > m.grid.buy && bid <= m.grid.sell))
        add(b.id, "effective bid " + fmt(bid) + " for seller " + s.id +
                      " must lie in (" + fmt(m.grid.buy) + ", " +
                      fmt(m.grid.sell) + "]");
    }
  }
  return out;
}

MarketInstance granulate(const MarketInstance& m) {
  if (!(m.unit_size > 0.0))
    throw std::invalid_argument("granulate: unit_size must be positive");

  MarketInstance g;
  g.grid = m.grid;
  g.unit_size = m.unit_size;
  const double unit = m.unit_size;

  for (const auto& b : m.buyers) {
    const long n = packet_count(b.demand, unit);
    for (long k = 0; k < n; ++k) {
      BuyerBid u = b;
      u.id = b.id + "#" + std::to_string(k);
      u.parent = b.parent.empty() ? b.id : b.parent;
      u.demand = (k + 1 < n) ? unit
                             : b.demand - unit * static_cast<double>(n - 1);
      g.buyers.push_back(std::move(u));
    }
  }
  for (const auto& s : m.sellers) {
    const long n = packet_count(s.supply, unit);
    for (long k = 0; k < n; ++k) {
      SellerOffer u = s;
      u.id = s.id + "#" + std::to_string(k);
      u.parent = s.parent.empty() ? s.id : s.parent;
      u.supply = (k + 1 < n) ? unit
                             : s.supply - unit * static_cast<double>(n - 1);
      g.sellers.push_back(std::move(u));
    }
  }
  return g;
}

}  // namespace p2pmkt
