// Market participants, grid tariffs, bilateral contract values and the
// packet granulation used by the multi-contract market mode.
#pragma once

#include <string>
#include <vector>

namespace p2pmkt {

// Grid tariffs per kWh: the grid buys prosumer surplus at `buy` and sells
// energy at `sell`, with 0 <= buy < sell. Every viable bilateral trade
// happens strictly inside this band, which is what makes the market
// attractive to both sides.
struct GridPrices {
  double buy = 0.0;
  double sell = 0.0;
};

struct SellerOffer {
  std::string id;
  double reservation_price = 0.0;  // minimum acceptable price per kWh
  double supply = 0.0;             // kWh offered this slot
  bool green = false;              // renewable source
  double rating = 0.0;             // user rating in [0, 5]
  std::string parent;              // granulation parent id, empty if none
};

struct BuyerBid {
  std::string id;
  double base_price = 0.0;      // per kWh before preference scaling
  double demand = 0.0;          // kWh requested this slot
  int green_concern = 0;        // environmental preference weight in {0..5}
  bool rating_concern = false;  // whether seller rating matters to the buyer
  std::string parent;           // granulation parent id, empty if none
};

struct MarketInstance {
  std::vector<BuyerBid> buyers;
  std::vector<SellerOffer> sellers;
  GridPrices grid;
  double unit_size = 1.0;  // granulation packet size, kWh
};

// A data-level validation finding; violations are reported, not thrown.
struct Violation {
  std::string agent_id;
  std::string message;
};

// Multiplier a buyer applies to its base price for a given seller.
// Always >= 1; exactly 1 when the buyer is indifferent to energy source
// and seller rating.
double preference_factor(const BuyerBid& buyer, const SellerOffer& seller);

// Surplus of a bilateral contract: the per-kWh price gap (floored at zero)
// times the tradable quantity min(supply, demand).
double contract_value(const BuyerBid& buyer, const SellerOffer& seller);

// Checks grid ordering, id uniqueness, field ranges, and the price-band
// conditions: every effective bid must lie in (grid.buy, grid.sell] and
// every reservation price in [grid.buy, grid.sell). Returns an empty list
// when the instance is sound.
std::vector<Violation> validate_instance(const MarketInstance& m);

// Splits each participant into packet-sized unit agents ("B1#0", "B1#1",
// ...). The number of packets is rounded up and the last packet's quantity
// is capped at the remainder, so per-parent totals are preserved exactly.
// Throws std::invalid_argument when unit_size is not positive.
MarketInstance granulate(const MarketInstance& m);

}  // namespace p2pmkt
