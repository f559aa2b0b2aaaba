// Assignment matrix construction and maximum-weight one-to-one matching.
#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "p2pmkt/market.hpp"

namespace p2pmkt {

struct AssignmentMatrix {
  Eigen::MatrixXd values;  // buyers x sellers, nonnegative contract values
  std::vector<std::string> buyer_ids;   // row order
  std::vector<std::string> seller_ids;  // column order
};

// One-to-one (partial) matching; pairs are (buyer row, seller column),
// sorted ascending, and never include zero-value entries.
struct Matching {
  std::vector<std::pair<int, int>> pairs;
  double value = 0.0;
};

struct AssignmentOutcome {
  AssignmentMatrix matrix;
  Matching optimal;
  double grand_value = 0.0;  // welfare of the optimal matching
};

// Entry (i, j) = contract_value(buyer i, seller j). Throws when
// validate_instance reports violations.
AssignmentMatrix build_matrix(const MarketInstance& m);

// Maximum-weight matching via shortest augmenting paths (Kuhn-Munkres
// family), followed by a deterministic tie-break: among equally optimal
// matchings, the lexicographically smallest pair list by (buyer, seller)
// index is returned.
AssignmentOutcome solve_assignment(const AssignmentMatrix& matrix);

// Optimal matching welfare restricted to the given buyer/seller id
// subsets. Either side empty yields 0. Unknown or repeated ids throw.
double coalition_value(const AssignmentMatrix& matrix,
                       const std::vector<std::string>& buyers,
                       const std::vector<std::string>& sellers);

// Exhaustive-enumeration oracle, capped at min(rows, cols) <= 8.
AssignmentOutcome brute_force_assignment(const AssignmentMatrix& matrix);

}  // namespace p2pmkt
