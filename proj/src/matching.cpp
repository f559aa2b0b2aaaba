#include "p2pmkt/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace p2pmkt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest-augmenting-path assignment on a square cost matrix
// (minimisation with row/column potentials, O(n^3)).
void jv_assign(const Eigen::MatrixXd& cost, std::vector<int>& row_of_col) {
  const int n = static_cast<int>(cost.rows());
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  row_of_col.assign(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j]) row_of_col[j - 1] = p[j] - 1;
}

// Optimal matching welfare of a nonnegative value matrix (pads to square,
// negates, runs jv_assign, sums the selected entries).
double matching_value(const Eigen::MatrixXd& values) {
  const int nr = static_cast<int>(values.rows());
  const int nc = static_cast<int>(values.cols());
  if (nr == 0 || nc == 0) return 0.0;
  const int n = std::max(nr, nc);
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(n, n);
  cost.topLeftCorner(nr, nc) = -values;
  std::vector<int> row_of_col;
  jv_assign(cost, row_of_col);
  double total = 0.0;
  for (int j = 0; j < nc; ++j) {
    const int i = row_of_col[j];
    if (i >= 0 && i < nr) total += values(i, j);
  }
  return total;
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& values,
                          const std::vector<int>& rows,
                          const std::vector<int>& cols) {
  Eigen::MatrixXd out(static_cast<int>(rows.size()),
                      static_cast<int>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      out(static_cast<int>(r), static_cast<int>(c)) = values(rows[r], cols[c]);
  return out;
}

void check_entries(const AssignmentMatrix& matrix) {
  if (matrix.values.rows() != static_cast<long>(matrix.buyer_ids.size()) ||
      matrix.values.cols() != static_cast<long>(matrix.seller_ids.size()))
    throw std::invalid_argument("assignment matrix: id lists do not match dimensions");
  for (long i = 0; i < matrix.values.rows(); ++i)
    for (long j = 0; j < matrix.values.cols(); ++j) {
      const double v = matrix.values(i, j);
      if (!std::isfinite(v) || v < 0.0)
        throw std::invalid_argument("assignment matrix: entries must be finite and nonnegative");
    }
}

}  // namespace

AssignmentMatrix build_matrix(const MarketInstance& m) {
  const auto violations = validate_instance(m);
  if (!violations.empty()) {
    std::ostringstream os;
    os << "build_matrix: instance rejected with " << violations.size()
       << " violation(s):";
    for (const auto& v : violations) os << "\n  [" << v.agent_id << "] " << v.message;
    throw std::invalid_argument(os.str());
  }

  AssignmentMatrix out;
  out.values.resize(static_cast<long>(m.buyers.size()),
                    static_cast<long>(m.sellers.size()));
  for (std::size_t i = 0; i < m.buyers.size(); ++i) {
    out.buyer_ids.push_back(m.buyers[i].id);
    for (std::size_t j = 0; j < m.sellers.size(); ++j)
      out.values(static_cast<long>(i), static_cast<long>(j)) =
          contract_value(m.buyers[i], m.sellers[j]);
  }
  for (const auto& s : m.sellers) out.seller_ids.push_back(s.id);
  return out;
}

AssignmentOutcome solve_assignment(const AssignmentMatrix& matrix) {
  check_entries(matrix);
  const int nb = static_cast<int>(matrix.values.rows());
  const int ns = static_cast<int>(matrix.values.cols());

  const double total = matching_value(matrix.values);
  const double tol = 1e-9 * std::max(1.0, std::abs(total));

  // Deterministic tie-break: fix pairs greedily in (buyer, seller) index
  // order, keeping only choices that preserve the optimum. This yields the
  // lexicographically smallest optimal pair list.
  std::vector<int> rows, cols;
  for (int i = 0; i < nb; ++i) rows.push_back(i);
  for (int j = 0; j < ns; ++j) cols.push_back(j);

  Matching opt;
  double fixed = 0.0;
  for (int i = 0; i < nb; ++i) {
    rows.erase(std::find(rows.begin(), rows.end(), i));
    if (total - fixed <= tol) continue;  // only zero-value pairs remain
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const int j = cols[c];
      const double v = matrix.values(i, j);
      if (v <= 0.0) continue;
      std::vector<int> rest_cols = cols;
      rest_cols.erase(rest_cols.begin() + static_cast<long>(c));
      const double rest = matching_value(submatrix(matrix.values, rows, rest_cols));
      if (std::abs(fixed + v + rest - total) <= tol) {
        opt.pairs.emplace_back(i, j);
        fixed += v;
        cols = std::move(rest_cols);
        break;
      }
    }
  }
  opt.value = 0.0;
  for (const auto& [i, j] : opt.pairs) opt.value += matrix.values(i, j);
  if (std::abs(opt.value - total) > tol)
    throw std::logic_error("solve_assignment: tie-break lost optimality");

  return {matrix, opt, opt.value};
}

double coalition_value(const AssignmentMatrix& matrix,
                       const std::vector<std::string>& buyers,
                       const std::vector<std::string>& sellers) {
  check_entries(matrix);
  std::unordered_map<std::string, int> buyer_index, seller_index;
  for (std::size_t i = 0; i < matrix.buyer_ids.size(); ++i)
    buyer_index[matrix.buyer_ids[i]] = static_cast<int>(i);
  for (std::size_t j = 0; j < matrix.seller_ids.size(); ++j)
    seller_index[matrix.seller_ids[j]] = static_cast<int>(j);

  const auto to_indices = [](const std::vector<std::string>& ids,
                             const std::unordered_map<std::string, int>& index,
                             const char* side) {
    std::vector<int> out;
    std::vector<char> seen(index.size(), 0);
    for (const auto& id : ids) {
      const auto it = index.find(id);
      if (it == index.end())
        throw std::invalid_argument(std::string("coalition_value: unknown ") +
                                    side + " id '" + id + "'");
      if (seen[static_cast<std::size_t>(it->second)])
        throw std::invalid_argument(std::string("coalition_value: repeated ") +
                                    side + " id '" + id + "'");
      seen[static_cast<std::size_t>(it->second)] = 1;
      out.push_back(it->second);
    }
    return out;
  };

  const auto rows = to_indices(buyers, buyer_index, "buyer");
  const auto cols = to_indices(sellers, seller_index, "seller");
  if (rows.empty() || cols.empty()) return 0.0;  // one-sided coalitions
  return matching_value(submatrix(matrix.values, rows, cols));
}

namespace {

struct BruteState {
  const Eigen::MatrixXd* values = nullptr;
  std::vector<char> used_col;
  std::vector<std::pair<int, int>> current, best;
  double best_value = 0.0;
};

void brute_recurse(BruteState& st, int row, double sum) {
  const int nr = static_cast<int>(st.values->rows());
  if (row == nr) {
    if (sum > st.best_value) {
      st.best_value = sum;
      st.best = st.current;
    }
    return;
  }
  brute_recurse(st, row + 1, sum);  // leave this row unmatched
  const int nc = static_cast<int>(st.values->cols());
  for (int j = 0; j < nc; ++j) {
    if (st.used_col[static_cast<std::size_t>(j)]) continue;
    const double v = (*st.values)(row, j);
    if (v <= 0.0) continue;  // zero pairs never improve the welfare
    st.used_col[static_cast<std::size_t>(j)] = 1;
    st.current.emplace_back(row, j);
    brute_recurse(st, row + 1, sum + v);
    st.current.pop_back();
    st.used_col[static_cast<std::size_t>(j)] = 0;
  }
}

}  // namespace

AssignmentOutcome brute_force_assignment(const AssignmentMatrix& matrix) {
  check_entries(matrix);
  const int nb = static_cast<int>(matrix.values.rows());
  const int ns = static_cast<int>(matrix.values.cols());
  if (std::min(nb, ns) > 8)
    throw std::invalid_argument("brute_force_assignment: instance above the enumeration cap (min side > 8)");

  const bool transposed = nb > ns;
  const Eigen::MatrixXd work =
      transposed ? Eigen::MatrixXd(matrix.values.transpose()) : matrix.values;

  BruteState st;
  st.values = &work;
  st.used_col.assign(static_cast<std::size_t>(work.cols()), 0);
  brute_recurse(st, 0, 0.0);

  Matching opt;
  for (auto [r, c] : st.best)
    opt.pairs.emplace_back(transposed ? c : r, transposed ? r : c);
  std::sort(opt.pairs.begin(), opt.pairs.end());
  opt.value = st.best_value;
  return {matrix, opt, st.best_value};
}

}  // namespace p2pmkt
