// Test-only numeric oracles, kept independent of the closed-form
// implementation paths they are used to check.
#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "p2pmkt/core_geometry.hpp"

namespace p2pmkt::testing {

// Projection onto one half-space via its scalar dual: the Lagrangian
// minimiser is y(mu) = x + (mu / 2) e, and the concave dual
// g(mu) = mu (offset - e.x) - mu^2 |e|^2 / 4 is maximised by golden-section
// search (mu >= 0 for inequalities, free for hyperplanes). No use of the
// closed-form projection formula.
inline Eigen::VectorXd halfspace_projection_oracle(const Eigen::VectorXd& x,
                                                   const HalfSpace& h) {
  const double gap = h.offset - h.normal.dot(x);
  const double nsq = h.normal.squaredNorm();
  const double reach = std::max(1.0, 4.0 * std::abs(gap) / nsq);
  double lo = h.kind == ConstraintKind::hyperplane ? -reach : 0.0;
  double hi = reach;

  const auto dual = [&](double mu) { return mu * gap - mu * mu * nsq / 4.0; };
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  for (int it = 0; it < 300 && (b - a) > 1e-14 * reach; ++it) {
    if (dual(c) < dual(d)) {
      a = c;
      c = d;
      d = a + phi * (b - a);
    } else {
      b = d;
      d = c;
      c = b - phi * (b - a);
    }
  }
  const double mu = 0.5 * (a + b);
  return x + (mu / 2.0) * h.normal;
}

// Direct minimisation of F(y) = sum_i |x_i - y|^2 over the core by
// projected gradient descent; returns sqrt(min F), i.e. the distance from
// the stacked state to the consensus-on-core target set, without using the
// mean/variance decomposition.
inline double direct_product_distance(const Eigen::MatrixXd& proposals,
                                      const CoreDescription& core,
                                      double proj_tol = 1e-12) {
  const long n = proposals.rows();
  const Eigen::VectorXd mean = proposals.colwise().mean().transpose();
  Eigen::VectorXd y = dykstra_project(Eigen::VectorXd::Zero(proposals.cols()),
                                      core.constraints, proj_tol, 20000);
  for (int it = 0; it < 2000; ++it) {
    // grad F = 2 n (y - mean); step 1/(4n) halves the gap per iteration
    const Eigen::VectorXd next = dykstra_project(
        y - 0.5 * (y - mean), core.constraints, proj_tol, 20000);
    const double change = (next - y).norm();
    y = next;
    if (change < 1e-13) break;
  }
  double f = 0.0;
  for (long i = 0; i < n; ++i)
    f += (proposals.row(i).transpose() - y).squaredNorm();
  return std::sqrt(f);
}

}  // namespace p2pmkt::testing
