#pragma once

// Min-entropy coupling machinery: the majorization greatest lower bound
// p ∧ q, its entropy, and a greedy coupling that lands within one bit of it.

#include "synergy/dist_core.hpp"

#include <Eigen/Dense>

#include <array>

namespace synergy {

struct CouplingResult {
  Eigen::MatrixXd matrix;   // |p| x |q|, original index order
  double entropy_bits = 0.0;
  double glb_entropy_bits = 0.0;
  double gap_bits = 0.0;
};

// Which of the three pairwise glb terms attains the max in
// min_joint_entropy_lower_bound.
struct MinJointEntropyBound {
  double bits = 0.0;
  int winner = 0;  // 0: (m12, p(y)), 1: (m1, p(x2)), 2: (m2, p(x1))
  std::array<double, 3> terms{};
};

// Greatest lower bound p ∧ q in the majorization order: both inputs are
// sorted non-increasing, the shorter padded with zeros, then
// a_i = min(P_i, Q_i) - min(P_{i-1}, Q_{i-1}) over the prefix sums.
MarginalDistribution majorization_glb(const MarginalDistribution& p,
                                      const MarginalDistribution& q);

double glb_entropy(const MarginalDistribution& p, const MarginalDistribution& q);

// Greedy approximate min-entropy coupling: repeatedly pair the largest
// remaining masses. Ties break toward the lowest index after sorting.
CouplingResult greedy_coupling(const MarginalDistribution& p, const MarginalDistribution& q);

// max over the three pairwise couplings of glb_entropy, a lower bound on
// min_{r in Δp1,2,12} H_r(X1,X2,Y).
MinJointEntropyBound min_joint_entropy_lower_bound(const PairwiseMarginals& m);

}  // namespace synergy
