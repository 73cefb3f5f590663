#pragma once

// From raw feature vectors to the discrete pairwise marginals: PCA + k-means
// discretization per modality, empirical counting over the three datasets,
// and reconciliation of the (noisy) shared marginals.

#include "synergy/dist_core.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace synergy {

struct Discretizer {
  Eigen::VectorXd mean;        // feature-space center
  Eigen::MatrixXd projection;  // feature_dim x pca_dim, orthonormal columns
  Eigen::MatrixXd centroids;   // k x pca_dim, lexicographically sorted
  int k = 0;
  std::uint64_t seed = 0;

  int assign(const Eigen::VectorXd& x) const;  // nearest centroid
};

// PCA to pca_dim (capped by the data rank), then seeded k-means with
// farthest-first initialization; empty clusters are repaired by splitting the
// largest cluster at its farthest member.
Discretizer fit_discretizer(const std::vector<Eigen::VectorXd>& features, int k = 20,
                            int pca_dim = 16, std::uint64_t seed = 0);

struct EmpiricalMarginals {
  PairwiseMarginals marginals;  // normalized counts (after smoothing)
  Eigen::MatrixXd counts1;      // (cluster1, label) co-occurrence counts
  Eigen::MatrixXd counts2;
  Eigen::MatrixXd counts12;
  long long n1 = 0;  // |D1|
  long long n2 = 0;  // |D2|
  long long nm = 0;  // |DM|
  std::vector<long long> label_values;  // sorted distinct labels, index order
  double smoothing = 0.0;
};

// d1 = labeled modality-1 rows, d2 = labeled modality-2 rows, dm = unlabeled
// paired rows. Labels are arbitrary integers; both labeled sets must use the
// same label set.
EmpiricalMarginals build_marginals(const std::vector<Eigen::VectorXd>& x1,
                                   const std::vector<long long>& y1,
                                   const std::vector<Eigen::VectorXd>& x2,
                                   const std::vector<long long>& y2,
                                   const std::vector<Eigen::VectorXd>& xm1,
                                   const std::vector<Eigen::VectorXd>& xm2,
                                   const Discretizer& disc1, const Discretizer& disc2,
                                   double smoothing = 0.0);

// Shared-marginal gaps in total variation: p(y) between m1 and m2, p(x1)
// between m1 and m12, p(x2) between m2 and m12.
struct ConsistencyGaps {
  double p_y = 0.0;
  double p_x1 = 0.0;
  double p_x2 = 0.0;

  double max() const { return std::max(p_y, std::max(p_x1, p_x2)); }
};

ConsistencyGaps consistency_gaps(const PairwiseMarginals& m);

// If every shared marginal agrees within tolerance (total variation), rescale
// all three matrices toward the averaged shared marginals by iterative
// proportional fitting until the PairwiseMarginals invariants hold at 1e-9.
// Otherwise throws InconsistentDataError naming the worst marginal.
PairwiseMarginals reconcile(const EmpiricalMarginals& em, double tolerance);

}  // namespace synergy
