#pragma once

// Synergy estimators that only touch the pairwise marginals: two lower
// bounds (agreement and disagreement flavored) and a min-entropy-coupling
// upper bound.

#include "synergy/coupling.hpp"
#include "synergy/dist_core.hpp"
#include "synergy/maxent.hpp"

#include <array>
#include <optional>

namespace synergy {

enum class DisagreementDistance {
  squared_euclidean,  // sum_y (p(y|x1) - p(y|x2))^2
};

struct DisagreementConfig {
  double c_d = 1.0;  // relaxed triangle-inequality constant, >= 1
  // Constant multiplying alpha in the disagreement lower bound. Unset means
  // the proof-faithful 1/(2*c_d).
  std::optional<double> c;
  DisagreementDistance distance = DisagreementDistance::squared_euclidean;

  double effective_c() const { return c ? *c : 1.0 / (2.0 * c_d); }
};

struct BoundsDiagnostics {
  double q_residual = 0.0;
  double r1_residual = 0.0;
  double r2_residual = 0.0;
  bool q_converged = false;
  bool r1_converged = false;
  bool r2_converged = false;
  double s_agree_x1 = 0.0;  // X1-centered relaxation
  double s_agree_x2 = 0.0;  // X2-centered relaxation
  double q_objective = 0.0;
  int coupling_winner = 0;
  std::array<double, 3> coupling_terms{};
  double h_y = 0.0;
  int y_cardinality = 0;
};

struct SynergyBounds {
  double s_agree = 0.0;
  double s_disagree = 0.0;
  double s_lower = 0.0;          // max(s_agree, s_disagree)
  double effective_lower = 0.0;  // max(0, s_lower)
  double s_upper = 0.0;
  double alpha = 0.0;
  double c_effective = 0.0;
  double r = 0.0;  // marginals-only decomposition feeding the bounds
  double u1 = 0.0;
  double u2 = 0.0;
  BoundsDiagnostics diagnostics;
};

// R - I_p(X1;X2) + (H_p(Xi|Y) - max_r H_r(Xi|Xj,Y)), maximized over the two
// symmetric relaxations of min_r I_r(X1;X2|Y).
double lower_bound_agreement(const PairwiseMarginals& m, const SolverConfig& cfg = {});

// alpha = E_{m12}[ d(p(y|x1), p(y|x2)) ].
double disagreement(const PairwiseMarginals& m, const DisagreementConfig& dcfg = {});

// c * alpha - max(u1, u2); may be negative, reported unclamped.
double lower_bound_disagreement(double alpha, double u1, double u2,
                                const DisagreementConfig& dcfg = {});

// H_p(X1,X2) + H_p(Y) - min_joint_entropy_lower_bound - min_q I_q({X1,X2};Y).
double upper_bound(const PairwiseMarginals& m, const SolverConfig& cfg = {});

SynergyBounds bounds_summary(const PairwiseMarginals& m, const SolverConfig& cfg = {},
                             const DisagreementConfig& dcfg = {});

}  // namespace synergy
