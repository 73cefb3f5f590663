#pragma once

// Partial information decomposition of I({X1,X2};Y) into redundant, unique
// and synergistic parts, following the maximum-conditional-entropy surrogate
// q*: R, U1, U2 are read off q*, and S needs the full joint.

#include "synergy/dist_core.hpp"
#include "synergy/maxent.hpp"

#include <optional>

namespace synergy {

struct PidResult {
  double r = 0.0;
  double u1 = 0.0;
  double u2 = 0.0;
  std::optional<double> s;                  // absent in the marginals-only path
  std::optional<double> total_information;  // I_p({X1,X2};Y), absent likewise
  double q_objective = 0.0;                 // H_{q*}(Y|X1,X2)
  double residual = 0.0;
  bool converged = false;

  // Values before tiny negatives (>= -1e-8) are rounded up to zero.
  double r_raw = 0.0;
  double u1_raw = 0.0;
  double u2_raw = 0.0;
  std::optional<double> s_raw;
};

// R, U1, U2 from the pairwise marginals m1, m2 alone (m12 unused here).
PidResult compute_rui(const PairwiseMarginals& m, const SolverConfig& cfg = {});

// Full decomposition; also reports S and I_p({X1,X2};Y).
PidResult compute_pid_full(const DiscreteJoint& j, const SolverConfig& cfg = {});

}  // namespace synergy
