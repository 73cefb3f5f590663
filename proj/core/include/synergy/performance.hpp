#pragma once

// Optimal multimodal classifier accuracy from total-information bounds:
// exponential lower bound, Fano-style upper bound, and the midpoint summary.

#include "synergy/bounds.hpp"
#include "synergy/dist_core.hpp"
#include "synergy/pid.hpp"

#include <optional>
#include <utility>

namespace synergy {

struct PerformanceBounds {
  double p_lower = 0.0;
  double p_upper = 0.0;          // raw, may exceed 1
  double p_upper_clamped = 0.0;  // min(p_upper, 1)
  double p_m_hat = 0.0;          // (p_lower + raw p_upper) / 2
  double i_lower = 0.0;
  double i_upper = 0.0;
  double h_y = 0.0;
  int y_cardinality = 0;
  // Total variation of p(y) from uniform when p(y) was supplied; the upper
  // bound's derivation leans on near-uniform Y, so large values are flagged.
  std::optional<double> y_tv_from_uniform;
  bool uniform_y_strained = false;  // set when the TV above exceeds 0.05
};

// (p_lower, p_upper) = (2^(i - H(Y)), (i + 1) / log2 |Y|), unclamped.
std::pair<double, double> accuracy_bounds(double i_bits, double h_y_bits,
                                          int y_cardinality);

// (i_lower, i_upper) = (R + U1 + U2 + max(0, s_lower), R + U1 + U2 + s_upper).
std::pair<double, double> total_information_window(const PidResult& rui,
                                                   const SynergyBounds& sb);

PerformanceBounds estimate_pm(double i_lower, double i_upper, double h_y_bits,
                              int y_cardinality);

// Same, with H(Y)/|Y| derived from p(y) and the uniformity metadata filled in.
PerformanceBounds estimate_pm(double i_lower, double i_upper, const Eigen::VectorXd& p_y);

// Sum over (x1,x2) of max_y p(x1,x2,y): the exact accuracy of the Bayes
// predictor that sees both modalities.
double exact_bayes_accuracy(const DiscreteJoint& j);

}  // namespace synergy
