#include "synergy/performance.hpp"

#include <cmath>
#include <stdexcept>

namespace synergy {

std::pair<double, double> accuracy_bounds(double i_bits, double h_y_bits,
                                          int y_cardinality) {
  if (y_cardinality < 2) {
    throw std::invalid_argument("accuracy_bounds: y_cardinality must be >= 2");
  }
  double lower = std::exp2(i_bits - h_y_bits);
  double upper = (i_bits + 1.0) / std::log2(static_cast<double>(y_cardinality));
  return {lower, upper};
}

std::pair<double, double> total_information_window(const PidResult& rui,
                                                   const SynergyBounds& sb) {
  double base = rui.r + rui.u1 + rui.u2;
  return {base + std::max(0.0, sb.s_lower), base + sb.s_upper};
}

PerformanceBounds estimate_pm(double i_lower, double i_upper, double h_y_bits,
                              int y_cardinality) {
  PerformanceBounds out;
  out.i_lower = i_lower;
  out.i_upper = i_upper;
  out.h_y = h_y_bits;
  out.y_cardinality = y_cardinality;
  out.p_lower = accuracy_bounds(i_lower, h_y_bits, y_cardinality).first;
  out.p_upper = accuracy_bounds(i_upper, h_y_bits, y_cardinality).second;
  out.p_upper_clamped = std::min(out.p_upper, 1.0);
  out.p_m_hat = 0.5 * (out.p_lower + out.p_upper);
  return out;
}

PerformanceBounds estimate_pm(double i_lower, double i_upper, const Eigen::VectorXd& p_y) {
  int card = static_cast<int>(p_y.size());
  PerformanceBounds out = estimate_pm(i_lower, i_upper, entropy_bits(p_y), card);
  double tv = 0.0;
  double u = 1.0 / static_cast<double>(card);
  for (Eigen::Index k = 0; k < p_y.size(); ++k) tv += std::abs(p_y(k) - u);
  out.y_tv_from_uniform = 0.5 * tv;
  out.uniform_y_strained = *out.y_tv_from_uniform > 0.05;
  return out;
}

double exact_bayes_accuracy(const DiscreteJoint& j) {
  const Dims& d = j.dims();
  double acc = 0.0;
  for (int i = 0; i < d.n1; ++i) {
    for (int x2 = 0; x2 < d.n2; ++x2) {
      double best = 0.0;
      for (int k = 0; k < d.ny; ++k) best = std::max(best, j(i, x2, k));
      acc += best;
    }
  }
  return acc;
}

}  // namespace synergy
