#include "synergy/bounds.hpp"

#include "synergy/pid.hpp"

#include <cmath>
#include <stdexcept>

namespace synergy {

namespace {

double matrix_mutual_info(const Eigen::MatrixXd& m) {
  Eigen::VectorXd rows = m.rowwise().sum();
  Eigen::VectorXd cols = m.colwise().sum();
  return entropy_bits(rows) + entropy_bits(cols) - entropy_bits(m);
}

void check_dcfg(const DisagreementConfig& dcfg) {
  if (!(dcfg.c_d >= 1.0)) {
    throw std::invalid_argument("DisagreementConfig: c_d must be >= 1");
  }
  if (!(dcfg.effective_c() > 0.0)) {
    throw std::invalid_argument("DisagreementConfig: c must be > 0");
  }
}

// H_p(Xi|Y) - max_r H_r(Xi|Xj,Y) for the Xi-centered relaxation, where mi is
// the (xi, y) marginal and pair is the (xi, xj) marginal.
double agreement_variant(const Eigen::MatrixXd& mi, const Eigen::MatrixXd& pair,
                         const SolverConfig& cfg, double* residual, bool* converged) {
  MaxEntSolution sol = solve_r_star(mi, pair, cfg);
  if (residual) *residual = sol.residual;
  if (converged) *converged = sol.converged;
  Eigen::VectorXd py = mi.colwise().sum();
  double h_i_given_y = entropy_bits(mi) - entropy_bits(py);
  return h_i_given_y - sol.objective_bits;
}

}  // namespace

double lower_bound_agreement(const PairwiseMarginals& m, const SolverConfig& cfg) {
  PidResult rui = compute_rui(m, cfg);
  double i12 = matrix_mutual_info(m.m12);
  double v1 = agreement_variant(m.m1, m.m12, cfg, nullptr, nullptr);
  double v2 = agreement_variant(m.m2, m.m12.transpose(), cfg, nullptr, nullptr);
  return rui.r - i12 + std::max(v1, v2);
}

double disagreement(const PairwiseMarginals& m, const DisagreementConfig& dcfg) {
  check_dcfg(dcfg);
  ConditionalTable c1 = conditionals_from_marginal(m.m1);
  ConditionalTable c2 = conditionals_from_marginal(m.m2);
  double alpha = 0.0;
  for (Eigen::Index i = 0; i < m.m12.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.m12.cols(); ++j) {
      double w = m.m12(i, j);
      if (w <= 0.0) continue;
      alpha += w * (c1.rows.row(i) - c2.rows.row(j)).squaredNorm();
    }
  }
  return alpha;
}

double lower_bound_disagreement(double alpha, double u1, double u2,
                                const DisagreementConfig& dcfg) {
  check_dcfg(dcfg);
  return dcfg.effective_c() * alpha - std::max(u1, u2);
}

double upper_bound(const PairwiseMarginals& m, const SolverConfig& cfg) {
  MaxEntSolution sol = solve_q_star(m.m1, m.m2, cfg);
  Eigen::VectorXd py = m.p_y();
  double h_y = entropy_bits(py);
  double i_q = h_y - sol.objective_bits;  // min over the polytope
  MinJointEntropyBound glb = min_joint_entropy_lower_bound(m);
  return entropy_bits(m.m12) + h_y - glb.bits - i_q;
}

SynergyBounds bounds_summary(const PairwiseMarginals& m, const SolverConfig& cfg,
                             const DisagreementConfig& dcfg) {
  m.validate(cfg.marginal_tolerance);
  check_dcfg(dcfg);

  SynergyBounds out;
  PidResult rui = compute_rui(m, cfg);
  out.r = rui.r;
  out.u1 = rui.u1;
  out.u2 = rui.u2;
  out.diagnostics.q_residual = rui.residual;
  out.diagnostics.q_converged = rui.converged;
  out.diagnostics.q_objective = rui.q_objective;

  double i12 = matrix_mutual_info(m.m12);
  out.diagnostics.s_agree_x1 =
      rui.r - i12 + agreement_variant(m.m1, m.m12, cfg, &out.diagnostics.r1_residual,
                                      &out.diagnostics.r1_converged);
  out.diagnostics.s_agree_x2 =
      rui.r - i12 + agreement_variant(m.m2, m.m12.transpose(), cfg,
                                      &out.diagnostics.r2_residual,
                                      &out.diagnostics.r2_converged);
  out.s_agree = std::max(out.diagnostics.s_agree_x1, out.diagnostics.s_agree_x2);

  out.alpha = disagreement(m, dcfg);
  out.c_effective = dcfg.effective_c();
  out.s_disagree = lower_bound_disagreement(out.alpha, rui.u1, rui.u2, dcfg);

  MinJointEntropyBound glb = min_joint_entropy_lower_bound(m);
  out.diagnostics.coupling_winner = glb.winner;
  out.diagnostics.coupling_terms = glb.terms;
  Eigen::VectorXd py = m.p_y();
  double h_y = entropy_bits(py);
  out.diagnostics.h_y = h_y;
  out.diagnostics.y_cardinality = static_cast<int>(py.size());
  double i_q = h_y - rui.q_objective;
  out.s_upper = entropy_bits(m.m12) + h_y - glb.bits - i_q;

  out.s_lower = std::max(out.s_agree, out.s_disagree);
  out.effective_lower = std::max(0.0, out.s_lower);
  return out;
}

}  // namespace synergy
