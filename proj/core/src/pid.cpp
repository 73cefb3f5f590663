#include "synergy/pid.hpp"

namespace synergy {

namespace {

constexpr double kClampFloor = -1e-8;

double clamp_tiny(double v) { return v < 0.0 && v >= kClampFloor ? 0.0 : v; }

PidResult from_solution(const MaxEntSolution& sol) {
  PidResult out;
  out.r_raw = interaction_info(sol.q);
  out.u1_raw = conditional_mutual_info(sol.q, 0, 2, 1);
  out.u2_raw = conditional_mutual_info(sol.q, 1, 2, 0);
  out.r = clamp_tiny(out.r_raw);
  out.u1 = clamp_tiny(out.u1_raw);
  out.u2 = clamp_tiny(out.u2_raw);
  out.q_objective = sol.objective_bits;
  out.residual = sol.residual;
  out.converged = sol.converged;
  return out;
}

}  // namespace

PidResult compute_rui(const PairwiseMarginals& m, const SolverConfig& cfg) {
  return from_solution(solve_q_star(m.m1, m.m2, cfg));
}

PidResult compute_pid_full(const DiscreteJoint& j, const SolverConfig& cfg) {
  PairwiseMarginals m = pairwise_marginals(j);
  MaxEntSolution sol = solve_q_star(m.m1, m.m2, cfg);
  PidResult out = from_solution(sol);
  double total = mutual_info(j, {0, 1}, {2});
  double surrogate = mutual_info(sol.q, {0, 1}, {2});
  out.total_information = total;
  out.s_raw = total - surrogate;
  out.s = clamp_tiny(*out.s_raw);
  return out;
}

}  // namespace synergy
