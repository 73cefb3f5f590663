#pragma once

// Constrained max-entropy programs over three-axis joints:
//   q* = argmax H_q(Y|X1,X2)  s.t.  q(x1,y) = m1, q(x2,y) = m2
//   r* = argmax H_r(X1|X2,Y)  s.t.  r(x1,y) = m1, r(x1,x2) = m12
// Both are concave maximizations over a polytope, solved by an augmented
// Lagrangian with the joint parameterized through a normalized exponential
// map (log domain), inner steps by L-BFGS with backtracking.

#include "synergy/dist_core.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace synergy {

struct SolverConfig {
  double marginal_tolerance = 1e-9;   // max-norm residual threshold
  double objective_tolerance = 1e-10; // relative objective-change stop
  int max_outer_iterations = 200;
  int max_inner_iterations = 500;
  double penalty_growth = 10.0;
  double initial_penalty = 1.0;
  unsigned long long seed = 0;        // reserved for randomized restarts
};

struct MaxEntSolution {
  DiscreteJoint q;
  double objective_bits = 0.0;
  double residual = 0.0;   // final max-norm constraint violation
  int iterations = 0;      // outer iterations
  bool converged = false;
  long long inner_iterations = 0;
  std::vector<double> residual_history;  // accepted outer iterates, non-increasing
};

class SolverError : public std::runtime_error {
public:
  SolverError(const std::string& what, MaxEntSolution best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const MaxEntSolution& best() const { return best_; }

private:
  MaxEntSolution best_;
};

MaxEntSolution solve_q_star(const Eigen::MatrixXd& m1, const Eigen::MatrixXd& m2,
                            const SolverConfig& cfg = {});

MaxEntSolution solve_r_star(const Eigen::MatrixXd& m1, const Eigen::MatrixXd& m12,
                            const SolverConfig& cfg = {});

enum class MaxEntObjective {
  y_given_x1x2,  // H(Y|X1,X2), constraints (m1, m2)
  x1_given_x2y,  // H(X1|X2,Y), constraints (m1, m12)
};

struct OracleResult {
  double objective_bits = 0.0;
  DiscreteJoint argmax;
  int polytope_dim = 0;
};

// Independent check: exhaustive grid search over the feasible polytope in its
// free (nullspace) coordinates, with local refinement around the best grid
// point. Guaranteed within O(grid_resolution) of the optimum by concavity.
// For y_given_x1x2 pass (m1, m2); for x1_given_x2y pass (m1, m12).
// Requires at most 16 atoms and polytope dimension at most 3.
OracleResult brute_force_oracle(const Eigen::MatrixXd& ma, const Eigen::MatrixXd& mb,
                                MaxEntObjective objective, double grid_resolution);

}  // namespace synergy
