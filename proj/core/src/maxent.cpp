#include "synergy/maxent.hpp"

#include "synergy/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace synergy {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// Shared description of both programs: atoms over (x1, x2, y), a target axis
// whose conditional entropy is maximized, and two families of marginal cell
// constraints. Frozen atoms are those covered by a zero constraint cell.
struct Problem {
  Dims dims;
  int target_axis = 2;
  std::vector<int> free_atoms;                 // flat indices of free atoms
  struct Cell {
    double target = 0.0;
    std::vector<int> slots;                    // free-slot members
  };
  std::vector<Cell> cells;
  std::vector<std::array<int, 2>> slot_cells;  // exactly two constraint cells per slot
  std::vector<int> slot_fiber;                 // conditioning fiber per slot
  std::vector<std::vector<int>> fiber_slots;   // free slots per conditioning fiber
  int n_fibers = 0;
  std::vector<double> q0;                      // feasible interior start
};

void check_marginal_matrix(const Eigen::MatrixXd& m, const char* name, double mass_tol) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw std::invalid_argument(std::string(name) + ": empty matrix");
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    double v = m.data()[i];
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string(name) + ": entries must be finite and >= 0");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > mass_tol) {
    throw InfeasibleError(std::string(name) + ": total mass " + std::to_string(sum) +
                          " is not 1 within tolerance");
  }
}

// objective == y_given_x1x2: ma = m1 over (x1,y), mb = m2 over (x2,y).
// objective == x1_given_x2y: ma = m1 over (x1,y), mb = m12 over (x1,x2).
Problem build_problem(const Eigen::MatrixXd& ma, const Eigen::MatrixXd& mb,
                      MaxEntObjective objective, double tol) {
  const double mass_tol = std::max(tol, 1e-12);
  check_marginal_matrix(ma, "m1", mass_tol);
  check_marginal_matrix(mb, objective == MaxEntObjective::y_given_x1x2 ? "m2" : "m12", mass_tol);

  Problem pb;
  if (objective == MaxEntObjective::y_given_x1x2) {
    if (ma.cols() != mb.cols()) {
      throw std::invalid_argument("solve_q_star: m1 and m2 must share the y axis");
    }
    pb.dims = {static_cast<int>(ma.rows()), static_cast<int>(mb.rows()),
               static_cast<int>(ma.cols())};
    pb.target_axis = 2;
    Eigen::VectorXd pya = ma.colwise().sum(), pyb = mb.colwise().sum();
    double gap = (pya - pyb).cwiseAbs().maxCoeff();
    if (gap > tol) {
      throw InfeasibleError("solve_q_star: m1 and m2 disagree on p(y) by " +
                            std::to_string(gap));
    }
  } else {
    if (ma.rows() != mb.rows()) {
      throw std::invalid_argument("solve_r_star: m1 and m12 must share the x1 axis");
    }
    pb.dims = {static_cast<int>(ma.rows()), static_cast<int>(mb.cols()),
               static_cast<int>(ma.cols())};
    pb.target_axis = 0;
    Eigen::VectorXd pa = ma.rowwise().sum(), pbv = mb.rowwise().sum();
    double gap = (pa - pbv).cwiseAbs().maxCoeff();
    if (gap > tol) {
      throw InfeasibleError("solve_r_star: m1 and m12 disagree on p(x1) by " +
                            std::to_string(gap));
    }
  }

  const Dims d = pb.dims;
  auto flat = [&](int i, int j, int k) { return (i * d.n2 + j) * d.ny + k; };

  // Constraint cell of each atom within the two groups, and frozen detection.
  auto cell_a = [&](int i, int j, int k) {
    (void)j;
    return i * d.ny + k;  // (x1,y) cell in both programs
  };
  auto cell_b = [&](int i, int j, int k) {
    if (objective == MaxEntObjective::y_given_x1x2) return j * d.ny + k;  // (x2,y)
    (void)k;
    return i * d.n2 + j;  // (x1,x2)
  };
  auto target_a = [&](int c) { return ma(c / d.ny, c % d.ny); };
  auto target_b = [&](int c) {
    if (objective == MaxEntObjective::y_given_x1x2) return mb(c / d.ny, c % d.ny);
    return mb(c / d.n2, c % d.n2);
  };

  const int na = static_cast<int>(ma.size());
  const int nb = static_cast<int>(mb.size());
  std::vector<int> cell_index_a(na, -1), cell_index_b(nb, -1);
  std::vector<int> atom_slot(d.atoms(), -1);

  Eigen::VectorXd share;  // shared 1-d marginal used by the product start
  if (objective == MaxEntObjective::y_given_x1x2) {
    share = ma.colwise().sum();
  } else {
    share = ma.rowwise().sum();
  }

  for (int i = 0; i < d.n1; ++i) {
    for (int j = 0; j < d.n2; ++j) {
      for (int k = 0; k < d.ny; ++k) {
        int ca = cell_a(i, j, k), cb = cell_b(i, j, k);
        double ta = target_a(ca), tb = target_b(cb);
        if (ta <= 0.0 || tb <= 0.0) continue;  // frozen at zero
        int slot = static_cast<int>(pb.free_atoms.size());
        atom_slot[flat(i, j, k)] = slot;
        pb.free_atoms.push_back(flat(i, j, k));
        if (cell_index_a[ca] < 0) {
          cell_index_a[ca] = static_cast<int>(pb.cells.size());
          pb.cells.push_back({ta, {}});
        }
        if (cell_index_b[cb] < 0) {
          cell_index_b[cb] = static_cast<int>(pb.cells.size());
          pb.cells.push_back({tb, {}});
        }
        pb.cells[cell_index_a[ca]].slots.push_back(slot);
        pb.cells[cell_index_b[cb]].slots.push_back(slot);
        pb.slot_cells.push_back({cell_index_a[ca], cell_index_b[cb]});
        double s = objective == MaxEntObjective::y_given_x1x2 ? share(k) : share(i);
        pb.q0.push_back(ta * tb / s);
        // conditioning fiber: the two non-target coordinates
        int fiber = pb.target_axis == 2 ? i * d.n2 + j : j * d.ny + k;
        pb.slot_fiber.push_back(fiber);
      }
    }
  }
  pb.n_fibers = pb.target_axis == 2 ? d.n1 * d.n2 : d.n2 * d.ny;
  pb.fiber_slots.assign(static_cast<size_t>(pb.n_fibers), {});
  for (size_t s = 0; s < pb.slot_fiber.size(); ++s) {
    pb.fiber_slots[static_cast<size_t>(pb.slot_fiber[s])].push_back(
        static_cast<int>(s));
  }

  // A positive constraint cell all of whose atoms are frozen cannot be met.
  for (int c = 0; c < na; ++c) {
    if (target_a(c) > 0.0 && cell_index_a[c] < 0) {
      throw InfeasibleError("constraint cell with positive mass has no feasible atoms");
    }
  }
  for (int c = 0; c < nb; ++c) {
    if (target_b(c) > 0.0 && cell_index_b[c] < 0) {
      throw InfeasibleError("constraint cell with positive mass has no feasible atoms");
    }
  }
  if (pb.free_atoms.empty()) {
    throw InfeasibleError("all atoms frozen; constraints admit no distribution");
  }
  return pb;
}

struct EvalResult {
  double phi = 0.0;          // augmented Lagrangian value (minimized)
  double objective = 0.0;    // conditional entropy, bits
  double residual = 0.0;     // max-norm constraint violation
};

// Intermediates needed to assemble the Newton system.
struct EvalExtras {
  std::vector<double> q;
  std::vector<double> gq;     // d(phi)/dq per slot
  std::vector<double> fiber;  // conditioning-fiber masses
  std::vector<double> g;      // per-cell constraint gaps
  double dot = 0.0;           // <gq, q>
};

// Evaluate phi, its theta-gradient, objective and residual at theta.
EvalResult evaluate(const Problem& pb, const Eigen::VectorXd& theta,
                    const std::vector<double>& lambda, double rho,
                    Eigen::VectorXd* grad, std::vector<double>* q_out,
                    EvalExtras* extras = nullptr) {
  const int n = static_cast<int>(theta.size());
  const double theta_max = theta.maxCoeff();
  double z = 0.0;
  for (int i = 0; i < n; ++i) z += std::exp(theta(i) - theta_max);
  const double log_z = theta_max + std::log(z);

  std::vector<double> q(n), u(n);
  std::vector<double> fiber_mass(pb.n_fibers, 0.0);
  for (int i = 0; i < n; ++i) {
    u[i] = theta(i) - log_z;
    q[i] = std::exp(u[i]);
    fiber_mass[pb.slot_fiber[i]] += q[i];
  }
  std::vector<double> log_fiber(pb.n_fibers, 0.0);
  for (int f = 0; f < pb.n_fibers; ++f) {
    if (fiber_mass[f] > 0.0) log_fiber[f] = std::log(fiber_mass[f]);
  }

  std::vector<double> g(pb.cells.size(), 0.0);
  for (size_t c = 0; c < pb.cells.size(); ++c) {
    double s = 0.0;
    for (int slot : pb.cells[c].slots) s += q[slot];
    g[c] = s - pb.cells[c].target;
  }

  EvalResult ev;
  double penalty = 0.0;
  for (size_t c = 0; c < pb.cells.size(); ++c) {
    penalty += lambda[c] * g[c] + 0.5 * rho * g[c] * g[c];
    ev.residual = std::max(ev.residual, std::abs(g[c]));
  }
  double f_bits = 0.0;
  for (int i = 0; i < n; ++i) {
    if (q[i] > 0.0) f_bits += q[i] * (log_fiber[pb.slot_fiber[i]] - u[i]);
  }
  f_bits /= kLn2;
  ev.objective = f_bits;
  ev.phi = -f_bits + penalty;

  if (grad) {
    grad->resize(n);
    double dot = 0.0;
    std::vector<double> gq(n);
    for (int i = 0; i < n; ++i) {
      const auto& cc = pb.slot_cells[i];
      double lin = lambda[cc[0]] + rho * g[cc[0]] + lambda[cc[1]] + rho * g[cc[1]];
      double dH = (u[i] - log_fiber[pb.slot_fiber[i]]) / kLn2;  // d(-H)/dq_i
      gq[i] = dH + lin;
      dot += q[i] * gq[i];
    }
    for (int i = 0; i < n; ++i) (*grad)(i) = q[i] * (gq[i] - dot);
    if (extras) {
      extras->gq = std::move(gq);
      extras->dot = dot;
    }
  }
  if (extras) {
    extras->q = q;
    extras->fiber = std::move(fiber_mass);
    extras->g = std::move(g);
  }
  if (q_out) *q_out = std::move(q);
  return ev;
}

// Dense Hessian of phi in theta coordinates. All 1/q singularities cancel
// against softmax Jacobian factors, so every entry stays finite.
void assemble_hessian(const Problem& pb, double rho, const EvalExtras& ex,
                      Eigen::MatrixXd& h) {
  const int n = static_cast<int>(ex.q.size());
  const auto& q = ex.q;
  h.setZero(n, n);

  for (int i = 0; i < n; ++i) h(i, i) += q[i] / kLn2;
  // fiber rank-one corrections: -(q_f q_f^T)/s_f
  for (int f = 0; f < pb.n_fibers; ++f) {
    const double s = ex.fiber[f];
    if (s <= 0.0) continue;
    for (int a : pb.fiber_slots[f])
      for (int b : pb.fiber_slots[f]) h(a, b) -= q[a] * q[b] / (s * kLn2);
  }

  // penalty curvature rho * W^T W with W_{cj} = q_j([j in c] - Q_c)
  if (rho > 0.0) {
    Eigen::VectorXd w(n);
    for (size_t c = 0; c < pb.cells.size(); ++c) {
      double qc = 0.0;
      for (int slot : pb.cells[c].slots) qc += q[slot];
      for (int j = 0; j < n; ++j) w(j) = -q[j] * qc;
      for (int slot : pb.cells[c].slots) w(slot) += q[slot];
      h.noalias() += rho * w * w.transpose();
    }
  }

  // curvature of the softmax reparameterization against the slope gq
  const double b = ex.dot;
  for (int i = 0; i < n; ++i) {
    const double wi = q[i] * ex.gq[i];
    h(i, i) += wi - b * q[i];
    for (int j = 0; j < n; ++j) {
      const double wj = q[j] * ex.gq[j];
      h(i, j) += 2.0 * b * q[i] * q[j] - wi * q[j] - wj * q[i];
    }
  }
}

// Damped Newton descent; quadratic local convergence keeps iteration counts
// tiny for the small problems the sweeps generate.
int newton_minimize(const Problem& pb, Eigen::VectorXd& theta,
                    const std::vector<double>& lambda, double rho,
                    double grad_tol, int max_iters) {
  const int n = static_cast<int>(theta.size());
  Eigen::VectorXd grad(n);
  EvalExtras ex;
  EvalResult ev = evaluate(pb, theta, lambda, rho, &grad, nullptr, &ex);
  Eigen::MatrixXd h(n, n);
  Eigen::VectorXd dir(n), theta_trial(n), new_grad(n);

  int it = 0;
  for (; it < max_iters; ++it) {
    if (grad.cwiseAbs().maxCoeff() <= grad_tol) break;

    assemble_hessian(pb, rho, ex, h);
    double scale = std::max(1e-12, h.diagonal().cwiseAbs().maxCoeff());
    double tau = 0.0;
    bool have_dir = false;
    for (int attempt = 0; attempt < 12; ++attempt) {
      Eigen::MatrixXd hs = h;
      if (tau > 0.0) hs.diagonal().array() += tau;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(hs);
      if (ldlt.info() == Eigen::Success) {
        dir = ldlt.solve(-grad);
        if (dir.allFinite() && grad.dot(dir) < 0.0) {
          have_dir = true;
          break;
        }
      }
      tau = (tau == 0.0) ? 1e-10 * scale : tau * 100.0;
    }
    if (!have_dir) dir = -grad;

    double slope = grad.dot(dir);
    if (!(slope < 0.0)) break;
    double step = 1.0;
    bool ok = false;
    EvalResult trial;
    EvalExtras ex_trial;
    for (int ls = 0; ls < 60; ++ls) {
      theta_trial = theta + step * dir;
      trial = evaluate(pb, theta_trial, lambda, rho, &new_grad, nullptr, &ex_trial);
      if (trial.phi <= ev.phi + 1e-4 * step * slope) {
        ok = true;
        break;
      }
      step *= 0.5;
    }
    if (!ok) break;
    theta = theta_trial;
    grad = new_grad;
    ev = trial;
    ex = std::move(ex_trial);
  }
  return it;
}

// L-BFGS with Armijo backtracking; minimizes phi over theta in place.
// Returns iterations spent.
int inner_minimize(const Problem& pb, Eigen::VectorXd& theta,
                   const std::vector<double>& lambda, double rho, double grad_tol,
                   int max_iters) {
  constexpr int kMemory = 8;
  const int n = static_cast<int>(theta.size());
  std::vector<Eigen::VectorXd> s_hist, y_hist;
  std::vector<double> rho_hist;

  Eigen::VectorXd grad(n), new_grad(n);
  EvalResult ev = evaluate(pb, theta, lambda, rho, &grad, nullptr);
  int it = 0;
  for (; it < max_iters; ++it) {
    if (grad.cwiseAbs().maxCoeff() <= grad_tol) break;

    // two-loop recursion
    Eigen::VectorXd dir = -grad;
    std::vector<double> alpha(s_hist.size());
    for (int h = static_cast<int>(s_hist.size()) - 1; h >= 0; --h) {
      alpha[h] = rho_hist[h] * s_hist[h].dot(dir);
      dir -= alpha[h] * y_hist[h];
    }
    if (!s_hist.empty()) {
      const auto& s = s_hist.back();
      const auto& y = y_hist.back();
      double yy = y.squaredNorm();
      if (yy > 0.0) dir *= s.dot(y) / yy;
    }
    for (size_t h = 0; h < s_hist.size(); ++h) {
      double beta = rho_hist[h] * y_hist[h].dot(dir);
      dir += (alpha[h] - beta) * s_hist[h];
    }
    double slope = grad.dot(dir);
    if (!(slope < 0.0)) {  // fall back to steepest descent
      dir = -grad;
      slope = grad.dot(dir);
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      if (!(slope < 0.0)) break;
    }

    double step = 1.0;
    EvalResult trial;
    Eigen::VectorXd theta_trial;
    bool ok = false;
    for (int ls = 0; ls < 60; ++ls) {
      theta_trial = theta + step * dir;
      trial = evaluate(pb, theta_trial, lambda, rho, &new_grad, nullptr);
      if (trial.phi <= ev.phi + 1e-4 * step * slope) {
        ok = true;
        break;
      }
      step *= 0.5;
    }
    if (!ok) break;  // no progress at machine precision

    Eigen::VectorXd s = theta_trial - theta;
    Eigen::VectorXd y = new_grad - grad;
    double sy = s.dot(y);
    if (sy > 1e-16 * s.norm() * y.norm()) {
      if (static_cast<int>(s_hist.size()) == kMemory) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
        rho_hist.erase(rho_hist.begin());
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }
    theta = std::move(theta_trial);
    grad = new_grad;
    ev = trial;
  }
  return it;
}

// Reopen collapsed atoms at the mass that would make their own coordinate
// stationary against the working multipliers. A collapsed atom's gradient
// vanishes with its mass, so the inner solve cannot tell a legitimately zero
// atom from one trapped by earlier multiplier estimates; teleporting both to
// their equilibrium height and re-solving settles the question. Returns the
// number of atoms moved.
int reopen_collapsed(const Problem& pb, const std::vector<double>& lambda,
                     double rho, const EvalExtras& ex, std::vector<double>& q) {
  const double b = ex.dot;
  auto nu = [&](int slot) {
    const auto& cc = pb.slot_cells[slot];
    return lambda[cc[0]] + rho * ex.g[cc[0]] + lambda[cc[1]] + rho * ex.g[cc[1]];
  };
  int lifted = 0;
  for (int f = 0; f < pb.n_fibers; ++f) {
    const auto& slots = pb.fiber_slots[f];
    if (slots.empty()) continue;
    const double s = ex.fiber[f];
    if (s > 1e-5) {
      for (int i : slots) {
        if (ex.q[i] >= 1e-6 * s) continue;
        double target = std::min(s * std::exp2(b - nu(i)), 0.5 * s);
        if (target > 10.0 * ex.q[i]) {
          q[i] = target;
          ++lifted;
        }
      }
    } else {
      // collapsed conditioning fiber: the within-fiber ratios stay healthy
      // while the total sinks, so the per-atom test above cannot see it;
      // profitable to reopen only when the exponential profile prices above
      // one unit
      double emax = -std::numeric_limits<double>::infinity();
      for (int i : slots) emax = std::max(emax, b - nu(i));
      double z = 0.0;
      for (int i : slots) z += std::exp2(b - nu(i) - emax);
      if (emax + std::log2(z) <= 1e-9) continue;
      for (int i : slots) {
        double target = 1e-3 * std::exp2(b - nu(i) - emax) / z;
        if (target > 10.0 * ex.q[i]) {
          q[i] = target;
          ++lifted;
        }
      }
    }
  }
  return lifted;
}

MaxEntSolution pack_solution(const Problem& pb, const Eigen::VectorXd& theta,
                             const std::vector<double>& lambda) {
  std::vector<double> q;
  EvalResult ev = evaluate(pb, theta, lambda, 0.0, nullptr, &q);
  std::vector<double> full(static_cast<size_t>(pb.dims.atoms()), 0.0);
  double sum = 0.0;
  for (size_t i = 0; i < q.size(); ++i) sum += q[i];
  for (size_t i = 0; i < q.size(); ++i) {
    full[static_cast<size_t>(pb.free_atoms[i])] = q[i] / sum;
  }
  MaxEntSolution sol{DiscreteJoint(pb.dims, std::move(full))};
  sol.objective_bits = ev.objective;
  sol.residual = ev.residual;
  return sol;
}

MaxEntSolution solve(const Eigen::MatrixXd& ma, const Eigen::MatrixXd& mb,
                     MaxEntObjective objective, const SolverConfig& cfg) {
  if (cfg.marginal_tolerance <= 0.0 || cfg.objective_tolerance <= 0.0 ||
      cfg.max_outer_iterations < 1 || cfg.max_inner_iterations < 1 ||
      cfg.penalty_growth <= 1.0 || cfg.initial_penalty <= 0.0) {
    throw std::invalid_argument("SolverConfig: invalid settings");
  }
  Problem pb = build_problem(ma, mb, objective, cfg.marginal_tolerance);
  const int n = static_cast<int>(pb.free_atoms.size());

  // Mixing weight for the per-outer lift toward the feasible interior start.
  // The lift keeps every atom at gradient-visible mass, so an atom collapsed
  // by earlier (wrong) multipliers can always be reopened by a later inner
  // solve; without it the exponential map freezes such atoms permanently and
  // the iterate can settle on a feasible but suboptimal face. Because q0
  // satisfies the constraints exactly, the lift also shrinks every constraint
  // gap by the mixing factor.
  constexpr double kLift = 1e-4;

  Eigen::VectorXd theta(n);
  std::vector<double> q_cur(pb.q0);
  std::vector<double> lambda(pb.cells.size(), 0.0);
  double rho = cfg.initial_penalty;

  double best_residual = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_theta(n);
  double prev_obj = std::numeric_limits<double>::quiet_NaN();
  double prev_res = std::numeric_limits<double>::infinity();
  double prev_accept_res = std::numeric_limits<double>::infinity();
  double last_obj = std::numeric_limits<double>::quiet_NaN();
  int stall = 0;
  int bad_inner = 0;
  bool pending_confirm = false;
  double confirm_obj = 0.0;
  Eigen::VectorXd confirm_theta(n);

  // Penalties beyond this leave the Newton system too ill-conditioned to
  // solve within the inner budget; the multiplier updates carry convergence
  // from there.
  constexpr double kRhoCap = 1e7;

  std::vector<double> history;
  long long inner_total = 0;
  bool converged = false;
  int outer = 0;

  const bool use_newton = n <= 256;
  for (outer = 1; outer <= cfg.max_outer_iterations; ++outer) {
    for (int i = 0; i < n; ++i) {
      theta(i) = std::log((1.0 - kLift) * q_cur[i] + kLift * pb.q0[i]);
    }
    theta.array() -= theta.mean();

    // The penalty term contributes rho-scaled rounding noise to every
    // gradient entry, so the inner solve cannot certify below that floor.
    double grad_tol =
        std::max(std::clamp(0.05 * std::min(prev_res, best_residual), 1e-11, 1e-5),
                 rho * 1e-15);
    inner_total += use_newton
                       ? newton_minimize(pb, theta, lambda, rho, grad_tol,
                                         cfg.max_inner_iterations)
                       : inner_minimize(pb, theta, lambda, rho, grad_tol,
                                        cfg.max_inner_iterations);

    Eigen::VectorXd grad;
    EvalExtras ex;
    EvalResult ev = evaluate(pb, theta, lambda, rho, &grad, nullptr, &ex);
    const double gmax = grad.cwiseAbs().maxCoeff();
    // A stationary-enough iterate can certify a candidate solution; only a
    // genuinely unconverged inner solve forces a restart.
    const bool inner_usable = std::isfinite(gmax) && gmax <= 1e-4;
    const bool inner_polished = gmax <= std::max(grad_tol * (1.0 + 1e-9), 1e-7);
    q_cur = ex.q;

    if (ev.residual < best_residual) {
      best_residual = ev.residual;
      best_theta = theta;
      bad_inner = 0;
    }
    history.push_back(best_residual);

    if (ev.residual <= cfg.marginal_tolerance && inner_polished) {
      if (!std::isnan(prev_obj) &&
          std::abs(ev.objective - prev_obj) <=
              cfg.objective_tolerance * std::max(1.0, std::abs(ev.objective))) {
        if (pending_confirm &&
            ev.objective <=
                confirm_obj + 1e-8 * std::max(1.0, std::abs(confirm_obj))) {
          // the reopened atoms collapsed back: the earlier candidate stands
          theta = confirm_theta;
          converged = true;
          break;
        }
        if (reopen_collapsed(pb, lambda, rho, ex, q_cur) == 0) {
          converged = true;
          break;
        }
        pending_confirm = true;
        confirm_obj = ev.objective;
        confirm_theta = theta;
        prev_obj = std::numeric_limits<double>::quiet_NaN();
        prev_res = std::numeric_limits<double>::infinity();
        prev_accept_res = std::numeric_limits<double>::infinity();
        continue;
      }
      prev_obj = ev.objective;
    } else {
      prev_obj = std::numeric_limits<double>::quiet_NaN();
    }

    if (!inner_usable) {
      // The subproblem outgrew the inner budget; soften it and restart from
      // the most feasible point seen instead of trusting a non-stationary
      // iterate. If that repeats, the multiplier estimate itself is driving
      // the subproblem somewhere unsolvable, so attenuate it too.
      rho = std::max(cfg.initial_penalty, rho * 0.1);
      if (++bad_inner >= 2) {
        for (double& l : lambda) l *= 0.5;
      }
      evaluate(pb, best_theta, lambda, 0.0, nullptr, &q_cur);
      prev_obj = std::numeric_limits<double>::quiet_NaN();
      prev_res = std::numeric_limits<double>::infinity();
      last_obj = std::numeric_limits<double>::quiet_NaN();
      stall = 0;
      continue;
    }

    // A large objective move means the iterate is still traveling along the
    // feasible manifold; growing the penalty then only stiffens the next
    // subproblem against exploration it should be doing.
    const bool obj_moving =
        std::isnan(last_obj) ||
        std::abs(ev.objective - last_obj) >
            1e-3 * std::max(1.0, std::abs(ev.objective));
    last_obj = ev.objective;

    // Near feasibility the multiplier iteration is contractive on its own,
    // so the update never waits on a decrease test; far from it, an update
    // is only earned by constraint progress.
    const bool accept =
        ev.residual <= 1e-3 ||
        ev.residual <= std::max(0.9 * prev_accept_res, cfg.marginal_tolerance);
    if (accept) {
      for (size_t c = 0; c < pb.cells.size(); ++c) {
        lambda[c] += rho * ex.g[c];
      }
      prev_accept_res = ev.residual;
    }
    // A rejected outer that cannot even match the best residual means the
    // penalty is too weak against the current multipliers; an accepted one
    // contracting slowly at a settled objective just needs a stiffer penalty.
    if ((!accept && ev.residual >= best_residual) ||
        (accept && ev.residual > 0.5 * prev_res && !obj_moving)) {
      rho = std::min(rho * cfg.penalty_growth, kRhoCap);
    }

    // A frozen residual above tolerance usually means collapsed atoms are
    // blocking the only feasible rebalancing; mixing toward the interior
    // start shrinks every constraint gap and reopens them at visible mass.
    stall =
        (ev.residual > cfg.marginal_tolerance && ev.residual > 0.9 * prev_res)
            ? stall + 1
            : 0;
    if (stall >= 3) {
      stall = 0;
      for (int i = 0; i < n; ++i) q_cur[i] = 0.9 * q_cur[i] + 0.1 * pb.q0[i];
      prev_obj = std::numeric_limits<double>::quiet_NaN();
      prev_res = std::numeric_limits<double>::infinity();
      continue;
    }
    prev_res = ev.residual;
    // Deep in the feasible region a stiff penalty only amplifies float noise
    // and freezes the multiplier updates; relax it.
    if (ev.residual <= cfg.marginal_tolerance && rho > 1e4) {
      rho *= 0.1;
    }
  }

  MaxEntSolution sol = pack_solution(pb, theta, lambda);
  sol.iterations = outer;
  sol.inner_iterations = inner_total;
  sol.residual_history = std::move(history);
  sol.converged = converged && sol.residual <= cfg.marginal_tolerance;

  if (!sol.converged) {
    MaxEntSolution best = pack_solution(pb, best_theta, lambda);
    best.iterations = outer;
    best.inner_iterations = inner_total;
    best.residual_history = sol.residual_history;
    best.converged = false;
    std::ostringstream msg;
    msg << "max-entropy solve did not converge: residual " << best.residual
        << " after " << outer - 1 << " outer iterations";
    throw SolverError(msg.str(), std::move(best));
  }
  return sol;
}

}  // namespace

MaxEntSolution solve_q_star(const Eigen::MatrixXd& m1, const Eigen::MatrixXd& m2,
                            const SolverConfig& cfg) {
  return solve(m1, m2, MaxEntObjective::y_given_x1x2, cfg);
}

MaxEntSolution solve_r_star(const Eigen::MatrixXd& m1, const Eigen::MatrixXd& m12,
                            const SolverConfig& cfg) {
  return solve(m1, m12, MaxEntObjective::x1_given_x2y, cfg);
}

OracleResult brute_force_oracle(const Eigen::MatrixXd& ma, const Eigen::MatrixXd& mb,
                                MaxEntObjective objective, double grid_resolution) {
  if (!(grid_resolution > 0.0) || grid_resolution > 1.0) {
    throw std::invalid_argument("brute_force_oracle: grid_resolution must be in (0, 1]");
  }
  SolverConfig probe;  // defaults; only used for feasibility checks in build
  Problem pb = build_problem(ma, mb, objective, probe.marginal_tolerance);
  const int n = static_cast<int>(pb.free_atoms.size());
  if (pb.dims.atoms() > 16) {
    throw std::invalid_argument("brute_force_oracle: more than 16 atoms unsupported");
  }

  // Dense constraint matrix over free slots; nullspace via SVD.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(pb.cells.size()), n);
  for (size_t c = 0; c < pb.cells.size(); ++c) {
    for (int slot : pb.cells[c].slots) a(static_cast<Eigen::Index>(c), slot) = 1.0;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double sv_tol = sv.size() > 0 ? 1e-10 * sv(0) : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > sv_tol) ++rank;
  }
  const int dim = n - rank;
  if (dim > 3) {
    throw std::invalid_argument("brute_force_oracle: polytope dimension " +
                                std::to_string(dim) + " exceeds 3");
  }
  Eigen::MatrixXd null_basis = svd.matrixV().rightCols(dim);

  Eigen::VectorXd q0(n);
  for (int i = 0; i < n; ++i) q0(i) = pb.q0[i];

  const Dims d = pb.dims;
  std::vector<double> tensor(static_cast<size_t>(d.atoms()), 0.0);
  auto objective_at = [&](const Eigen::VectorXd& z, double* out) {
    Eigen::VectorXd q = q0 + null_basis * z;
    if ((q.array() < -1e-12).any()) return false;
    std::fill(tensor.begin(), tensor.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      tensor[static_cast<size_t>(pb.free_atoms[i])] = std::max(q(i), 0.0);
    }
    // H(target | rest) = H(all) - H(rest)
    double h_all = entropy_bits(std::span<const double>(tensor));
    std::vector<double> rest(static_cast<size_t>(pb.n_fibers), 0.0);
    for (int i = 0; i < n; ++i) {
      rest[static_cast<size_t>(pb.slot_fiber[i])] += std::max(q(i), 0.0);
    }
    *out = h_all - entropy_bits(std::span<const double>(rest));
    return true;
  };

  Eigen::VectorXd best_z = Eigen::VectorXd::Zero(dim);
  double best = -std::numeric_limits<double>::infinity();
  objective_at(best_z, &best);  // q0 is feasible by construction

  if (dim > 0) {
    // Any feasible point lies within ||z|| <= 2 of q0, so [-2,2]^dim covers
    // the whole polytope.
    const int steps = static_cast<int>(std::ceil(4.0 / grid_resolution)) + 1;
    std::vector<int> idx(static_cast<size_t>(dim), 0);
    Eigen::VectorXd z(dim);
    bool done = false;
    while (!done) {
      for (int k = 0; k < dim; ++k) z(k) = -2.0 + idx[static_cast<size_t>(k)] * grid_resolution;
      double val;
      if (objective_at(z, &val) && val > best) {
        best = val;
        best_z = z;
      }
      int k = 0;
      for (; k < dim; ++k) {
        if (++idx[static_cast<size_t>(k)] < steps) break;
        idx[static_cast<size_t>(k)] = 0;
      }
      done = k == dim;
    }

    // Local refinement around the best grid point; concavity keeps the
    // optimum inside the shrinking window.
    double step = grid_resolution;
    for (int round = 0; round < 60 && step > 1e-13; ++round) {
      step *= 0.4;
      Eigen::VectorXd center = best_z;
      std::vector<int> off(static_cast<size_t>(dim), 0);
      bool inner_done = false;
      while (!inner_done) {
        for (int k = 0; k < dim; ++k) {
          z(k) = center(k) + (off[static_cast<size_t>(k)] - 4) * step;
        }
        double val;
        if (objective_at(z, &val) && val > best) {
          best = val;
          best_z = z;
        }
        int k = 0;
        for (; k < dim; ++k) {
          if (++off[static_cast<size_t>(k)] < 9) break;
          off[static_cast<size_t>(k)] = 0;
        }
        inner_done = k == dim;
      }
    }

    // Pattern search can stall on nearly flat ridges with the value still a
    // few 1e-5 short. The objective restricted to any line is concave, so
    // exact one-dimensional maximization along a spanning direction set
    // polishes the value to the optimum.
    std::vector<Eigen::VectorXd> dirs;
    for (int k = 0; k < dim; ++k) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
      e(k) = 1.0;
      dirs.push_back(e);
    }
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int a = 0; a < dim; ++a) {
      for (int b2 = a + 1; b2 < dim; ++b2) {
        for (double sgn : {1.0, -1.0}) {
          Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
          e(a) = inv_sqrt2;
          e(b2) = sgn * inv_sqrt2;
          dirs.push_back(e);
        }
      }
    }
    const double inv_phi = 0.6180339887498949;
    auto line_max = [&](const Eigen::VectorXd& v) {
      Eigen::VectorXd qbase = q0 + null_basis * best_z;
      Eigen::VectorXd c = null_basis * v;
      double tlo = -4.0, thi = 4.0;
      for (int i = 0; i < n; ++i) {
        if (c(i) > 1e-14) {
          tlo = std::max(tlo, -qbase(i) / c(i));
        } else if (c(i) < -1e-14) {
          thi = std::min(thi, -qbase(i) / c(i));
        }
      }
      if (!(tlo < thi)) return false;
      auto value_at = [&](double t) {
        double val;
        if (!objective_at(best_z + t * v, &val)) {
          return -std::numeric_limits<double>::infinity();
        }
        return val;
      };
      double lo = tlo, hi = thi;
      double t1 = hi - inv_phi * (hi - lo), t2 = lo + inv_phi * (hi - lo);
      double f1 = value_at(t1), f2 = value_at(t2);
      for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        if (f1 < f2) {
          lo = t1;
          t1 = t2;
          f1 = f2;
          t2 = lo + inv_phi * (hi - lo);
          f2 = value_at(t2);
        } else {
          hi = t2;
          t2 = t1;
          f2 = f1;
          t1 = hi - inv_phi * (hi - lo);
          f1 = value_at(t1);
        }
      }
      double t_star = 0.5 * (lo + hi);
      double val = value_at(t_star);
      if (val > best) {
        bool gained = val > best + 1e-15;
        best = val;
        best_z += t_star * v;
        return gained;
      }
      return false;
    };
    for (int sweep = 0; sweep < 400; ++sweep) {
      Eigen::VectorXd sweep_start = best_z;
      bool improved = false;
      for (const auto& v : dirs) {
        improved = line_max(v) || improved;
      }
      // Fixed axes zigzag on curved ridges; the net displacement of a full
      // sweep points along the ridge, so maximize along it as well.
      Eigen::VectorXd disp = best_z - sweep_start;
      double norm = disp.norm();
      if (norm > 1e-15) {
        improved = line_max(disp / norm) || improved;
      }
      if (!improved) break;
    }
  }

  Eigen::VectorXd q = q0 + null_basis * best_z;
  std::vector<double> full(static_cast<size_t>(d.atoms()), 0.0);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double v = std::max(q(i), 0.0);
    full[static_cast<size_t>(pb.free_atoms[i])] = v;
    sum += v;
  }
  for (double& v : full) v /= sum;

  OracleResult res{best, DiscreteJoint(d, std::move(full)), dim};
  return res;
}

}  // namespace synergy
