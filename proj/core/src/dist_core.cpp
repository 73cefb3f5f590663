#include "synergy/dist_core.hpp"

#include "synergy/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace synergy {

namespace {

constexpr double kMassTol = 1e-12;

void check_mass(std::span<const double> p, const char* what) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string(what) + ": entries must be finite and >= 0");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kMassTol) {
    throw std::invalid_argument(std::string(what) + ": total mass " + std::to_string(sum) +
                                " differs from 1 beyond 1e-12");
  }
}

}  // namespace

DiscreteJoint::DiscreteJoint(Dims dims, std::vector<double> mass)
    : dims_(dims), mass_(std::move(mass)) {
  if (dims_.n1 < 1 || dims_.n2 < 1 || dims_.ny < 1) {
    throw std::invalid_argument("DiscreteJoint: dims must be >= 1");
  }
  if (static_cast<int>(mass_.size()) != dims_.atoms()) {
    throw std::invalid_argument("DiscreteJoint: mass size does not match dims");
  }
  check_mass(mass_, "DiscreteJoint");
}

MarginalDistribution::MarginalDistribution(std::vector<double> p) : p_(std::move(p)) {
  if (p_.empty()) throw std::invalid_argument("MarginalDistribution: empty");
  check_mass(p_, "MarginalDistribution");
}

void PairwiseMarginals::validate(double consistency_tol) const {
  const Eigen::MatrixXd* mats[3] = {&m1, &m2, &m12};
  const char* names[3] = {"m1", "m2", "m12"};
  for (int t = 0; t < 3; ++t) {
    const auto& m = *mats[t];
    if (m.rows() < 1 || m.cols() < 1) {
      throw std::invalid_argument(std::string("PairwiseMarginals: ") + names[t] + " is empty");
    }
    double sum = 0.0;
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      double v = m.data()[i];
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string("PairwiseMarginals: ") + names[t] +
                                    " has a negative or non-finite entry");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kMassTol) {
      throw std::invalid_argument(std::string("PairwiseMarginals: ") + names[t] +
                                  " mass differs from 1 beyond 1e-12");
    }
  }
  if (m1.rows() != m12.rows() || m2.rows() != m12.cols() || m1.cols() != m2.cols()) {
    throw std::invalid_argument("PairwiseMarginals: inconsistent shapes");
  }
  struct Check {
    Eigen::VectorXd a, b;
    const char* name;
  };
  Check checks[3] = {
      {m1.colwise().sum().transpose(), m2.colwise().sum().transpose(), "p(y)"},
      {m1.rowwise().sum(), m12.rowwise().sum(), "p(x1)"},
      {m2.rowwise().sum(), m12.colwise().sum().transpose(), "p(x2)"},
  };
  for (const auto& c : checks) {
    double gap = (c.a - c.b).cwiseAbs().maxCoeff();
    if (gap > consistency_tol) {
      throw InfeasibleError(std::string("PairwiseMarginals: shared marginal ") + c.name +
                            " disagrees by " + std::to_string(gap) + " (tolerance " +
                            std::to_string(consistency_tol) + ")");
    }
  }
}

double entropy_bits(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

double entropy_bits(const Eigen::MatrixXd& m) {
  return entropy_bits(std::span<const double>(m.data(), static_cast<size_t>(m.size())));
}

double entropy_bits(const Eigen::VectorXd& v) {
  return entropy_bits(std::span<const double>(v.data(), static_cast<size_t>(v.size())));
}

double entropy_bits(const MarginalDistribution& p) {
  return entropy_bits(std::span<const double>(p.p()));
}

double entropy_bits(const DiscreteJoint& j) {
  return entropy_bits(std::span<const double>(j.flat()));
}

std::vector<double> marginal(const DiscreteJoint& j, std::span<const int> axes) {
  bool keep[3] = {false, false, false};
  for (int a : axes) {
    if (a < 0 || a > 2) throw std::invalid_argument("marginal: axis out of range");
    if (keep[a]) throw std::invalid_argument("marginal: duplicate axis");
    keep[a] = true;
  }
  const Dims d = j.dims();
  const int sizes[3] = {d.n1, d.n2, d.ny};
  int out_size = 1;
  for (int a = 0; a < 3; ++a) {
    if (keep[a]) out_size *= sizes[a];
  }
  std::vector<double> out(static_cast<size_t>(out_size), 0.0);
  for (int i = 0; i < d.n1; ++i) {
    for (int jx = 0; jx < d.n2; ++jx) {
      for (int k = 0; k < d.ny; ++k) {
        int idx = 0;
        const int coords[3] = {i, jx, k};
        for (int a = 0; a < 3; ++a) {
          if (keep[a]) idx = idx * sizes[a] + coords[a];
        }
        out[static_cast<size_t>(idx)] += j(i, jx, k);
      }
    }
  }
  return out;
}

double mutual_info(const DiscreteJoint& j, std::span<const int> group_a,
                   std::span<const int> group_b) {
  if (group_a.empty() || group_b.empty()) {
    throw std::invalid_argument("mutual_info: empty axis group");
  }
  bool used[3] = {false, false, false};
  std::vector<int> joint_axes;
  for (auto group : {group_a, group_b}) {
    for (int a : group) {
      if (a < 0 || a > 2) throw std::invalid_argument("mutual_info: axis out of range");
      if (used[a]) throw std::invalid_argument("mutual_info: overlapping axis groups");
      used[a] = true;
    }
  }
  for (int a = 0; a < 3; ++a) {
    if (used[a]) joint_axes.push_back(a);
  }
  auto ha = entropy_bits(std::span<const double>(marginal(j, group_a)));
  auto hb = entropy_bits(std::span<const double>(marginal(j, group_b)));
  auto hab = entropy_bits(std::span<const double>(marginal(j, joint_axes)));
  return ha + hb - hab;
}

double mutual_info(const DiscreteJoint& j, std::initializer_list<int> group_a,
                   std::initializer_list<int> group_b) {
  std::vector<int> a(group_a), b(group_b);
  return mutual_info(j, std::span<const int>(a), std::span<const int>(b));
}

double conditional_mutual_info(const DiscreteJoint& j, int a, int b, int given) {
  if (a == b || a == given || b == given) {
    throw std::invalid_argument("conditional_mutual_info: axes must be distinct");
  }
  for (int x : {a, b, given}) {
    if (x < 0 || x > 2) throw std::invalid_argument("conditional_mutual_info: axis out of range");
  }
  auto h = [&](std::vector<int> axes) {
    std::sort(axes.begin(), axes.end());
    return entropy_bits(std::span<const double>(marginal(j, axes)));
  };
  // I(a;b|g) = H(a,g) + H(b,g) - H(a,b,g) - H(g)
  return h({a, given}) + h({b, given}) - h({a, b, given}) - h({given});
}

double interaction_info(const DiscreteJoint& j) {
  return mutual_info(j, {0}, {1}) - conditional_mutual_info(j, 0, 1, 2);
}

PairwiseMarginals pairwise_marginals(const DiscreteJoint& j) {
  const Dims d = j.dims();
  PairwiseMarginals m;
  m.m1 = Eigen::MatrixXd::Zero(d.n1, d.ny);
  m.m2 = Eigen::MatrixXd::Zero(d.n2, d.ny);
  m.m12 = Eigen::MatrixXd::Zero(d.n1, d.n2);
  for (int i = 0; i < d.n1; ++i) {
    for (int jx = 0; jx < d.n2; ++jx) {
      for (int k = 0; k < d.ny; ++k) {
        double v = j(i, jx, k);
        m.m1(i, k) += v;
        m.m2(jx, k) += v;
        m.m12(i, jx) += v;
      }
    }
  }
  return m;
}

ConditionalTable conditionals_from_marginal(const Eigen::MatrixXd& m) {
  ConditionalTable t;
  t.rows = Eigen::MatrixXd(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double mass = m.row(i).sum();
    if (mass > 0.0) {
      t.rows.row(i) = m.row(i) / mass;
    } else {
      t.rows.row(i).setConstant(1.0 / static_cast<double>(m.cols()));
      t.degenerate_rows.push_back(static_cast<int>(i));
    }
  }
  return t;
}

}  // namespace synergy
