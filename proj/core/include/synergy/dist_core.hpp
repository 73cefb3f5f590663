#pragma once

// Discrete joint distributions over (X1, X2, Y) and the information
// quantities everything else is built from. All logarithms are base 2 and
// every quantity is reported in bits.

#include <Eigen/Dense>

#include <initializer_list>
#include <span>
#include <vector>

namespace synergy {

struct Dims {
  int n1 = 0;
  int n2 = 0;
  int ny = 0;

  int atoms() const { return n1 * n2 * ny; }
  bool operator==(const Dims&) const = default;
};

// Full joint p(x1, x2, y), stored flat in row-major (x1, x2, y) order.
// Validation: entries nonnegative and finite, total mass 1 within 1e-12.
class DiscreteJoint {
public:
  DiscreteJoint(Dims dims, std::vector<double> mass);

  const Dims& dims() const { return dims_; }
  const std::vector<double>& flat() const { return mass_; }

  double operator()(int x1, int x2, int y) const {
    return mass_[index(x1, x2, y)];
  }
  int index(int x1, int x2, int y) const {
    return (x1 * dims_.n2 + x2) * dims_.ny + y;
  }

private:
  Dims dims_;
  std::vector<double> mass_;
};

// 1-d probability vector; entries nonnegative, total mass 1 within 1e-12.
class MarginalDistribution {
public:
  explicit MarginalDistribution(std::vector<double> p);

  const std::vector<double>& p() const { return p_; }
  int size() const { return static_cast<int>(p_.size()); }
  double operator[](int i) const { return p_[i]; }

private:
  std::vector<double> p_;
};

// The three pairwise marginals the estimators consume:
//   m1(x1, y), m2(x2, y), m12(x1, x2).
struct PairwiseMarginals {
  Eigen::MatrixXd m1;
  Eigen::MatrixXd m2;
  Eigen::MatrixXd m12;

  // Shape/mass validity plus mutual consistency of the shared 1-d marginals
  // (p(y) from m1 vs m2, p(x1) from m1 vs m12, p(x2) from m2 vs m12), each
  // within consistency_tol in max norm. Throws InfeasibleError on mismatch.
  void validate(double consistency_tol = 1e-9) const;

  Eigen::VectorXd p_x1() const { return m1.rowwise().sum(); }
  Eigen::VectorXd p_x2() const { return m2.rowwise().sum(); }
  Eigen::VectorXd p_y() const { return m1.colwise().sum().transpose(); }
};

// Row-stochastic conditionals p(y|x). Rows of m with zero mass get the
// uniform distribution and are flagged.
struct ConditionalTable {
  Eigen::MatrixXd rows;
  std::vector<int> degenerate_rows;
};

double entropy_bits(std::span<const double> p);
double entropy_bits(const Eigen::MatrixXd& m);
double entropy_bits(const Eigen::VectorXd& v);
double entropy_bits(const MarginalDistribution& p);
double entropy_bits(const DiscreteJoint& j);

// Marginal of j over the given axes (subset of {0,1,2}, ascending), flattened
// row-major in that axis order.
std::vector<double> marginal(const DiscreteJoint& j, std::span<const int> axes);

// I(A;B) for disjoint nonempty axis groups.
double mutual_info(const DiscreteJoint& j, std::initializer_list<int> group_a,
                   std::initializer_list<int> group_b);
double mutual_info(const DiscreteJoint& j, std::span<const int> group_a,
                   std::span<const int> group_b);

// I(a;b|given) for three distinct axes.
double conditional_mutual_info(const DiscreteJoint& j, int a, int b, int given);

// I(X1;X2;Y) = I(X1;X2) - I(X1;X2|Y). Signed.
double interaction_info(const DiscreteJoint& j);

PairwiseMarginals pairwise_marginals(const DiscreteJoint& j);

ConditionalTable conditionals_from_marginal(const Eigen::MatrixXd& m);

}  // namespace synergy
