#include "synergy/ingest.hpp"

#include "synergy/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace synergy {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Eigen::MatrixXd stack_rows(const std::vector<Eigen::VectorXd>& rows) {
  if (rows.empty()) throw std::invalid_argument("feature set is empty");
  Eigen::Index dim = rows.front().size();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), dim);
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != dim) {
      throw std::invalid_argument("feature vectors have mixed dimensions");
    }
    x.row(static_cast<Eigen::Index>(i)) = rows[i];
  }
  return x;
}

int nearest_row(const Eigen::MatrixXd& rows, const Eigen::RowVectorXd& z) {
  int best = 0;
  double best_d = (rows.row(0) - z).squaredNorm();
  for (Eigen::Index c = 1; c < rows.rows(); ++c) {
    double dd = (rows.row(c) - z).squaredNorm();
    if (dd < best_d) {
      best_d = dd;
      best = static_cast<int>(c);
    }
  }
  return best;
}

bool lex_less(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

double tv_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return 0.5 * (a - b).cwiseAbs().sum();
}

// Alternate row/column rescaling of m toward the given 1-d targets.
bool ipf(Eigen::MatrixXd& m, const Eigen::VectorXd& row_target,
         const Eigen::VectorXd& col_target, double tol, int max_iters) {
  // rows or columns that are empty but carry target mass get a product fill
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (m.row(i).sum() <= 0.0 && row_target(i) > 0.0) {
      m.row(i) = row_target(i) * col_target.transpose();
    }
  }
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (m.col(j).sum() <= 0.0 && col_target(j) > 0.0) {
      m.col(j) = col_target(j) * row_target;
    }
  }
  for (int it = 0; it < max_iters; ++it) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      double s = m.row(i).sum();
      m.row(i) *= s > 0.0 ? row_target(i) / s : 0.0;
    }
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      double s = m.col(j).sum();
      m.col(j) *= s > 0.0 ? col_target(j) / s : 0.0;
    }
    double err = (m.rowwise().sum() - row_target).cwiseAbs().maxCoeff();
    err = std::max(err, (m.colwise().sum().transpose() - col_target).cwiseAbs().maxCoeff());
    if (err <= tol) return true;
  }
  return false;
}

}  // namespace

int Discretizer::assign(const Eigen::VectorXd& x) const {
  if (x.size() != mean.size()) {
    throw std::invalid_argument("Discretizer::assign: wrong feature dimension");
  }
  Eigen::RowVectorXd z = ((x - mean).transpose() * projection).eval();
  return nearest_row(centroids, z);
}

Discretizer fit_discretizer(const std::vector<Eigen::VectorXd>& features, int k,
                            int pca_dim, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("fit_discretizer: k must be >= 2");
  if (pca_dim < 1) throw std::invalid_argument("fit_discretizer: pca_dim must be >= 1");
  Eigen::MatrixXd x = stack_rows(features);
  const Eigen::Index n = x.rows();

  {
    std::set<std::vector<double>> distinct;
    for (Eigen::Index i = 0; i < n && distinct.size() < static_cast<size_t>(k); ++i) {
      distinct.insert(std::vector<double>(x.row(i).begin(), x.row(i).end()));
    }
    if (distinct.size() < static_cast<size_t>(k)) {
      throw std::invalid_argument("fit_discretizer: fewer than k distinct feature vectors");
    }
  }

  Discretizer disc;
  disc.k = k;
  disc.seed = seed;
  disc.mean = x.colwise().mean();
  Eigen::MatrixXd centered = x.rowwise() - disc.mean.transpose();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  int pd = std::min<int>(pca_dim, static_cast<int>(svd.matrixV().cols()));
  disc.projection = svd.matrixV().leftCols(pd);
  for (Eigen::Index c = 0; c < disc.projection.cols(); ++c) {
    Eigen::Index at = 0;
    disc.projection.col(c).cwiseAbs().maxCoeff(&at);
    if (disc.projection(at, c) < 0.0) disc.projection.col(c) = -disc.projection.col(c);
  }
  Eigen::MatrixXd z = centered * disc.projection;  // n x pd

  // farthest-first start: seeded first center, then repeated max-min distance
  std::vector<Eigen::Index> chosen;
  chosen.push_back(static_cast<Eigen::Index>(splitmix64(seed) % static_cast<std::uint64_t>(n)));
  Eigen::VectorXd min_d = (z.rowwise() - z.row(chosen[0])).rowwise().squaredNorm();
  while (static_cast<int>(chosen.size()) < k) {
    Eigen::Index far = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (min_d(i) > best) {
        best = min_d(i);
        far = i;
      }
    }
    if (best <= 0.0) {
      throw std::invalid_argument(
          "fit_discretizer: fewer than k distinct points after projection");
    }
    chosen.push_back(far);
    min_d = min_d.cwiseMin((z.rowwise() - z.row(far)).rowwise().squaredNorm());
  }
  Eigen::MatrixXd centers(k, z.cols());
  for (int c = 0; c < k; ++c) centers.row(c) = z.row(chosen[static_cast<size_t>(c)]);

  std::vector<int> assign_of(static_cast<size_t>(n), -1);
  for (int round = 0; round < 200; ++round) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int a = nearest_row(centers, z.row(i));
      if (a != assign_of[static_cast<size_t>(i)]) {
        assign_of[static_cast<size_t>(i)] = a;
        changed = true;
      }
    }
    std::vector<int> sizes(static_cast<size_t>(k), 0);
    for (int a : assign_of) ++sizes[static_cast<size_t>(a)];

    // repair: give an empty cluster the farthest member of the largest one
    for (int c = 0; c < k; ++c) {
      if (sizes[static_cast<size_t>(c)] > 0) continue;
      int big = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
      Eigen::Index far = -1;
      double best = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (assign_of[static_cast<size_t>(i)] != big) continue;
        double dd = (z.row(i) - centers.row(big)).squaredNorm();
        if (dd > best) {
          best = dd;
          far = i;
        }
      }
      centers.row(c) = z.row(far);
      assign_of[static_cast<size_t>(far)] = c;
      --sizes[static_cast<size_t>(big)];
      ++sizes[static_cast<size_t>(c)];
      changed = true;
    }
    for (int c = 0; c < k; ++c) {
      if (sizes[static_cast<size_t>(c)] == 0) continue;
      Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(z.cols());
      for (Eigen::Index i = 0; i < n; ++i) {
        if (assign_of[static_cast<size_t>(i)] == c) sum += z.row(i);
      }
      centers.row(c) = sum / sizes[static_cast<size_t>(c)];
    }
    if (!changed && round > 0) break;
  }

  std::vector<int> order(static_cast<size_t>(k));
  for (int c = 0; c < k; ++c) order[static_cast<size_t>(c)] = c;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return lex_less(centers.row(a), centers.row(b));
  });
  disc.centroids.resize(k, z.cols());
  for (int c = 0; c < k; ++c) disc.centroids.row(c) = centers.row(order[static_cast<size_t>(c)]);

  for (int c = 1; c < k; ++c) {
    if ((disc.centroids.row(c) - disc.centroids.row(c - 1)).cwiseAbs().maxCoeff() == 0.0) {
      throw std::runtime_error("fit_discretizer: duplicate centroids after convergence");
    }
  }
  return disc;
}

EmpiricalMarginals build_marginals(const std::vector<Eigen::VectorXd>& x1,
                                   const std::vector<long long>& y1,
                                   const std::vector<Eigen::VectorXd>& x2,
                                   const std::vector<long long>& y2,
                                   const std::vector<Eigen::VectorXd>& xm1,
                                   const std::vector<Eigen::VectorXd>& xm2,
                                   const Discretizer& disc1, const Discretizer& disc2,
                                   double smoothing) {
  if (x1.empty() || x2.empty() || xm1.empty()) {
    throw std::invalid_argument("build_marginals: empty dataset");
  }
  if (x1.size() != y1.size() || x2.size() != y2.size() || xm1.size() != xm2.size()) {
    throw std::invalid_argument("build_marginals: mismatched row counts");
  }
  if (smoothing < 0.0) throw std::invalid_argument("build_marginals: negative smoothing");

  std::set<long long> set1(y1.begin(), y1.end()), set2(y2.begin(), y2.end());
  if (set1 != set2) {
    throw std::invalid_argument("build_marginals: label sets of d1 and d2 differ");
  }
  std::vector<long long> labels(set1.begin(), set1.end());
  auto label_index = [&](long long y) {
    return static_cast<Eigen::Index>(
        std::lower_bound(labels.begin(), labels.end(), y) - labels.begin());
  };
  const Eigen::Index ny = static_cast<Eigen::Index>(labels.size());

  EmpiricalMarginals em;
  em.label_values = labels;
  em.smoothing = smoothing;
  em.n1 = static_cast<long long>(x1.size());
  em.n2 = static_cast<long long>(x2.size());
  em.nm = static_cast<long long>(xm1.size());
  em.counts1 = Eigen::MatrixXd::Zero(disc1.k, ny);
  em.counts2 = Eigen::MatrixXd::Zero(disc2.k, ny);
  em.counts12 = Eigen::MatrixXd::Zero(disc1.k, disc2.k);

  for (size_t i = 0; i < x1.size(); ++i) {
    em.counts1(disc1.assign(x1[i]), label_index(y1[i])) += 1.0;
  }
  for (size_t i = 0; i < x2.size(); ++i) {
    em.counts2(disc2.assign(x2[i]), label_index(y2[i])) += 1.0;
  }
  for (size_t i = 0; i < xm1.size(); ++i) {
    em.counts12(disc1.assign(xm1[i]), disc2.assign(xm2[i])) += 1.0;
  }

  auto normalize = [smoothing](const Eigen::MatrixXd& counts) {
    Eigen::MatrixXd m = counts.array() + smoothing;
    return Eigen::MatrixXd(m / m.sum());
  };
  em.marginals.m1 = normalize(em.counts1);
  em.marginals.m2 = normalize(em.counts2);
  em.marginals.m12 = normalize(em.counts12);
  return em;
}

ConsistencyGaps consistency_gaps(const PairwiseMarginals& m) {
  ConsistencyGaps g;
  g.p_y = tv_distance(m.m1.colwise().sum().transpose(), m.m2.colwise().sum().transpose());
  g.p_x1 = tv_distance(m.m1.rowwise().sum(), m.m12.rowwise().sum());
  g.p_x2 = tv_distance(m.m2.rowwise().sum(), m.m12.colwise().sum().transpose());
  return g;
}

PairwiseMarginals reconcile(const EmpiricalMarginals& em, double tolerance) {
  ConsistencyGaps gaps = consistency_gaps(em.marginals);
  if (gaps.max() > tolerance) {
    const char* name = "p(y)";
    double worst = gaps.p_y;
    if (gaps.p_x1 > worst) {
      name = "p(x1)";
      worst = gaps.p_x1;
    }
    if (gaps.p_x2 > worst) {
      name = "p(x2)";
      worst = gaps.p_x2;
    }
    throw InconsistentDataError(
        std::string("reconcile: shared marginal ") + name + " disagrees by TV " +
            std::to_string(worst) + " > tolerance " + std::to_string(tolerance),
        name, worst);
  }

  Eigen::VectorXd py = 0.5 * (em.marginals.m1.colwise().sum() +
                              em.marginals.m2.colwise().sum()).transpose();
  Eigen::VectorXd px1 = 0.5 * (em.marginals.m1.rowwise().sum() +
                               em.marginals.m12.rowwise().sum());
  Eigen::VectorXd px2 = 0.5 * (em.marginals.m2.rowwise().sum() +
                               em.marginals.m12.colwise().sum().transpose());

  PairwiseMarginals out = em.marginals;
  constexpr double kIpfTol = 1e-11;
  constexpr int kIpfIters = 20000;
  bool ok = ipf(out.m1, px1, py, kIpfTol, kIpfIters);
  ok = ipf(out.m2, px2, py, kIpfTol, kIpfIters) && ok;
  ok = ipf(out.m12, px1, px2, kIpfTol, kIpfIters) && ok;
  if (!ok) {
    throw InconsistentDataError(
        "reconcile: iterative proportional fitting did not reach the shared marginals "
        "(zero-cell structure is incompatible)",
        "ipf", consistency_gaps(out).max());
  }
  out.validate(1e-9);
  return out;
}

}  // namespace synergy
