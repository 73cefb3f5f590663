#include "synergy/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <utility>
#include <vector>

namespace synergy {

namespace {

std::vector<double> sorted_padded(const std::vector<double>& v, size_t n) {
  std::vector<double> s(v);
  std::sort(s.begin(), s.end(), std::greater<double>());
  s.resize(n, 0.0);
  return s;
}

}  // namespace

MarginalDistribution majorization_glb(const MarginalDistribution& p,
                                      const MarginalDistribution& q) {
  const size_t n = std::max(p.p().size(), q.p().size());
  std::vector<double> ps = sorted_padded(p.p(), n);
  std::vector<double> qs = sorted_padded(q.p(), n);
  std::vector<double> a(n);
  double cp = 0.0, cq = 0.0;
  double prev_min = 0.0;
  int prev_side = 2;  // 0: p side, 1: q side, 2: both equal
  for (size_t i = 0; i < n; ++i) {
    cp += ps[i];
    cq += qs[i];
    double m;
    int side;
    if (cp < cq) {
      m = cp;
      side = 0;
    } else if (cq < cp) {
      m = cq;
      side = 1;
    } else {
      m = cp;
      side = 2;
    }
    // When the same prefix side wins twice in a row the increment is exactly
    // that side's sorted entry; taking it directly keeps glb(p, p) == sorted p
    // free of cancellation noise.
    if ((side == 0 || side == 2) && (prev_side == 0 || prev_side == 2)) {
      a[i] = ps[i];
    } else if ((side == 1 || side == 2) && (prev_side == 1 || prev_side == 2)) {
      a[i] = qs[i];
    } else {
      a[i] = m - prev_min;
    }
    if (a[i] < 0.0) a[i] = 0.0;
    prev_min = m;
    prev_side = side;
  }
  // Guard against rounding drift in the total.
  double sum = std::accumulate(a.begin(), a.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-13 && sum > 0.0) {
    for (double& v : a) v /= sum;
  }
  return MarginalDistribution(std::move(a));
}

double glb_entropy(const MarginalDistribution& p, const MarginalDistribution& q) {
  return entropy_bits(majorization_glb(p, q));
}

CouplingResult greedy_coupling(const MarginalDistribution& p, const MarginalDistribution& q) {
  const int np = p.size(), nq = q.size();

  // Indices sorted by decreasing mass; heap keys are sorted positions so that
  // ties resolve to the lowest position deterministically.
  std::vector<int> order_p(np), order_q(nq);
  std::iota(order_p.begin(), order_p.end(), 0);
  std::iota(order_q.begin(), order_q.end(), 0);
  std::stable_sort(order_p.begin(), order_p.end(),
                   [&](int a, int b) { return p[a] > p[b]; });
  std::stable_sort(order_q.begin(), order_q.end(),
                   [&](int a, int b) { return q[a] > q[b]; });

  using Entry = std::pair<double, int>;  // (remaining mass, sorted position)
  auto cmp = [](const Entry& a, const Entry& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> hp(cmp), hq(cmp);
  for (int i = 0; i < np; ++i) {
    if (p[order_p[i]] > 0.0) hp.push({p[order_p[i]], i});
  }
  for (int i = 0; i < nq; ++i) {
    if (q[order_q[i]] > 0.0) hq.push({q[order_q[i]], i});
  }

  CouplingResult res;
  res.matrix = Eigen::MatrixXd::Zero(np, nq);
  std::vector<double> masses;
  masses.reserve(static_cast<size_t>(np + nq));
  while (!hp.empty() && !hq.empty()) {
    auto [vp, ip] = hp.top();
    auto [vq, iq] = hq.top();
    hp.pop();
    hq.pop();
    double m = std::min(vp, vq);
    res.matrix(order_p[ip], order_q[iq]) += m;
    masses.push_back(m);
    if (vp - m > 0.0) hp.push({vp - m, ip});
    if (vq - m > 0.0) hq.push({vq - m, iq});
  }

  res.entropy_bits = entropy_bits(std::span<const double>(masses));
  res.glb_entropy_bits = glb_entropy(p, q);
  res.gap_bits = res.entropy_bits - res.glb_entropy_bits;
  return res;
}

MinJointEntropyBound min_joint_entropy_lower_bound(const PairwiseMarginals& m) {
  m.validate();
  auto flat = [](const Eigen::MatrixXd& mat) {
    // Row-major atom order to match the documented CSV layout.
    std::vector<double> v;
    v.reserve(static_cast<size_t>(mat.size()));
    for (Eigen::Index i = 0; i < mat.rows(); ++i) {
      for (Eigen::Index j = 0; j < mat.cols(); ++j) v.push_back(mat(i, j));
    }
    return MarginalDistribution(std::move(v));
  };
  auto vec = [](const Eigen::VectorXd& x) {
    return MarginalDistribution(std::vector<double>(x.data(), x.data() + x.size()));
  };
  MinJointEntropyBound b;
  b.terms[0] = glb_entropy(flat(m.m12), vec(m.p_y()));
  b.terms[1] = glb_entropy(flat(m.m1), vec(m.p_x2()));
  b.terms[2] = glb_entropy(flat(m.m2), vec(m.p_x1()));
  b.winner = 0;
  for (int t = 1; t < 3; ++t) {
    if (b.terms[t] > b.terms[b.winner]) b.winner = t;
  }
  b.bits = b.terms[b.winner];
  return b;
}

}  // namespace synergy
