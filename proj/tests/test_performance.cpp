#include "doctest.h"

#include "synergy/performance.hpp"
#include "synergy/synthetic.hpp"

#include <cmath>
#include <stdexcept>

using namespace synergy;

TEST_CASE("closed-form accuracy window") {
  auto [lo0, hi0] = accuracy_bounds(0.0, 1.0, 2);
  CHECK(lo0 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(hi0 == doctest::Approx(1.0).epsilon(1e-12));

  auto [lo1, hi1] = accuracy_bounds(1.0, 1.0, 2);
  CHECK(lo1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hi1 == doctest::Approx(2.0).epsilon(1e-12));

  auto [lo2, hi2] = accuracy_bounds(1.0, 2.0, 4);
  CHECK(lo2 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(hi2 == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(accuracy_bounds(0.5, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(accuracy_bounds(0.5, 1.0, 0), std::invalid_argument);
}

TEST_CASE("information window on deterministic gates") {
  for (const char* name : {"y_eq_x1_eq_x2", "y_eq_x1"}) {
    DiscreteJoint j = canonical(name);
    PairwiseMarginals m = pairwise_marginals(j);
    PidResult rui = compute_rui(m);
    SynergyBounds sb = bounds_summary(m);
    auto [ilo, ihi] = total_information_window(rui, sb);
    CHECK(std::abs(ilo - 1.0) <= 1e-5);
    CHECK(std::abs(ihi - 1.0) <= 1e-5);
  }
  // pure synergy: the marginals alone cannot certify any information, but
  // the coupling bound still pins the ceiling
  PairwiseMarginals m = pairwise_marginals(canonical("agreement_xor"));
  PidResult rui = compute_rui(m);
  SynergyBounds sb = bounds_summary(m);
  auto [ilo, ihi] = total_information_window(rui, sb);
  CHECK(std::abs(ilo - 0.0) <= 1e-5);
  CHECK(std::abs(ihi - 1.0) <= 1e-5);
}

TEST_CASE("midpoint estimate and clamping") {
  PerformanceBounds pb = estimate_pm(1.0, 1.0, 1.0, 2);
  CHECK(pb.p_lower == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pb.p_upper == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(pb.p_upper_clamped == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pb.p_m_hat == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(pb.y_cardinality == 2);
  CHECK_FALSE(pb.y_tv_from_uniform.has_value());

  PerformanceBounds z = estimate_pm(0.0, 0.0, 1.0, 2);
  CHECK(z.p_lower == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(z.p_upper == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(z.p_m_hat == doctest::Approx(0.75).epsilon(1e-12));

  PerformanceBounds w = estimate_pm(0.0, 0.63, 1.0, 2);
  CHECK(w.p_upper == doctest::Approx(1.63).epsilon(1e-12));
  CHECK(w.p_upper_clamped == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w.i_lower == 0.0);
  CHECK(w.i_upper == 0.63);
}

TEST_CASE("both ends grow strictly with information") {
  double prev_lo = -1.0, prev_hi = -1.0;
  for (int k = 0; k <= 10; ++k) {
    double i = 0.1 * k;
    auto [lo, hi] = accuracy_bounds(i, 1.0, 2);
    CHECK(lo > prev_lo);
    CHECK(hi > prev_hi);
    prev_lo = lo;
    prev_hi = hi;
  }
}

TEST_CASE("true Bayes accuracy lies inside the closed-form envelope") {
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    DiscreteJoint j = sample_joint({2, 2, 2}, 73, static_cast<std::uint64_t>(i));
    double acc = exact_bayes_accuracy(j);
    double i12 = mutual_info(j, {0, 1}, {2});
    Eigen::VectorXd py = pairwise_marginals(j).p_y();
    double h_y = entropy_bits(py);
    auto [lo, hi] = accuracy_bounds(i12, h_y, static_cast<int>(py.size()));
    if (acc < lo - 1e-9 || acc > hi + 1e-9) ++violations;
    CHECK(acc <= 1.0 + 1e-12);
  }
  CHECK(violations == 0);
}

TEST_CASE("skewed label marginals are flagged") {
  Eigen::VectorXd skew(2);
  skew << 0.9, 0.1;
  PerformanceBounds pb = estimate_pm(0.1, 0.2, skew);
  REQUIRE(pb.y_tv_from_uniform.has_value());
  CHECK(*pb.y_tv_from_uniform == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(pb.uniform_y_strained);
  CHECK(pb.y_cardinality == 2);
  CHECK(std::abs(pb.h_y - entropy_bits(skew)) <= 1e-12);

  Eigen::VectorXd mild(2);
  mild << 0.52, 0.48;
  PerformanceBounds ok = estimate_pm(0.1, 0.2, mild);
  CHECK(*ok.y_tv_from_uniform == doctest::Approx(0.02).epsilon(1e-12));
  CHECK_FALSE(ok.uniform_y_strained);
}

TEST_CASE("bayes accuracy of the canonical gates") {
  CHECK(exact_bayes_accuracy(canonical("agreement_xor")) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(exact_bayes_accuracy(canonical("and_gate")) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(exact_bayes_accuracy(canonical("y_eq_x1")) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(exact_bayes_accuracy(canonical("disagreement_xor")) - 0.929292929293) <= 1e-9);
}
