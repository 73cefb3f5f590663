#include "doctest.h"

#include "synergy/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

using namespace synergy;

TEST_CASE("canonical table lookup") {
  auto names = canonical_names();
  CHECK(names.size() == 5);
  CHECK(std::find(names.begin(), names.end(), "disagreement_xor") != names.end());
  for (const auto& n : names) {
    DiscreteJoint j = canonical(n);
    double total = std::accumulate(j.flat().begin(), j.flat().end(), 0.0);
    CHECK(std::abs(total - 1.0) <= 1e-12);
  }
  CHECK_THROWS_AS(canonical("nope"), std::invalid_argument);
}

TEST_CASE("canonical gate entries") {
  DiscreteJoint xo = canonical("agreement_xor");
  CHECK(xo.dims() == Dims{2, 2, 2});
  CHECK(xo(0, 0, 0) == 0.25);
  CHECK(xo(0, 1, 1) == 0.25);
  CHECK(xo(1, 0, 1) == 0.25);
  CHECK(xo(1, 1, 0) == 0.25);
  CHECK(xo(0, 0, 1) == 0.0);

  DiscreteJoint ag = canonical("and_gate");
  CHECK(ag(1, 1, 1) == 0.25);
  CHECK(ag(1, 1, 0) == 0.0);
  CHECK(ag(0, 1, 0) == 0.25);

  DiscreteJoint eq = canonical("y_eq_x1_eq_x2");
  CHECK(eq(0, 0, 0) == 0.5);
  CHECK(eq(1, 1, 1) == 0.5);
  CHECK(eq(0, 1, 0) == 0.0);

  DiscreteJoint cp = canonical("y_eq_x1");
  CHECK(cp(0, 0, 0) == 0.25);
  CHECK(cp(0, 1, 0) == 0.25);
  CHECK(cp(1, 0, 1) == 0.25);
  CHECK(cp(0, 0, 1) == 0.0);
}

TEST_CASE("the mixed table is the published one, renormalized") {
  DiscreteJoint t = canonical("disagreement_xor");
  const double raw[8] = {0.0, 0.05, 0.03, 0.28, 0.53, 0.03, 0.01, 0.06};
  const std::vector<double>& f = t.flat();
  REQUIRE(f.size() == 8);
  for (int i = 0; i < 8; ++i) {
    CHECK(f[i] == doctest::Approx(raw[i] / 0.99).epsilon(1e-12));
  }
  PairwiseMarginals m = pairwise_marginals(t);
  CHECK(m.m1(0, 0) == doctest::Approx(0.03 / 0.99).epsilon(1e-12));
  CHECK(m.m1(0, 1) == doctest::Approx(0.33 / 0.99).epsilon(1e-12));
}

TEST_CASE("simplex sampling is deterministic and normalized") {
  DiscreteJoint a = sample_joint({2, 2, 2}, 7, 11);
  DiscreteJoint b = sample_joint({2, 2, 2}, 7, 11);
  CHECK(a.flat() == b.flat());

  DiscreteJoint c = sample_joint({2, 2, 2}, 7, 12);
  CHECK(a.flat() != c.flat());
  DiscreteJoint d = sample_joint({2, 2, 2}, 8, 11);
  CHECK(a.flat() != d.flat());

  for (int i = 0; i < 200; ++i) {
    DiscreteJoint j = sample_joint({2, 3, 2}, 7, static_cast<std::uint64_t>(i));
    double total = std::accumulate(j.flat().begin(), j.flat().end(), 0.0);
    CHECK(std::abs(total - 1.0) <= 1e-12);
    CHECK(*std::min_element(j.flat().begin(), j.flat().end()) >= 0.0);
  }
}

TEST_CASE("simplex sampling is uniform in expectation") {
  const int n = 100000;
  double mean0 = 0.0;
  for (int i = 0; i < n; ++i) {
    mean0 += sample_joint({2, 2, 2}, 9, static_cast<std::uint64_t>(i)).flat()[0];
  }
  mean0 /= n;
  CHECK(std::abs(mean0 - 0.125) <= 0.005);
}

TEST_CASE("sample_joints enumerates the same sequence") {
  auto batch = sample_joints(5, {2, 2, 2}, 13);
  REQUIRE(batch.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(batch[i].flat() == sample_joint({2, 2, 2}, 13, static_cast<std::uint64_t>(i)).flat());
  }
}

TEST_CASE("sweep reports are reproducible and thread-count independent") {
  SolverConfig cfg;
  DisagreementConfig dcfg;
  SweepReport a = run_sweep(60, {2, 2, 2}, cfg, dcfg, 5);
  SweepReport b = run_sweep(60, {2, 2, 2}, cfg, dcfg, 5);
  SweepReport c = run_sweep(60, {2, 2, 2}, cfg, dcfg, 5, 4);

  REQUIRE(a.records.size() == 60);
  CHECK(a.summary.evaluated + a.summary.failures == 60);
  CHECK(a.sampling == "flat-dirichlet");
  for (size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].s == b.records[i].s);
    CHECK(a.records[i].s == c.records[i].s);
    CHECK(a.records[i].s_upper == c.records[i].s_upper);
    CHECK(a.records[i].alpha == c.records[i].alpha);
    CHECK(a.records[i].idx == static_cast<int>(i));
  }
  CHECK(a.summary.mean_gap_lower == c.summary.mean_gap_lower);
  CHECK(a.summary.median_gap_upper == c.summary.median_gap_upper);
}

TEST_CASE("sweep aggregates respect the sandwich on a small run") {
  SweepReport r = run_sweep(120, {2, 2, 2}, {}, {}, 1);
  CHECK(r.summary.failures == 0);
  CHECK(r.summary.violations_agree == 0);
  CHECK(r.summary.violations_disagree == 0);
  CHECK(r.summary.violations_upper == 0);
  CHECK(r.summary.mean_gap_agree >= 0.0);
  CHECK(r.summary.mean_gap_upper >= 0.0);
  CHECK(r.summary.mean_gap_lower <= r.summary.mean_gap_agree + 1e-12);
  CHECK(r.summary.mean_gap_lower <= r.summary.mean_gap_disagree + 1e-12);
  for (const auto& rec : r.records) {
    CHECK(rec.ok);
    CHECK(rec.s >= -1e-9);
  }
}
