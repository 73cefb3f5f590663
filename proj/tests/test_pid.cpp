#include "doctest.h"

#include "synergy/pid.hpp"
#include "synergy/synthetic.hpp"

#include <cmath>

using namespace synergy;

namespace {

PidResult full(const char* name) { return compute_pid_full(canonical(name)); }

}  // namespace

TEST_CASE("decomposition of the canonical gates") {
  PidResult xo = full("agreement_xor");
  CHECK(xo.converged);
  CHECK(xo.r == doctest::Approx(0.0).epsilon(1e-4));
  CHECK(xo.u1 == doctest::Approx(0.0).epsilon(1e-4));
  CHECK(xo.u2 == doctest::Approx(0.0).epsilon(1e-4));
  REQUIRE(xo.s.has_value());
  CHECK(*xo.s == doctest::Approx(1.0).epsilon(1e-4));
  REQUIRE(xo.total_information.has_value());
  CHECK(*xo.total_information == doctest::Approx(1.0).epsilon(1e-9));

  PidResult eq = full("y_eq_x1_eq_x2");
  CHECK(eq.r == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(eq.u1 == doctest::Approx(0.0).epsilon(1e-4));
  CHECK(eq.u2 == doctest::Approx(0.0).epsilon(1e-4));
  CHECK(*eq.s == doctest::Approx(0.0).epsilon(1e-4));

  PidResult cp = full("y_eq_x1");
  CHECK(cp.r == doctest::Approx(0.0).epsilon(1e-4));
  CHECK(cp.u1 == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(cp.u2 == doctest::Approx(0.0).epsilon(1e-4));
  CHECK(*cp.s == doctest::Approx(0.0).epsilon(1e-4));

  PidResult ag = full("and_gate");
  CHECK(std::abs(ag.r - 0.311278124659) <= 1e-3);
  CHECK(std::abs(ag.u1) <= 1e-3);
  CHECK(std::abs(ag.u2) <= 1e-3);
  CHECK(std::abs(*ag.s - 0.5) <= 1e-3);
  CHECK(ag.q_objective == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("marginals-only path agrees with the full decomposition") {
  for (int i = 0; i < 30; ++i) {
    DiscreteJoint j = sample_joint({2, 2, 2}, 61, static_cast<std::uint64_t>(i));
    PidResult a = compute_rui(pairwise_marginals(j));
    PidResult b = compute_pid_full(j);
    CHECK(std::abs(a.r - b.r) <= 1e-8);
    CHECK(std::abs(a.u1 - b.u1) <= 1e-8);
    CHECK(std::abs(a.u2 - b.u2) <= 1e-8);
    CHECK_FALSE(a.s.has_value());
    CHECK_FALSE(a.total_information.has_value());
    CHECK(b.s.has_value());
  }
}

TEST_CASE("components are nonnegative and sum to the total information") {
  for (int i = 0; i < 50; ++i) {
    Dims d = (i % 2 == 0) ? Dims{2, 2, 2} : Dims{2, 3, 2};
    DiscreteJoint j = sample_joint(d, 62, static_cast<std::uint64_t>(i));
    PidResult p = compute_pid_full(j);
    CHECK(p.converged);
    CHECK(p.r >= 0.0);
    CHECK(p.u1 >= 0.0);
    CHECK(p.u2 >= 0.0);
    CHECK(*p.s >= 0.0);
    CHECK(std::abs(p.r + p.u1 + p.u2 + *p.s - *p.total_information) <= 1e-6);
  }
}

TEST_CASE("the decomposition reproduces the mutual informations") {
  // R + U1 = I(X1;Y), R + U2 = I(X2;Y), and the four parts tile the total.
  for (int i = 0; i < 40; ++i) {
    DiscreteJoint j = sample_joint({2, 2, 2}, 63, static_cast<std::uint64_t>(i));
    PidResult p = compute_pid_full(j);
    double i1 = mutual_info(j, {0}, {2});
    double i2 = mutual_info(j, {1}, {2});
    double i12 = mutual_info(j, {0, 1}, {2});
    CHECK(std::abs(p.r + p.u1 - i1) <= 1e-6);
    CHECK(std::abs(p.r + p.u2 - i2) <= 1e-6);
    CHECK(std::abs(p.r + p.u1 + p.u2 + *p.s - i12) <= 1e-6);
    CHECK(std::abs(*p.total_information - i12) <= 1e-9);
    // S is the information the surrogate cannot express
    double h_y = entropy_bits(pairwise_marginals(j).p_y());
    CHECK(std::abs(*p.s - (i12 - (h_y - p.q_objective))) <= 1e-6);
  }
}

TEST_CASE("raw values only differ from reported ones by negative rounding") {
  for (int i = 0; i < 30; ++i) {
    DiscreteJoint j = sample_joint({2, 2, 2}, 64, static_cast<std::uint64_t>(i));
    PidResult p = compute_pid_full(j);
    CHECK(p.r >= p.r_raw);
    CHECK(p.u1 >= p.u1_raw);
    CHECK(p.u2 >= p.u2_raw);
    CHECK(*p.s >= *p.s_raw);
    CHECK(p.r - p.r_raw <= 1e-8);
    CHECK(p.u1 - p.u1_raw <= 1e-8);
    CHECK(p.u2 - p.u2_raw <= 1e-8);
    CHECK(*p.s - *p.s_raw <= 1e-8);
  }
}

TEST_CASE("a mixed redundant and synergistic table") {
  PidResult p = full("disagreement_xor");
  CHECK(p.converged);
  CHECK(std::abs(p.r - 0.440720695606) <= 1e-6);
  CHECK(std::abs(p.u1 - 0.015657598916) <= 1e-6);
  CHECK(std::abs(p.u2 - 0.010911025808) <= 1e-6);
  CHECK(std::abs(*p.s - 0.160145720381) <= 1e-6);
  CHECK(std::abs(p.q_objective - 0.516086869810) <= 1e-6);
  CHECK(std::abs(*p.total_information - 0.627435040710) <= 1e-9);
}
