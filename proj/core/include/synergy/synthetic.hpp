#pragma once

// Canonical example distributions, uniform simplex sampling, and the random
// sweep that stress-tests the sandwich S_lower <= S <= S_upper.

#include "synergy/bounds.hpp"
#include "synergy/dist_core.hpp"
#include "synergy/maxent.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace synergy {

// Names: disagreement_xor, agreement_xor, y_eq_x1, y_eq_x1_eq_x2, and_gate.
DiscreteJoint canonical(std::string_view name);
std::vector<std::string> canonical_names();

// Uniform draw from the simplex over dims.atoms() outcomes. Deterministic in
// (dims, seed, index); sample_joints(n, ...) enumerates indices 0..n-1.
DiscreteJoint sample_joint(Dims dims, std::uint64_t seed, std::uint64_t index);
std::vector<DiscreteJoint> sample_joints(int n, Dims dims, std::uint64_t seed);

struct SweepRecord {
  int idx = 0;
  bool ok = false;  // false when a solve failed; excluded from aggregates
  double s = 0.0;
  double s_agree = 0.0;
  double s_disagree = 0.0;
  double s_upper = 0.0;
  double alpha = 0.0;
  double r = 0.0;
  double u1 = 0.0;
  double u2 = 0.0;
};

struct SweepSummary {
  int evaluated = 0;  // records with ok == true
  int failures = 0;
  double mean_gap_agree = 0.0;     // mean of S - s_agree
  double mean_gap_disagree = 0.0;  // mean of S - s_disagree
  double mean_gap_lower = 0.0;     // mean of S - max(s_agree, s_disagree)
  double mean_gap_upper = 0.0;     // mean of s_upper - S
  double median_gap_agree = 0.0;
  double median_gap_disagree = 0.0;
  double median_gap_lower = 0.0;
  double median_gap_upper = 0.0;
  int violations_agree = 0;     // s_agree > S + 1e-6
  int violations_disagree = 0;  // s_disagree > S + 1e-6
  int violations_upper = 0;     // s_upper < S - 1e-6
  int high_synergy_count = 0;   // S > 0.6
  double mean_gap_upper_high_synergy = 0.0;
  // Boundary-fit diagnostics over near-tight points (bound within 10% of S):
  // least-squares slope of S on the bound, and the mean upper-bound offset.
  double slope_agree = 0.0;
  double slope_disagree = 0.0;
  double upper_offset = 0.0;
  int near_tight_agree = 0;
  int near_tight_disagree = 0;
  int near_tight_upper = 0;
};

struct SweepReport {
  int n_samples = 0;
  Dims dims;
  std::uint64_t seed = 0;
  std::string sampling = "flat-dirichlet";
  std::vector<SweepRecord> records;
  SweepSummary summary;
};

// Full-joint S per sample against the marginals-only bounds on the same
// sample. jobs > 1 splits samples across threads; reports are byte-identical
// regardless of jobs because records aggregate in index order.
SweepReport run_sweep(int n, Dims dims, const SolverConfig& cfg,
                      const DisagreementConfig& dcfg, std::uint64_t seed, int jobs = 1);

}  // namespace synergy
