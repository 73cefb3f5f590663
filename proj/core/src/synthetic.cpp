#include "synergy/synthetic.hpp"

#include "synergy/errors.hpp"
#include "synergy/pid.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

namespace synergy {

namespace {

DiscreteJoint make_joint(Dims d, std::vector<double> t) {
  double sum = 0.0;
  for (double v : t) sum += v;
  for (double& v : t) v /= sum;
  return DiscreteJoint(d, std::move(t));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

}  // namespace

DiscreteJoint canonical(std::string_view name) {
  const Dims d{2, 2, 2};
  if (name == "disagreement_xor") {
    return make_joint(d, {0.0, 0.05, 0.03, 0.28, 0.53, 0.03, 0.01, 0.06});
  }
  if (name == "agreement_xor") {
    return make_joint(d, {0.25, 0.0, 0.0, 0.25, 0.0, 0.25, 0.25, 0.0});
  }
  if (name == "y_eq_x1") {
    return make_joint(d, {0.25, 0.0, 0.25, 0.0, 0.0, 0.25, 0.0, 0.25});
  }
  if (name == "y_eq_x1_eq_x2") {
    return make_joint(d, {0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5});
  }
  if (name == "and_gate") {
    return make_joint(d, {0.25, 0.0, 0.25, 0.0, 0.25, 0.0, 0.0, 0.25});
  }
  throw std::invalid_argument("canonical: unknown name '" + std::string(name) + "'");
}

std::vector<std::string> canonical_names() {
  return {"disagreement_xor", "agreement_xor", "y_eq_x1", "y_eq_x1_eq_x2", "and_gate"};
}

DiscreteJoint sample_joint(Dims dims, std::uint64_t seed, std::uint64_t index) {
  if (dims.n1 < 1 || dims.n2 < 1 || dims.ny < 1) {
    throw std::invalid_argument("sample_joint: dims must be positive");
  }
  std::mt19937_64 eng(splitmix64(seed + index));
  const int n = dims.atoms();
  std::vector<double> p(static_cast<size_t>(n));
  double sum = 0.0;
  while (sum <= 0.0) {
    for (int i = 0; i < n; ++i) {
      // top 53 bits, shifted into (0, 1] so the log is finite
      double u = static_cast<double>((eng() >> 11) + 1) * 0x1.0p-53;
      p[static_cast<size_t>(i)] = -std::log(u);
      sum += p[static_cast<size_t>(i)];
    }
  }
  for (double& v : p) v /= sum;
  return DiscreteJoint(dims, std::move(p));
}

std::vector<DiscreteJoint> sample_joints(int n, Dims dims, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_joints: n must be >= 1");
  std::vector<DiscreteJoint> out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    out.push_back(sample_joint(dims, seed, static_cast<std::uint64_t>(i)));
  }
  return out;
}

SweepReport run_sweep(int n, Dims dims, const SolverConfig& cfg,
                      const DisagreementConfig& dcfg, std::uint64_t seed, int jobs) {
  if (n < 1) throw std::invalid_argument("run_sweep: n must be >= 1");
  SweepReport report;
  report.n_samples = n;
  report.dims = dims;
  report.seed = seed;
  report.records.resize(static_cast<size_t>(n));

  auto evaluate_one = [&](int idx) {
    SweepRecord rec;
    rec.idx = idx;
    try {
      DiscreteJoint j = sample_joint(dims, seed, static_cast<std::uint64_t>(idx));
      PidResult pid = compute_pid_full(j, cfg);
      SynergyBounds sb = bounds_summary(pairwise_marginals(j), cfg, dcfg);
      rec.ok = true;
      rec.s = pid.s.value();
      rec.s_agree = sb.s_agree;
      rec.s_disagree = sb.s_disagree;
      rec.s_upper = sb.s_upper;
      rec.alpha = sb.alpha;
      rec.r = sb.r;
      rec.u1 = sb.u1;
      rec.u2 = sb.u2;
    } catch (const SolverError&) {
      rec.ok = false;
    } catch (const InfeasibleError&) {
      rec.ok = false;
    }
    report.records[static_cast<size_t>(idx)] = rec;
  };

  int workers = std::max(1, jobs);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) evaluate_one(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) evaluate_one(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  SweepSummary& sm = report.summary;
  std::vector<double> ga, gd, gl, gu;
  double slope_a_xy = 0.0, slope_a_xx = 0.0;
  double slope_d_xy = 0.0, slope_d_xx = 0.0;
  double upper_offset_sum = 0.0;
  double high_gap_sum = 0.0;
  constexpr double kSlack = 1e-6;
  for (const SweepRecord& rec : report.records) {
    if (!rec.ok) {
      ++sm.failures;
      continue;
    }
    ++sm.evaluated;
    double lower = std::max(rec.s_agree, rec.s_disagree);
    ga.push_back(rec.s - rec.s_agree);
    gd.push_back(rec.s - rec.s_disagree);
    gl.push_back(rec.s - lower);
    gu.push_back(rec.s_upper - rec.s);
    if (rec.s_agree > rec.s + kSlack) ++sm.violations_agree;
    if (rec.s_disagree > rec.s + kSlack) ++sm.violations_disagree;
    if (rec.s_upper < rec.s - kSlack) ++sm.violations_upper;
    if (rec.s > 0.6) {
      ++sm.high_synergy_count;
      high_gap_sum += rec.s_upper - rec.s;
    }
    if (rec.s > kSlack) {
      double tol = 0.1 * rec.s;
      if (std::abs(rec.s - rec.s_agree) <= tol) {
        ++sm.near_tight_agree;
        slope_a_xy += rec.s_agree * rec.s;
        slope_a_xx += rec.s_agree * rec.s_agree;
      }
      if (std::abs(rec.s - rec.s_disagree) <= tol) {
        ++sm.near_tight_disagree;
        slope_d_xy += rec.s_disagree * rec.s;
        slope_d_xx += rec.s_disagree * rec.s_disagree;
      }
      if (std::abs(rec.s_upper - rec.s) <= tol) {
        ++sm.near_tight_upper;
        upper_offset_sum += rec.s_upper - rec.s;
      }
    }
  }
  auto mean = [](const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  sm.mean_gap_agree = mean(ga);
  sm.mean_gap_disagree = mean(gd);
  sm.mean_gap_lower = mean(gl);
  sm.mean_gap_upper = mean(gu);
  sm.median_gap_agree = median(std::move(ga));
  sm.median_gap_disagree = median(std::move(gd));
  sm.median_gap_lower = median(std::move(gl));
  sm.median_gap_upper = median(std::move(gu));
  if (sm.high_synergy_count > 0) {
    sm.mean_gap_upper_high_synergy = high_gap_sum / sm.high_synergy_count;
  }
  if (slope_a_xx > 0.0) sm.slope_agree = slope_a_xy / slope_a_xx;
  if (slope_d_xx > 0.0) sm.slope_disagree = slope_d_xy / slope_d_xx;
  if (sm.near_tight_upper > 0) sm.upper_offset = upper_offset_sum / sm.near_tight_upper;
  return report;
}

}  // namespace synergy
