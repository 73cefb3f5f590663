#include "synergy/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace synergy {

namespace {

std::string opt(const std::optional<double>& v) {
  return v ? json_number(*v) : "null";
}

const char* boolean(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string json_number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string to_json(const PidResult& r) {
  std::ostringstream o;
  o << "{\"schema\":1"
    << ",\"r\":" << json_number(r.r)
    << ",\"u1\":" << json_number(r.u1)
    << ",\"u2\":" << json_number(r.u2)
    << ",\"s\":" << opt(r.s)
    << ",\"total_information\":" << opt(r.total_information)
    << ",\"q_objective\":" << json_number(r.q_objective)
    << ",\"residual\":" << json_number(r.residual)
    << ",\"converged\":" << boolean(r.converged)
    << ",\"raw\":{\"r\":" << json_number(r.r_raw)
    << ",\"u1\":" << json_number(r.u1_raw)
    << ",\"u2\":" << json_number(r.u2_raw)
    << ",\"s\":" << opt(r.s_raw) << "}}";
  return o.str();
}

std::string to_json(const SynergyBounds& b) {
  std::ostringstream o;
  o << "{\"schema\":1"
    << ",\"s_agree\":" << json_number(b.s_agree)
    << ",\"s_disagree\":" << json_number(b.s_disagree)
    << ",\"s_lower\":" << json_number(b.s_lower)
    << ",\"effective_lower\":" << json_number(b.effective_lower)
    << ",\"s_upper\":" << json_number(b.s_upper)
    << ",\"alpha\":" << json_number(b.alpha)
    << ",\"c_effective\":" << json_number(b.c_effective)
    << ",\"r\":" << json_number(b.r)
    << ",\"u1\":" << json_number(b.u1)
    << ",\"u2\":" << json_number(b.u2)
    << ",\"diagnostics\":{"
    << "\"q_residual\":" << json_number(b.diagnostics.q_residual)
    << ",\"r1_residual\":" << json_number(b.diagnostics.r1_residual)
    << ",\"r2_residual\":" << json_number(b.diagnostics.r2_residual)
    << ",\"q_converged\":" << boolean(b.diagnostics.q_converged)
    << ",\"r1_converged\":" << boolean(b.diagnostics.r1_converged)
    << ",\"r2_converged\":" << boolean(b.diagnostics.r2_converged)
    << ",\"s_agree_x1\":" << json_number(b.diagnostics.s_agree_x1)
    << ",\"s_agree_x2\":" << json_number(b.diagnostics.s_agree_x2)
    << ",\"q_objective\":" << json_number(b.diagnostics.q_objective)
    << ",\"coupling_winner\":" << b.diagnostics.coupling_winner
    << ",\"coupling_terms\":[" << json_number(b.diagnostics.coupling_terms[0])
    << ',' << json_number(b.diagnostics.coupling_terms[1])
    << ',' << json_number(b.diagnostics.coupling_terms[2]) << ']'
    << ",\"h_y\":" << json_number(b.diagnostics.h_y)
    << ",\"y_cardinality\":" << b.diagnostics.y_cardinality
    << "}}";
  return o.str();
}

std::string to_json(const PerformanceBounds& p) {
  std::ostringstream o;
  o << "{\"schema\":1"
    << ",\"p_lower\":" << json_number(p.p_lower)
    << ",\"p_upper\":" << json_number(p.p_upper)
    << ",\"p_upper_clamped\":" << json_number(p.p_upper_clamped)
    << ",\"p_m_hat\":" << json_number(p.p_m_hat)
    << ",\"i_lower\":" << json_number(p.i_lower)
    << ",\"i_upper\":" << json_number(p.i_upper)
    << ",\"h_y\":" << json_number(p.h_y)
    << ",\"y_cardinality\":" << p.y_cardinality
    << ",\"y_tv_from_uniform\":" << opt(p.y_tv_from_uniform)
    << ",\"uniform_y_strained\":" << boolean(p.uniform_y_strained) << '}';
  return o.str();
}

std::string to_json(const CouplingResult& c) {
  std::ostringstream o;
  o << "{\"schema\":1"
    << ",\"entropy\":" << json_number(c.entropy_bits)
    << ",\"glb_entropy\":" << json_number(c.glb_entropy_bits)
    << ",\"gap\":" << json_number(c.gap_bits) << '}';
  return o.str();
}

std::string to_json(const SweepReport& r) {
  const SweepSummary& s = r.summary;
  std::ostringstream o;
  o << "{\"schema\":1"
    << ",\"n_samples\":" << r.n_samples
    << ",\"dims\":[" << r.dims.n1 << ',' << r.dims.n2 << ',' << r.dims.ny << ']'
    << ",\"seed\":" << r.seed
    << ",\"sampling\":\"" << r.sampling << '"'
    << ",\"summary\":{"
    << "\"evaluated\":" << s.evaluated
    << ",\"failures\":" << s.failures
    << ",\"mean_gap_agree\":" << json_number(s.mean_gap_agree)
    << ",\"mean_gap_disagree\":" << json_number(s.mean_gap_disagree)
    << ",\"mean_gap_lower\":" << json_number(s.mean_gap_lower)
    << ",\"mean_gap_upper\":" << json_number(s.mean_gap_upper)
    << ",\"median_gap_agree\":" << json_number(s.median_gap_agree)
    << ",\"median_gap_disagree\":" << json_number(s.median_gap_disagree)
    << ",\"median_gap_lower\":" << json_number(s.median_gap_lower)
    << ",\"median_gap_upper\":" << json_number(s.median_gap_upper)
    << ",\"violations_agree\":" << s.violations_agree
    << ",\"violations_disagree\":" << s.violations_disagree
    << ",\"violations_upper\":" << s.violations_upper
    << ",\"high_synergy_count\":" << s.high_synergy_count
    << ",\"mean_gap_upper_high_synergy\":" << json_number(s.mean_gap_upper_high_synergy)
    << ",\"slope_agree\":" << json_number(s.slope_agree)
    << ",\"slope_disagree\":" << json_number(s.slope_disagree)
    << ",\"upper_offset\":" << json_number(s.upper_offset)
    << ",\"near_tight_agree\":" << s.near_tight_agree
    << ",\"near_tight_disagree\":" << s.near_tight_disagree
    << ",\"near_tight_upper\":" << s.near_tight_upper
    << "}}";
  return o.str();
}

}  // namespace synergy
