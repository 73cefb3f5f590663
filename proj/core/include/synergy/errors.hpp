#pragma once

#include <stdexcept>
#include <string>

namespace synergy {

// Constraint system has no feasible point (e.g. marginals that disagree on a
// shared sub-marginal beyond tolerance).
class InfeasibleError : public std::runtime_error {
public:
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// Empirical inputs disagree with each other beyond the caller's tolerance.
class InconsistentDataError : public std::runtime_error {
public:
  InconsistentDataError(const std::string& what, std::string marginal_name, double tv_gap)
      : std::runtime_error(what), marginal_name_(std::move(marginal_name)), tv_gap_(tv_gap) {}

  const std::string& marginal_name() const { return marginal_name_; }
  double tv_gap() const { return tv_gap_; }

private:
  std::string marginal_name_;
  double tv_gap_;
};

}  // namespace synergy
