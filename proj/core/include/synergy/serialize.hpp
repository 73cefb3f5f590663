#pragma once

// JSON emission for every result type. Numbers carry 17 significant digits
// so emitted values round-trip to the exact double; every object includes
// "schema": 1.

#include "synergy/bounds.hpp"
#include "synergy/coupling.hpp"
#include "synergy/performance.hpp"
#include "synergy/pid.hpp"
#include "synergy/synthetic.hpp"

#include <string>

namespace synergy {

std::string json_number(double v);  // %.17g; non-finite values become null

std::string to_json(const PidResult& r);
std::string to_json(const SynergyBounds& b);
std::string to_json(const PerformanceBounds& p);
std::string to_json(const CouplingResult& c);
std::string to_json(const SweepReport& r);  // metadata and summary, no records

}  // namespace synergy
