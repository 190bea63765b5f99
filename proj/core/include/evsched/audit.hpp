#pragma once

#include <string>
#include <vector>

#include "evsched/scheduler.hpp"

namespace evsched {

// Independent validation of an emitted schedule against the scheduling
// constraints: mask containment, on/off-power linkage, energy balance,
// the off-on switching inequalities, and the reported cost. Shares no
// code with the solvers; every check is re-derived from the problem data.
// Returns one message per violation; empty means clean.
std::vector<std::string> audit_schedule(const SchedulingProblem& problem,
                                        const ChargeSchedule& schedule);

}  // namespace evsched
