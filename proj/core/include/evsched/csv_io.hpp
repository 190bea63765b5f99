#pragma once

#include <string>

#include "evsched/community.hpp"

namespace evsched {

// Community CSV schema: header `kind,owner_id,ev_id,day,slot,kw`.
// Residential rows cover every slot of every household; EV rows carry the
// nonzero slots of each observed day. Scenario metadata (grid, seed, per-EV
// parameters) lives in a sidecar JSON next to the CSV so that
// load(save(x)) == x exactly.
std::string sidecar_path(const std::string& csv_path);

void save_community_csv(const CommunityScenario& scenario, const std::string& csv_path);

CommunityScenario load_community_csv(const std::string& csv_path);

}  // namespace evsched
