#include "evsched/csv_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "evsched/errors.hpp"

namespace evsched {

namespace {

using nlohmann::json;

std::string full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

[[noreturn]] void fail(const std::string& path, size_t line_no, const std::string& msg) {
  throw ParseError(path + ":" + std::to_string(line_no) + ": " + msg);
}

long parse_int(const std::string& s, const std::string& path, size_t line_no,
               const char* field) {
  try {
    size_t used = 0;
    long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(path, line_no, std::string("invalid ") + field + " '" + s + "'");
  }
}

double parse_kw(const std::string& s, const std::string& path, size_t line_no) {
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    if (v < 0.0) fail(path, line_no, "negative power value '" + s + "'");
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    fail(path, line_no, "invalid kw value '" + s + "'");
  }
}

}  // namespace

std::string sidecar_path(const std::string& csv_path) {
  const size_t dot = csv_path.find_last_of('.');
  const size_t slash = csv_path.find_last_of("/\\");
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return csv_path + ".json";
  return csv_path.substr(0, dot) + ".json";
}

void save_community_csv(const CommunityScenario& scenario, const std::string& csv_path) {
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw IoError("cannot write " + csv_path);
  out << "kind,owner_id,ev_id,day,slot,kw\n";
  for (const auto& h : scenario.households) {
    for (int t = 0; t < scenario.grid.slots; ++t)
      out << "residential," << h.id << ",,," << t << ','
          << full(h.residential.kw[static_cast<size_t>(t)]) << '\n';
    for (const auto& ev : h.evs) {
      for (size_t d = 0; d < ev.historical.size(); ++d) {
        const auto& day = ev.historical[d];
        for (int t = 0; t < scenario.grid.slots; ++t) {
          const double v = day.kw[static_cast<size_t>(t)];
          if (v == 0.0) continue;
          out << "ev," << h.id << ',' << ev.id << ',' << d << ',' << t << ',' << full(v) << '\n';
        }
      }
    }
  }
  if (!out) throw IoError("failed while writing " + csv_path);
  out.close();

  json meta;
  meta["schema_version"] = 1;
  meta["S"] = scenario.grid.slots;
  meta["slot_minutes"] = scenario.grid.slot_minutes();
  meta["day_kind"] = to_string(scenario.day_kind);
  meta["seed"] = scenario.seed;
  meta["n_households"] = scenario.households.size();
  meta["observed_days"] = scenario.observed_days;
  json house_ids = json::array();
  for (const auto& h : scenario.households) house_ids.push_back(h.id);
  meta["households"] = std::move(house_ids);
  json evs = json::array();
  for (const auto& h : scenario.households) {
    for (const auto& ev : h.evs) {
      evs.push_back({{"owner_id", h.id},
                     {"ev_id", ev.id},
                     {"daily_energy_kwh", ev.daily_energy_kwh},
                     {"p_max_kw", ev.p_max_kw},
                     {"p_min_kw", ev.p_min_kw}});
    }
  }
  meta["evs"] = std::move(evs);
  std::ofstream meta_out(sidecar_path(csv_path), std::ios::binary);
  if (!meta_out) throw IoError("cannot write " + sidecar_path(csv_path));
  meta_out << meta.dump(2) << '\n';
}

CommunityScenario load_community_csv(const std::string& csv_path) {
  const std::string meta_path = sidecar_path(csv_path);
  std::ifstream meta_in(meta_path, std::ios::binary);
  if (!meta_in) throw IoError("cannot read sidecar " + meta_path);
  json meta;
  try {
    meta_in >> meta;
  } catch (const json::exception& e) {
    throw ParseError(meta_path + ": " + e.what());
  }

  CommunityScenario sc;
  try {
    sc.grid = TimeGrid::from_slot_minutes(meta.at("S").get<int>(),
                                          meta.at("slot_minutes").get<double>());
    sc.day_kind = day_kind_from_string(meta.at("day_kind").get<std::string>());
    sc.seed = meta.at("seed").get<std::uint64_t>();
    sc.observed_days = meta.at("observed_days").get<int>();
    const auto n_households = meta.at("n_households").get<size_t>();
    const auto& house_ids = meta.at("households");
    if (house_ids.size() != n_households)
      throw ParseError(meta_path + ": households list disagrees with n_households");
    sc.households.resize(n_households);
    for (size_t i = 0; i < n_households; ++i) {
      sc.households[i].id = house_ids[i].get<int>();
      sc.households[i].residential = zero_series(sc.grid);
    }
  } catch (const json::exception& e) {
    throw ParseError(meta_path + ": " + e.what());
  }

  std::map<int, size_t> house_index;
  for (size_t hi = 0; hi < sc.households.size(); ++hi) house_index[sc.households[hi].id] = hi;

  try {
    for (const auto& ev_meta : meta.at("evs")) {
      const int owner = ev_meta.at("owner_id").get<int>();
      auto it = house_index.find(owner);
      if (it == house_index.end())
        throw ParseError(meta_path + ": ev owner_id not in households list");
      EvProfile ev;
      ev.id = ev_meta.at("ev_id").get<int>();
      ev.daily_energy_kwh = ev_meta.at("daily_energy_kwh").get<double>();
      ev.p_max_kw = ev_meta.at("p_max_kw").get<double>();
      ev.p_min_kw = ev_meta.at("p_min_kw").get<double>();
      ev.historical.assign(static_cast<size_t>(sc.observed_days), zero_series(sc.grid));
      sc.households[it->second].evs.push_back(std::move(ev));
    }
  } catch (const json::exception& e) {
    throw ParseError(meta_path + ": " + e.what());
  }

  std::map<int, std::pair<size_t, size_t>> ev_location;  // ev_id -> (household, ev index)
  for (size_t hi = 0; hi < sc.households.size(); ++hi)
    for (size_t ei = 0; ei < sc.households[hi].evs.size(); ++ei)
      ev_location[sc.households[hi].evs[ei].id] = {hi, ei};

  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw IoError("cannot read " + csv_path);
  std::string line;
  size_t line_no = 0;
  if (!std::getline(in, line)) fail(csv_path, 1, "empty file");
  ++line_no;
  {
    auto header = split_csv(line);
    const std::vector<std::string> expect = {"kind", "owner_id", "ev_id", "day", "slot", "kw"};
    if (header != std::vector<std::string>(expect))
      fail(csv_path, 1, "malformed header, expected kind,owner_id,ev_id,day,slot,kw");
  }

  std::vector<std::vector<char>> seen_res(sc.households.size(),
                                          std::vector<char>(static_cast<size_t>(sc.grid.slots), 0));
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != 6) fail(csv_path, line_no, "expected 6 fields");
    const std::string& kind = fields[0];
    const long owner = parse_int(fields[1], csv_path, line_no, "owner_id");
    auto house_it = house_index.find(static_cast<int>(owner));
    if (house_it == house_index.end()) fail(csv_path, line_no, "unknown owner_id");
    const long slot = parse_int(fields[4], csv_path, line_no, "slot");
    if (slot < 0 || slot >= sc.grid.slots)
      fail(csv_path, line_no,
           "slot " + std::to_string(slot) + " outside grid of " +
               std::to_string(sc.grid.slots) + " slots");
    const double kw = parse_kw(fields[5], csv_path, line_no);

    if (kind == "residential") {
      if (!fields[2].empty() || !fields[3].empty())
        fail(csv_path, line_no, "residential rows must leave ev_id and day empty");
      auto& seen = seen_res[house_it->second][static_cast<size_t>(slot)];
      if (seen) fail(csv_path, line_no, "duplicate residential slot");
      seen = 1;
      sc.households[house_it->second].residential.kw[static_cast<size_t>(slot)] = kw;
    } else if (kind == "ev") {
      const long ev_id = parse_int(fields[2], csv_path, line_no, "ev_id");
      const long day = parse_int(fields[3], csv_path, line_no, "day");
      auto loc = ev_location.find(static_cast<int>(ev_id));
      if (loc == ev_location.end()) fail(csv_path, line_no, "unknown ev_id");
      if (loc->second.first != house_it->second)
        fail(csv_path, line_no, "ev_id does not belong to owner_id");
      if (day < 0 || day >= sc.observed_days) fail(csv_path, line_no, "day out of range");
      auto& series =
          sc.households[loc->second.first].evs[loc->second.second].historical[static_cast<size_t>(day)];
      if (series.kw[static_cast<size_t>(slot)] != 0.0)
        fail(csv_path, line_no, "duplicate ev slot");
      series.kw[static_cast<size_t>(slot)] = kw;
    } else {
      fail(csv_path, line_no, "unknown kind '" + kind + "'");
    }
  }

  for (size_t hi = 0; hi < sc.households.size(); ++hi) {
    for (int t = 0; t < sc.grid.slots; ++t) {
      if (!seen_res[hi][static_cast<size_t>(t)]) {
        throw ParseError(csv_path + ": household " + std::to_string(sc.households[hi].id) +
                         " has " + "missing residential rows; expected one per slot (S=" +
                         std::to_string(sc.grid.slots) + ")");
      }
    }
  }
  try {
    validate_scenario(sc);
  } catch (const ParameterError& e) {
    throw ParseError(csv_path + ": " + e.what());
  }
  return sc;
}

}  // namespace evsched
