#pragma once

#include <istream>
#include <ostream>
#include <string>

#include "json.hpp"
#include "mgres/grid/network.hpp"

namespace mgres::grid {

inline constexpr int kNetworkSchemaVersion = 1;

// Network JSON without profiles. Field errors raise InputError naming the JSON path.
nlohmann::json network_to_json(const NetworkModel& model);
NetworkModel network_from_json(const nlohmann::json& j, const std::string& where = "network");
NetworkModel load_network(const std::string& path);

// Profiles CSV: header `time,entity_id,field,value`; time in minutes matching a
// step start; fields forecast_w (pv), p_des_w and p_min_w (loads).
void apply_profiles_csv(NetworkModel& model, std::istream& in, const std::string& where = "profiles");
void load_profiles(NetworkModel& model, const std::string& path);
void write_profiles_csv(const NetworkModel& model, std::ostream& out);

}  // namespace mgres::grid
