#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mgres/advset/advset.hpp"
#include "mgres/dispatch/dispatch.hpp"
#include "mgres/robust/robust.hpp"
#include "mgres/sim/simulate.hpp"

namespace mgres::scenario {

// Files are collected in memory and written in insertion order at the end of
// a command, so a failing run leaves no partial outputs behind.
class OutputSet {
public:
    explicit OutputSet(std::string dir) : dir_(std::move(dir)) {}
    void add(const std::string& name, std::string content);
    void add_json(const std::string& name, const nlohmann::json& j);
    // Writes every file; returns (name, sha256) in insertion order.
    std::vector<std::pair<std::string, std::string>> write_all() const;
    const std::string& dir() const { return dir_; }

private:
    std::string dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

nlohmann::json dispatch_json(const grid::NetworkModel& m, const dispatch::DispatchResult& r);
nlohmann::json robust_json(const grid::NetworkModel& m, const robust::RobustResult& r);

std::string aggregate_csv(const grid::NetworkModel& m, const dispatch::DispatchResult& r);
std::string schedule_csv(const grid::NetworkModel& m, const dispatch::DispatchResult& r);
std::string voltage_csv(const grid::NetworkModel& m, const dispatch::DispatchResult& r);
std::string soc_csv(const grid::NetworkModel& m, const dispatch::DispatchResult& r);
std::string reserves_csv(const grid::NetworkModel& m, const robust::RobustResult& r);

nlohmann::json polytope_json(const advset::InnerPolytope& p, const std::string& plan_key);
advset::InnerPolytope polytope_from_json(const nlohmann::json& j, const std::string& where);
std::string vertices_csv(const advset::InnerPolytope& p);
// One block per axis pair, vertices counter-clockwise.
std::string polygon_csv(const advset::InnerPolytope& p, const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

std::string trajectory_csv(const grid::NetworkModel& m, const sim::Trajectory& t);
std::string violations_csv(const grid::NetworkModel& m, const sim::Trajectory& t);
nlohmann::json summary_json(const sim::ViolationSummary& s);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

struct ManifestInfo {
    std::string command;
    std::uint64_t seed = 0;
    std::vector<std::string> inputs;
    std::vector<std::pair<std::string, std::string>> outputs;  // name, sha256
    double elapsed_ms = 0.0;
};
nlohmann::json manifest_json(const ManifestInfo& info);
// Messages for every recorded file whose current digest differs (or that is missing).
std::vector<std::string> verify_manifest(const nlohmann::json& manifest, const std::string& manifest_dir);

}  // namespace mgres::scenario
