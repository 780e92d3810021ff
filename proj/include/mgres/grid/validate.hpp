#pragma once

#include <string>
#include <vector>

#include "mgres/grid/network.hpp"

namespace mgres::grid {

struct ValidationIssue {
    std::string code;    // e.g. "disconnected", "cycle", "phase_mismatch"
    std::string entity;  // offending bus/branch/device id
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
    bool has(const std::string& code) const;
    std::string summary() const;
};

ValidationReport validate(const NetworkModel& model);

// Throws InputError carrying the report summary if the model is invalid.
void require_valid(const NetworkModel& model);

}  // namespace mgres::grid
