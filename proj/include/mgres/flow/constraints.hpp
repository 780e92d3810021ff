#pragma once

#include <compare>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mgres/flow/namespace.hpp"
#include "mgres/grid/network.hpp"
#include "mgres/lp/linear_program.hpp"

namespace mgres::flow {

enum class Tag {
    VoltageDrop,
    PowerBalance,
    NodalInjection,
    VoltageLimits,
    LineLimits,
    PvCap,
    DgCap,
    Storage,
    CurtailmentBounds,
    PowerFactor,
    Reserve,   // reserve adequacy rows (robust mode)
    Recourse,  // realized-injection definitions (adversarial/recourse models)
    Count
};
const char* to_string(Tag t);

// Uncertain parameters. Values are totals over the entity's phases, in pu of
// the model base: DG rated capacity, desired load, PV forecast.
enum class ParamKind { DgCapacity, LoadDesired, PvForecast };
const char* to_string(ParamKind k);

struct ParamId {
    ParamKind kind;
    int entity;
    int step;
    auto operator<=>(const ParamId&) const = default;
};

struct ParamTerm {
    ParamId id;
    double coef;
};

// A row  sum a_j x_j + sum b_i w_i  (rel)  rhs  with w the uncertain parameters.
struct FlowRow {
    lp::Row row;
    Tag tag;
    std::vector<ParamTerm> params;
};

struct ConstraintBlock {
    std::vector<FlowRow> rows;

    std::size_t count(Tag t) const;
    void append(ConstraintBlock&& other);
    void add(Tag tag, std::string name, std::vector<lp::Term> terms, lp::Relation rel, double rhs,
             std::vector<ParamTerm> params = {});
};

struct FlowOptions {
    int poly_sides = 8;
    bool power_factor = false;  // PV reactive power within +-tan(acos(pv_min_pf)) * P
    double pv_min_pf = 0.9;
    bool terminal_soc = false;  // E_end >= E_start
};

// Nominal parameter value in pu.
double nominal_param(const grid::NetworkModel& model, ParamId id);

// Affine parameter value: constant + sum coef * x over LP columns.
struct ParamExpr {
    double constant = 0.0;
    std::vector<lp::Term> terms;
};
using ParamResolver = std::function<ParamExpr(ParamId)>;

// Appends the rows to `lp` with every parameter replaced by its resolved value.
void lower_into(lp::LinearProgram& lp, const ConstraintBlock& block, const ParamResolver& resolve);
// Resolves every parameter at its nominal value.
void lower_nominal(lp::LinearProgram& lp, const ConstraintBlock& block, const grid::NetworkModel& model);

// Emitters. Each covers the namespace's step window. When the namespace
// carries reserve columns, device and curtailment rows take their
// reserve-shifted form (reserves are device totals split evenly over phases).
ConstraintBlock emit_voltage_drop(const grid::NetworkModel& m, const VariableNamespace& ns);
ConstraintBlock emit_power_balance(const grid::NetworkModel& m, const VariableNamespace& ns);
ConstraintBlock emit_nodal_injection(const grid::NetworkModel& m, const VariableNamespace& ns);
ConstraintBlock emit_voltage_limits(const grid::NetworkModel& m, const VariableNamespace& ns);
ConstraintBlock emit_line_limits(const grid::NetworkModel& m, const VariableNamespace& ns, const FlowOptions& o);
ConstraintBlock emit_pv_cap(const grid::NetworkModel& m, const VariableNamespace& ns, const FlowOptions& o);
ConstraintBlock emit_dg_cap(const grid::NetworkModel& m, const VariableNamespace& ns, const FlowOptions& o);
// `initial_wh` overrides the SoC at the window start (one per unit).
ConstraintBlock emit_storage(const grid::NetworkModel& m, const VariableNamespace& ns, const FlowOptions& o,
                             const std::vector<double>* initial_wh = nullptr);
ConstraintBlock emit_curtailment_bounds(const grid::NetworkModel& m, const VariableNamespace& ns);
ConstraintBlock emit_power_factor(const grid::NetworkModel& m, const VariableNamespace& ns, const FlowOptions& o);

// Voltage and line limits, device capacities, storage, curtailment bounds and
// (optionally) power factor.
ConstraintBlock emit_limits(const grid::NetworkModel& m, const VariableNamespace& ns, const FlowOptions& o);
// Everything above.
ConstraintBlock emit_all(const grid::NetworkModel& m, const VariableNamespace& ns, const FlowOptions& o);

// Closed-form row counts per tag for the namespace window.
std::map<Tag, std::size_t> expected_row_counts(const grid::NetworkModel& m, const VariableNamespace& ns,
                                               const FlowOptions& o);

// Inscribed regular polygon: row k has normal (cos t_k, sin t_k), t_k = pi(2k+1)/n,
// and rhs radius * cos(pi/n).
double polygon_angle(int k, int sides);
double polygon_rhs_factor(int sides);

}  // namespace mgres::flow
