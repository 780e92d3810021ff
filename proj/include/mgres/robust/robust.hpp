#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mgres/dispatch/dispatch.hpp"
#include "mgres/flow/constraints.hpp"
#include "mgres/grid/network.hpp"

namespace mgres::robust {

using flow::ParamId;
using flow::ParamKind;

struct Interval {
    double lo = 0.0;
    double nom = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

// Box over every uncertain parameter of a model. Values are pu totals (the
// units ParamTerm coefficients expect); the *_si helpers convert from W/VA.
// A freshly built box is degenerate at the nominal values.
class UncertaintyBox {
public:
    UncertaintyBox() = default;
    explicit UncertaintyBox(const grid::NetworkModel& model);

    const Interval& at(ParamId id) const;
    bool contains(ParamId id) const { return box_.count(id) > 0; }
    void set(ParamId id, double lo, double hi);
    void set_si(ParamId id, double lo, double hi) { set(id, lo / scale_, hi / scale_); }
    double scale() const { return scale_; }  // VA per pu

    // Largest / smallest of b*w over the box.
    double max_of(ParamId id, double b) const;
    double min_of(ParamId id, double b) const;

    bool degenerate() const;
    const std::map<ParamId, Interval>& entries() const { return box_; }

private:
    std::map<ParamId, Interval> box_;
    double scale_ = 1.0;
};

class UncertainEqualityRow : public std::runtime_error {
public:
    explicit UncertainEqualityRow(const std::string& row)
        : std::runtime_error("equality row '" + row + "' contains an uncertain parameter"), row_(row) {}
    const std::string& row() const { return row_; }

private:
    std::string row_;
};

// Worst case of every row over the box: <= rows move their rhs by max b*w,
// >= rows by min b*w. The result carries no parameter terms.
flow::ConstraintBlock tighten(const flow::ConstraintBlock& rows, const UncertaintyBox& box);

struct ReserveCosts {
    double dg = 0.2, pv = 0.02, es = 0.2, load = 2.0;
    static ReserveCosts scaled(const dispatch::CostConfig& c, double factor = 0.2) {
        return {factor * c.c1, factor * c.c2, factor * c.c1, factor * c.c3};
    }
    void validate() const;
};

struct RobustOptions {
    dispatch::DispatchOptions base;
    // Price curtailment against the worst-case forecast/demand instead of the nominal one.
    bool worst_case_objective = false;
};

// Up/down reserves in W, indexed [unit][step] over the solved window.
struct ReserveSchedule {
    std::vector<std::vector<double>> pv_up, pv_dn, dg_up, dg_dn, es_up, es_dn, load_up, load_dn;
};

struct RobustResult {
    dispatch::DispatchResult dispatch;
    ReserveSchedule reserves;
    double objective = 0.0;          // energy + reserve terms
    double energy_objective = 0.0;
    double reserve_objective = 0.0;
    // worst-case imbalance the reserves must absorb at each step (W)
    std::vector<double> required_up, required_dn;

    bool optimal() const { return dispatch.optimal(); }
};

struct RobustProblem {
    flow::VariableNamespace ns;
    lp::LinearProgram lp;
    std::vector<double> required_up, required_dn;  // pu
};

RobustProblem build_robust(const grid::NetworkModel& model, const dispatch::CostConfig& costs,
                           const ReserveCosts& rcosts, const UncertaintyBox& box, const RobustOptions& opt = {});
RobustResult solve_robust(const grid::NetworkModel& model, const dispatch::CostConfig& costs,
                          const ReserveCosts& rcosts, const UncertaintyBox& box, const RobustOptions& opt = {});

// Wraps a plain dispatch as a plan holding no reserves.
RobustResult without_reserves(const dispatch::DispatchResult& d);

// Total up and down reserve held at step k (index within the solved window), W.
std::pair<double, double> reserve_margin(const RobustResult& result, int k);

// Whether a device's parameter is uncertain at step k; such a device is
// assumed impaired by the event and its reserves do not count toward adequacy.
bool impaired(const UncertaintyBox& box, ParamKind kind, int entity, int k);

}  // namespace mgres::robust
