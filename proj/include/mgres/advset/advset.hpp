#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mgres/flow/namespace.hpp"
#include "mgres/lp/solver.hpp"
#include "mgres/robust/robust.hpp"
#include "mgres/sim/timeline.hpp"

namespace mgres::advset {

enum class AxisKind { DgCapacityLoss, LoadIncrease, PvForecastError };
const char* to_string(AxisKind k);
AxisKind axis_kind_from(const std::string& s);  // throws InputError

// One direction of attack. Magnitudes are in W along the axis; the event acts
// on steps [first_step, last_step). sign = -1 turns a load increase into a
// load decrease (the other kinds only go one way).
struct AdversarialAxis {
    AxisKind kind = AxisKind::LoadIncrease;
    std::string target;
    int first_step = 0;
    int last_step = 1;
    int sign = 1;
    std::string label() const;
};

struct AxisInfeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MixedDirectionAxes : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AdvOptions {
    dispatch::DispatchOptions base;
    double certify_eps_w = 100.0;  // 1e-4 MW
    int threads = 0;               // 0: one per axis up to hardware concurrency, 1: sequential
};

// Points live in axis coordinates: entry i is the W magnitude along axis i,
// so the nominal event is the origin.
using Point = std::vector<double>;

struct InnerPolytope {
    std::vector<AdversarialAxis> axes;
    std::vector<double> alpha_w;         // maximal magnitude per axis
    std::vector<double> cap_w;           // outer box extent per axis
    std::vector<char> certified;         // alpha + eps proved infeasible
    std::vector<Point> vertices;         // origin first, then alpha_i e_i
    int first_step = 0, end_step = 0;    // window covered by the axes
    std::size_t dim() const { return axes.size(); }
};

// Recourse feasibility rows g(u*, w) <= 0 over the axes' window, as one LP:
// realized setpoints are pinned to the schedule plus the event and the
// proportional deployment it triggers, and every network and device row must
// hold. Event magnitudes are the trailing columns.
class RecourseModel {
public:
    RecourseModel(const grid::NetworkModel& m, const robust::RobustResult& plan, std::vector<AdversarialAxis> axes,
                  std::vector<double> cap_w, const AdvOptions& opt = {});

    const lp::LinearProgram& lp() const { return lp_; }
    const flow::VariableNamespace& ns() const { return ns_; }
    std::size_t z(std::size_t axis) const { return z0_ + axis; }
    std::size_t dim() const { return axes_.size(); }
    const std::vector<AdversarialAxis>& axes() const { return axes_; }
    int first_step() const { return ns_.first_step(); }
    int end_step() const { return ns_.end_step(); }
    bool upward() const { return up_; }

    // LP with axis `i` maximized and the others held at zero.
    lp::LinearProgram axis_problem(std::size_t i) const;
    // LP with every magnitude fixed.
    lp::LinearProgram fixed_problem(const Point& z_w) const;

    // Independent evaluation of the recourse point for the event `z_w`: runs
    // the controller and the linear flow sweep, returns a full LP column vector.
    std::vector<double> forward(const Point& z_w) const;

    // Residual check of forward(z_w) against the LP (magnitudes included).
    lp::FeasibilityReport check(const Point& z_w, double tol) const;

    // The disturbance the event `z_w` causes at absolute step k.
    sim::StepDisturbance disturbance(const Point& z_w, int k) const;

private:
    grid::NetworkModel m_;
    robust::RobustResult plan_;
    std::vector<AdversarialAxis> axes_;
    std::vector<int> entity_;
    std::vector<double> cap_;
    flow::VariableNamespace ns_;
    lp::LinearProgram lp_;
    std::size_t z0_ = 0;
    bool up_ = true;
    double scale_ = 1.0;
};

// Runs the controller and the linear flow sweep for each step of the
// namespace window and fills the namespace columns of an LP point (ncols wide).
std::vector<double> realize_point(const grid::NetworkModel& m, const robust::RobustResult& plan,
                                  const flow::VariableNamespace& ns, std::size_t ncols,
                                  const std::function<sim::StepDisturbance(int)>& dist);

// Outer box extents along each axis from an uncertainty box (smallest extent over the axis steps).
std::vector<double> caps_from_box(const grid::NetworkModel& m, const std::vector<AdversarialAxis>& axes,
                                  const robust::UncertaintyBox& box);

InnerPolytope characterize(const grid::NetworkModel& m, const robust::RobustResult& plan,
                           const std::vector<AdversarialAxis>& axes, const std::vector<double>& cap_w,
                           const AdvOptions& opt = {});

// Decided by an LP over convex weights of the vertices.
bool contains(const InnerPolytope& poly, const Point& w);

std::vector<Point> sample(const InnerPolytope& poly, std::uint64_t seed, int count);

struct Polygon2d {
    std::vector<std::pair<double, double>> vertices;  // counter-clockwise
    bool degenerate = false;                          // collinear: vertices are the segment ends
    double area() const;
};

Polygon2d project_2d(const InnerPolytope& poly, std::size_t i, std::size_t j);

bool point_in_polygon(const Polygon2d& poly, double x, double y, double tol = 1e-9);

// Event timeline that realizes `point` in the simulator.
sim::EventTimeline timeline_for(const grid::NetworkModel& m, const InnerPolytope& poly, const Point& point);

}  // namespace mgres::advset
