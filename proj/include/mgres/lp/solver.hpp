#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mgres/lp/linear_program.hpp"

namespace mgres::lp {

struct SolverOptions {
    double feas_tol = 1e-7;
    double opt_tol = 1e-7;
    double pivot_tol = 1e-9;
    std::size_t max_iterations = 2'000'000;
    // Basis refactorization period (eta file length).
    std::size_t refactor_interval = 64;
    // Consecutive degenerate pivots tolerated before switching to Bland's rule.
    std::size_t degenerate_switch = 40;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    SolveStatus status = SolveStatus::Infeasible;
    std::vector<double> values;        // one per variable, present iff Optimal
    double objective_value = 0.0;      // meaningful iff Optimal
    std::size_t iterations = 0;
    // Rows carrying a nonzero phase-one multiplier when Infeasible.
    std::vector<std::size_t> certificate_rows;

    bool optimal() const { return status == SolveStatus::Optimal; }
};

class IterationLimit : public std::runtime_error {
public:
    IterationLimit(std::size_t iterations, int phase, double infeasibility);
    std::size_t iterations;
    int phase;
    double infeasibility;
};

class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Solver backend interface. The bounded primal simplex below is the reference
// implementation; anything else plugged in must honor the same status contract.
class LpBackend {
public:
    virtual ~LpBackend() = default;
    virtual LpSolution solve(const LinearProgram& lp, const SolverOptions& options) const = 0;
    virtual std::string name() const = 0;
};

class SimplexBackend final : public LpBackend {
public:
    LpSolution solve(const LinearProgram& lp, const SolverOptions& options) const override;
    std::string name() const override { return "bounded-primal-simplex"; }
};

// Solve with the reference simplex backend.
LpSolution solve(const LinearProgram& lp, const SolverOptions& options = {});

struct RowViolation {
    std::size_t row;
    double amount;
};

struct BoundViolation {
    std::size_t var;
    double amount;
};

struct FeasibilityReport {
    double max_residual = 0.0;
    double max_bound_violation = 0.0;
    std::vector<RowViolation> violated_rows;
    std::vector<BoundViolation> violated_bounds;

    bool feasible(double tol) const { return max_residual <= tol && max_bound_violation <= tol; }
};

// Residuals of `point` against every row and bound. Rows and bounds whose
// violation exceeds `tol` are listed.
FeasibilityReport check_feasibility(const LinearProgram& lp, std::span<const double> point,
                                    double tol = 0.0);

const char* to_string(SolveStatus s);

}  // namespace mgres::lp
