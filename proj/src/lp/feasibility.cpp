#include <algorithm>
#include <cmath>

#include "mgres/lp/solver.hpp"

namespace mgres::lp {

FeasibilityReport check_feasibility(const LinearProgram& lp, std::span<const double> point,
                                    double tol) {
    if (point.size() != lp.num_variables())
        throw MalformedProblem("point has " + std::to_string(point.size()) + " entries, problem has " +
                               std::to_string(lp.num_variables()) + " variables");
    FeasibilityReport rep;
    for (std::size_t j = 0; j < lp.num_variables(); ++j) {
        const auto& v = lp.variable(j);
        const double x = point[j];
        double viol = std::isnan(x) ? kInf : std::max({0.0, v.lower - x, x - v.upper});
        rep.max_bound_violation = std::max(rep.max_bound_violation, viol);
        if (viol > tol) rep.violated_bounds.push_back({j, viol});
    }
    for (std::size_t i = 0; i < lp.num_rows(); ++i) {
        const auto& r = lp.row(i);
        const double a = lp.row_activity(i, point);
        double viol = 0.0;
        switch (r.relation) {
            case Relation::LessEqual: viol = std::max(0.0, a - r.rhs); break;
            case Relation::GreaterEqual: viol = std::max(0.0, r.rhs - a); break;
            case Relation::Equal: viol = std::abs(a - r.rhs); break;
        }
        if (std::isnan(a)) viol = kInf;
        rep.max_residual = std::max(rep.max_residual, viol);
        if (viol > tol) rep.violated_rows.push_back({i, viol});
    }
    return rep;
}

}  // namespace mgres::lp
