#include "mgres/lp/linear_program.hpp"

#include <cmath>
#include <string>

namespace mgres::lp {

std::size_t LinearProgram::add_variable(std::string name, double lower, double upper) {
    variables_.push_back({std::move(name), lower, upper});
    objective_.push_back(0.0);
    return variables_.size() - 1;
}

std::size_t LinearProgram::add_row(Row row) {
    rows_.push_back(std::move(row));
    return rows_.size() - 1;
}

std::size_t LinearProgram::add_row(std::string name, std::vector<Term> terms, Relation relation,
                                   double rhs) {
    return add_row(Row{std::move(name), std::move(terms), relation, rhs});
}

void LinearProgram::set_bounds(std::size_t var, double lower, double upper) {
    auto& v = variables_.at(var);
    v.lower = lower;
    v.upper = upper;
}

void LinearProgram::set_objective(std::size_t var, double coef) { objective_.at(var) = coef; }

void LinearProgram::add_objective(std::size_t var, double coef) { objective_.at(var) += coef; }

double LinearProgram::evaluate_objective(std::span<const double> x) const {
    double v = offset_;
    for (std::size_t j = 0; j < objective_.size(); ++j) v += objective_[j] * x[j];
    return v;
}

double LinearProgram::row_activity(std::size_t i, std::span<const double> x) const {
    double s = 0.0;
    for (const auto& t : rows_.at(i).terms) s += t.coef * x[t.var];
    return s;
}

void LinearProgram::validate() const {
    const auto n = variables_.size();
    for (std::size_t j = 0; j < n; ++j) {
        const auto& v = variables_[j];
        if (std::isnan(v.lower) || std::isnan(v.upper))
            throw MalformedProblem("variable '" + v.name + "' has a NaN bound");
        if (v.lower > v.upper)
            throw MalformedProblem("variable '" + v.name + "' has lower > upper");
        if (v.lower == kInf || v.upper == -kInf)
            throw MalformedProblem("variable '" + v.name + "' has an empty bound range");
        if (!std::isfinite(objective_[j]))
            throw MalformedProblem("objective coefficient of '" + v.name + "' is not finite");
    }
    if (!std::isfinite(offset_)) throw MalformedProblem("objective offset is not finite");
    for (const auto& r : rows_) {
        if (!std::isfinite(r.rhs)) throw MalformedProblem("row '" + r.name + "' has a non-finite rhs");
        for (const auto& t : r.terms) {
            if (t.var >= n)
                throw MalformedProblem("row '" + r.name + "' references variable " +
                                       std::to_string(t.var) + " of " + std::to_string(n));
            if (!std::isfinite(t.coef))
                throw MalformedProblem("row '" + r.name + "' has a non-finite coefficient");
        }
    }
}

const char* to_string(Relation r) {
    switch (r) {
        case Relation::LessEqual: return "<=";
        case Relation::Equal: return "=";
        case Relation::GreaterEqual: return ">=";
    }
    return "?";
}

}  // namespace mgres::lp
