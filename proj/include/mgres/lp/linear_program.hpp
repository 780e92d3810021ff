#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mgres::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { LessEqual, Equal, GreaterEqual };

struct Term {
    std::size_t var;
    double coef;
};

struct Variable {
    std::string name;
    double lower = 0.0;
    double upper = kInf;
};

struct Row {
    std::string name;
    std::vector<Term> terms;
    Relation relation = Relation::LessEqual;
    double rhs = 0.0;
};

class MalformedProblem : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Sparse minimization problem: min c'x + offset  s.t.  rows, lower <= x <= upper.
//
// The problem is a plain value type; once handed to a solver it is only read,
// so a single instance may be shared by concurrent solves.
class LinearProgram {
public:
    std::size_t add_variable(std::string name, double lower = 0.0, double upper = kInf);
    std::size_t add_row(Row row);
    std::size_t add_row(std::string name, std::vector<Term> terms, Relation relation, double rhs);

    void set_bounds(std::size_t var, double lower, double upper);
    void set_objective(std::size_t var, double coef);
    void add_objective(std::size_t var, double coef);
    void set_objective_offset(double offset) { offset_ = offset; }

    std::size_t num_variables() const { return variables_.size(); }
    std::size_t num_rows() const { return rows_.size(); }
    const std::vector<Variable>& variables() const { return variables_; }
    const std::vector<Row>& rows() const { return rows_; }
    const Variable& variable(std::size_t j) const { return variables_.at(j); }
    const Row& row(std::size_t i) const { return rows_.at(i); }
    const std::vector<double>& objective() const { return objective_; }
    double objective_offset() const { return offset_; }

    double evaluate_objective(std::span<const double> x) const;
    double row_activity(std::size_t i, std::span<const double> x) const;

    // Throws MalformedProblem on a dangling variable index, a non-finite
    // coefficient or rhs, or crossed bounds.
    void validate() const;

private:
    std::vector<Variable> variables_;
    std::vector<Row> rows_;
    std::vector<double> objective_;
    double offset_ = 0.0;
};

const char* to_string(Relation r);

}  // namespace mgres::lp
