#pragma once

#include <ostream>
#include <string>

#include "mgres/lp/linear_program.hpp"

namespace mgres::lp {

// Writes the problem in CPLEX LP text form. Names are sanitized so that any
// reader of the format accepts them; the mapping is one-to-one within a problem.
void write_lp_format(const LinearProgram& lp, std::ostream& out);

std::string sanitize_lp_name(const std::string& name);

}  // namespace mgres::lp
