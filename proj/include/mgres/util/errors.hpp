#pragma once

#include <stdexcept>
#include <string>

namespace mgres {

// Bad user input: malformed files, dangling references, out-of-range fields.
// `where` names the offending field or byte offset.
class InputError : public std::runtime_error {
public:
    InputError(const std::string& where, const std::string& what)
        : std::runtime_error(where.empty() ? what : where + ": " + what), where_(where) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

}  // namespace mgres
