#pragma once

#include <string>

#include "json.hpp"

namespace mgres {

// Reads a whole file; throws InputError naming the path.
std::string read_file(const std::string& path);

// Parses JSON text; a syntax error becomes an InputError naming the byte offset.
nlohmann::json parse_json(const std::string& text, const std::string& where);
nlohmann::json parse_json_file(const std::string& path);

// %.12g, used for every CSV value so outputs are stable across runs.
std::string fmt(double v);
// %.17g, lossless round trip.
std::string fmt_exact(double v);

}  // namespace mgres
