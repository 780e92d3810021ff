#include "mgres/util/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "mgres/util/errors.hpp"

namespace mgres {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json parse_json(const std::string& text, const std::string& where) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(where, "malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

nlohmann::json parse_json_file(const std::string& path) { return parse_json(read_file(path), path); }

std::string fmt(double v) {
    if (v == 0.0) return "0";  // folds -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fmt_exact(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace mgres
