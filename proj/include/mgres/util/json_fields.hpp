#pragma once

#include <string>

#include "json.hpp"
#include "mgres/util/errors.hpp"

// Field accessors that name the offending JSON path on error.
namespace mgres::jf {

using nlohmann::json;

inline const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw InputError(where, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw InputError(where + "." + key, "missing field");
    return *it;
}

inline double num(const json& obj, const char* key, const std::string& where) {
    const auto& v = field(obj, key, where);
    if (!v.is_number()) throw InputError(where + "." + key, "expected a number");
    return v.get<double>();
}

inline double num_or(const json& obj, const char* key, double dflt, const std::string& where) {
    if (!obj.contains(key)) return dflt;
    return num(obj, key, where);
}

inline long long integer(const json& obj, const char* key, const std::string& where) {
    const auto& v = field(obj, key, where);
    if (!v.is_number_integer()) throw InputError(where + "." + key, "expected an integer");
    return v.get<long long>();
}

inline long long integer_or(const json& obj, const char* key, long long dflt, const std::string& where) {
    if (!obj.contains(key)) return dflt;
    return integer(obj, key, where);
}

inline bool boolean_or(const json& obj, const char* key, bool dflt, const std::string& where) {
    if (!obj.contains(key)) return dflt;
    const auto& v = obj.at(key);
    if (!v.is_boolean()) throw InputError(where + "." + key, "expected true or false");
    return v.get<bool>();
}

inline std::string str(const json& obj, const char* key, const std::string& where) {
    const auto& v = field(obj, key, where);
    if (!v.is_string()) throw InputError(where + "." + key, "expected a string");
    return v.get<std::string>();
}

inline std::string str_or(const json& obj, const char* key, const std::string& dflt, const std::string& where) {
    if (!obj.contains(key)) return dflt;
    return str(obj, key, where);
}

// Missing key reads as an empty array.
inline const json& array(const json& obj, const char* key, const std::string& where) {
    static const json empty = json::array();
    if (!obj.contains(key)) return empty;
    const auto& v = obj.at(key);
    if (!v.is_array()) throw InputError(where + "." + key, "expected an array");
    return v;
}

inline std::string at(const std::string& where, std::size_t i) { return where + "[" + std::to_string(i) + "]"; }

}  // namespace mgres::jf
