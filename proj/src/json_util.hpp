#pragma once

#include <initializer_list>
#include <set>
#include <string>

#include <json.hpp>

#include "hwlrp/instance.hpp"

namespace hwlrp::detail {

using json = nlohmann::ordered_json;

inline std::string join_path(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

inline void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path, "expected an object");
}

inline void require_array(const json& j, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path, "expected an array");
}

/// Unknown fields are rejected so typos surface instead of silently
/// producing defaulted data.
inline void check_keys(const json& j, const std::string& path,
                       std::initializer_list<const char*> allowed) {
    require_object(j, path);
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!ok.count(it.key()))
            throw SchemaError(join_path(path, it.key()), "unknown field");
    }
}

inline const json& require_field(const json& j, const std::string& path, const char* key) {
    require_object(j, path);
    auto it = j.find(key);
    if (it == j.end()) throw SchemaError(join_path(path, key), "missing required field");
    return *it;
}

inline std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw SchemaError(path, "expected a string");
    return j.get<std::string>();
}

inline double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw SchemaError(path, "expected a number");
    return j.get<double>();
}

inline double get_number_min(const json& j, const std::string& path, double lo,
                             const char* what) {
    double v = get_number(j, path);
    if (!(v >= lo)) throw SchemaError(path, std::string(what));
    return v;
}

inline double get_ratio(const json& j, const std::string& path) {
    double v = get_number(j, path);
    if (!(v >= 0.0 && v <= 1.0)) throw SchemaError(path, "expected a ratio in [0,1]");
    return v;
}

inline int get_flag(const json& j, const std::string& path) {
    if (j.is_boolean()) return j.get<bool>() ? 1 : 0;
    if (j.is_number_integer()) {
        int v = j.get<int>();
        if (v == 0 || v == 1) return v;
    }
    throw SchemaError(path, "expected 0 or 1");
}

}  // namespace hwlrp::detail
