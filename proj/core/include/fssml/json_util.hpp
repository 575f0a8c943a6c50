#pragma once

// Strict readers shared by the library and tool config parsing.

#include <initializer_list>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <nlohmann/json.hpp>

#include "fssml/errors.hpp"

namespace fssml::detail {

using nlohmann::json;

inline void require_object(const json& j, const std::string& ctx) {
    if (!j.is_object()) throw FormatError(ctx + ": expected an object");
}

inline void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& ctx) {
    require_object(j, ctx);
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw FormatError(ctx + ": unknown key '" + key + "'");
    }
}

inline const json& field(const json& j, const char* key, const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end()) throw FormatError(ctx + ": missing '" + key + "'");
    return *it;
}

inline double number(const json& j, const std::string& ctx) {
    if (!j.is_number()) throw FormatError(ctx + ": expected a number");
    return j.get<double>();
}

inline std::size_t count(const json& j, const std::string& ctx) {
    if (!j.is_number_unsigned()) throw FormatError(ctx + ": expected a non-negative integer");
    return j.get<std::size_t>();
}

template <class T>
void read_opt(const json& j, const char* key, T& out, const std::string& ctx) {
    if (auto it = j.find(key); it != j.end()) {
        if constexpr (std::is_same_v<T, double>) out = number(*it, ctx + "." + key);
        else if constexpr (std::is_same_v<T, std::size_t>) out = count(*it, ctx + "." + key);
        else out = it->get<T>();
    }
}

inline std::vector<double> numbers(const json& j, const std::string& ctx) {
    if (!j.is_array()) throw FormatError(ctx + ": expected an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) out.push_back(number(v, ctx));
    return out;
}

}  // namespace fssml::detail
