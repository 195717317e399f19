#pragma once

#include <algorithm>
#include <initializer_list>
#include <string>
#include <string_view>

#include "sigexec/algebra.hpp"
#include "sigexec/error.hpp"

namespace sigexec::detail {

/// Rejects keys of `j` outside `allowed`; `path` prefixes the error message.
inline void check_keys(const Json& j, std::initializer_list<std::string_view> allowed, const std::string& path) {
    if (!j.is_object()) throw InputError(path + ": expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw InputError(path + "." + key + ": unknown key");
        }
    }
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback, const std::string& path) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InputError(path + "." + key + ": wrong type");
    }
}

template <typename T>
T get_required(const Json& j, const char* key, const std::string& path) {
    if (!j.contains(key)) throw InputError(path + "." + key + ": missing");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InputError(path + "." + key + ": wrong type");
    }
}

}  // namespace sigexec::detail
