#pragma once

// Internal: strict reading of JSON config objects with field-path diagnostics.

#include <set>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "eegbench/errors.hpp"

namespace eegbench::detail {

template <class T>
struct is_vector : std::false_type {};
template <class T, class A>
struct is_vector<std::vector<T, A>> : std::true_type {};

class Fields {
public:
    Fields(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j.is_object()) throw ConfigError(path_, "expected an object");
    }

    std::string path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    bool has(const char* key) const { return j_.contains(key); }

    const nlohmann::json& at(const char* key) {
        seen_.insert(key);
        if (!j_.contains(key)) throw ConfigError(path(key), "missing");
        return j_.at(key);
    }

    // Leaves `out` untouched when the key is absent.
    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        out = convert<T>(j_.at(key), path(key));
    }

    template <class T>
    T require(const char* key) {
        return convert<T>(at(key), path(key));
    }

    // Rejects keys that no get/at call asked for.
    void finish() const {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key)) throw ConfigError(path(key), "unknown field");
    }

    template <class T>
    static T convert(const nlohmann::json& v, const std::string& where) {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError(where, "expected true or false");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigError(where, "expected an integer");
            if (std::is_unsigned_v<T> && v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)
                throw ConfigError(where, "expected a non-negative integer");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError(where, "expected a number");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError(where, "expected a string");
        } else if constexpr (is_vector<T>::value) {
            if (!v.is_array()) throw ConfigError(where, "expected an array");
            T out;
            for (std::size_t i = 0; i < v.size(); ++i)
                out.push_back(convert<typename T::value_type>(v[i], where + "[" + std::to_string(i) + "]"));
            return out;
        }
        try {
            return v.get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(where, e.what());
        }
    }

private:
    const nlohmann::json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

}  // namespace eegbench::detail
