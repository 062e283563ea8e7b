#pragma once

// Strict JSON object reader: every access records the field, finish()
// rejects anything unread. Errors carry a dotted field path.

#include <set>
#include <string>
#include <string_view>

#include "json.hpp"
#include "mfeval/error.hpp"

namespace mfeval::detail {

using nlohmann::json;

inline std::string join_path(const std::string& base, std::string_view key) {
    return base.empty() ? std::string(key) : base + "." + std::string(key);
}

inline std::string index_path(const std::string& base, std::size_t i) {
    return base + "[" + std::to_string(i) + "]";
}

// Parses a JSON text, mapping syntax errors to a "line N, column M" locus.
inline json parse_document(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        std::size_t col = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col),
                         "malformed JSON");
    }
}

class Fields {
public:
    Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object())
            throw ParseError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    const std::string& path() const noexcept { return path_; }
    std::string path(std::string_view key) const { return join_path(path_, key); }

    bool has(std::string_view key) const { return obj_.contains(std::string(key)); }

    const json& required(std::string_view key) {
        seen_.insert(std::string(key));
        auto it = obj_.find(std::string(key));
        if (it == obj_.end()) throw ParseError(path(key), "missing required field");
        return *it;
    }

    const json* optional(std::string_view key) {
        seen_.insert(std::string(key));
        auto it = obj_.find(std::string(key));
        return it == obj_.end() || it->is_null() ? nullptr : &*it;
    }

    std::string string(std::string_view key) {
        const json& v = required(key);
        if (!v.is_string()) throw ParseError(path(key), "expected a string");
        return v.get<std::string>();
    }

    std::string string_or(std::string_view key, std::string fallback) {
        const json* v = optional(key);
        if (v == nullptr) return fallback;
        if (!v->is_string()) throw ParseError(path(key), "expected a string");
        return v->get<std::string>();
    }

    int integer(std::string_view key) {
        const json& v = required(key);
        if (!v.is_number_integer()) throw ParseError(path(key), "expected an integer");
        return v.get<int>();
    }

    bool boolean_or(std::string_view key, bool fallback) {
        const json* v = optional(key);
        if (v == nullptr) return fallback;
        if (!v->is_boolean()) throw ParseError(path(key), "expected a boolean");
        return v->get<bool>();
    }

    const json& array(std::string_view key) {
        const json& v = required(key);
        if (!v.is_array()) throw ParseError(path(key), "expected an array");
        return v;
    }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!seen_.count(it.key())) throw ParseError(path(it.key()), "unknown field");
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

}  // namespace mfeval::detail
