#pragma once

// Runtime values for stream monitoring: a stream position holds an int, a
// float, or a bool.  The `uint` surface type is an int with a non-negativity
// check applied when traces are loaded, so it has no runtime representation
// of its own.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>

namespace pslola {

enum class Type {
    Int,
    Float,
    Bool,
};

inline const char* to_string(Type t) {
    switch (t) {
        case Type::Int: return "int";
        case Type::Float: return "float";
        case Type::Bool: return "bool";
    }
    return "?";
}

using Value = std::variant<std::int64_t, double, bool>;

inline Type type_of(const Value& v) {
    switch (v.index()) {
        case 0: return Type::Int;
        case 1: return Type::Float;
        default: return Type::Bool;
    }
}

// Value taken by a stream position that no event ever reaches.
inline Value default_value(Type t) {
    switch (t) {
        case Type::Int: return Value{std::int64_t{0}};
        case Type::Float: return Value{0.0};
        case Type::Bool: return Value{false};
    }
    return Value{std::int64_t{0}};
}

// Shortest round-tripping decimal form, so identical values always print
// identically regardless of how they were computed.
inline std::string to_string(double d) {
    if (std::isnan(d)) return "nan";
    if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d);
    if (ec != std::errc{}) throw std::runtime_error("float print failed");
    return std::string(buf, ptr);
}

inline std::string to_string(const Value& v) {
    switch (v.index()) {
        case 0: return std::to_string(std::get<std::int64_t>(v));
        case 1: return to_string(std::get<double>(v));
        default: return std::get<bool>(v) ? "true" : "false";
    }
}

inline double as_double(const Value& v) {
    switch (v.index()) {
        case 0: return static_cast<double>(std::get<std::int64_t>(v));
        case 1: return std::get<double>(v);
        default: return std::get<bool>(v) ? 1.0 : 0.0;
    }
}

// Exact equality for ints/bools, relative tolerance for floats.  Used by
// tests and by the centralized/decentralized comparison.
inline bool approx_equal(const Value& a, const Value& b, double rel_tol = 1e-9) {
    if (a.index() != b.index()) return false;
    if (a.index() == 1) {
        double x = std::get<double>(a), y = std::get<double>(b);
        if (x == y) return true;
        double scale = std::max({std::fabs(x), std::fabs(y), 1.0});
        return std::fabs(x - y) <= rel_tol * scale;
    }
    return a == b;
}

// std::variant's operator< orders by alternative index first, which is fine:
// all values in one set come from a single stream and share a type.  NaN is
// ordered last so sets stay well-formed even if a fixture produces one.
struct ValueLess {
    bool operator()(const Value& a, const Value& b) const {
        if (a.index() != b.index()) return a.index() < b.index();
        if (a.index() == 1) {
            double x = std::get<double>(a), y = std::get<double>(b);
            bool nx = std::isnan(x), ny = std::isnan(y);
            if (nx || ny) return !nx && ny;
            return x < y;
        }
        return a < b;
    }
};

using ValueSet = std::set<Value, ValueLess>;

inline std::string to_string(const ValueSet& s) {
    std::string out = "{";
    bool first = true;
    for (const auto& v : s) {
        if (!first) out += ", ";
        out += to_string(v);
        first = false;
    }
    out += "}";
    return out;
}

inline bool is_subset(const ValueSet& small, const ValueSet& big) {
    for (const auto& v : small) {
        if (big.count(v)) continue;
        // Float sets may differ in the last bit between engines; accept an
        // approximately equal member as containment.
        bool found = false;
        for (const auto& w : big) {
            if (approx_equal(v, w)) { found = true; break; }
        }
        if (!found) return false;
    }
    return true;
}

inline bool set_equal(const ValueSet& a, const ValueSet& b) {
    return is_subset(a, b) && is_subset(b, a);
}

}  // namespace pslola
