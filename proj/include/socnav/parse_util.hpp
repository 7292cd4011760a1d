#pragma once

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "socnav/geometry.hpp"

namespace socnav {

/// Shortest round-trip decimal form of a double.
inline std::string num_to_string(double v) {
    char buf[40];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, end);
}

inline double parse_double(const std::string& s, const std::string& what) {
    double v{};
    const char* b = s.data();
    const char* e = s.data() + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    auto [p, ec] = std::from_chars(b, e, v);
    while (p < e && (*p == ' ' || *p == '\t')) ++p;
    if (ec != std::errc{} || p != e)
        throw std::invalid_argument(what + ": expected a number, got '" + s + "'");
    return v;
}

inline long long parse_int(const std::string& s, const std::string& what) {
    long long v{};
    const char* b = s.data();
    const char* e = s.data() + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    auto [p, ec] = std::from_chars(b, e, v);
    while (p < e && (*p == ' ' || *p == '\t')) ++p;
    if (ec != std::errc{} || p != e)
        throw std::invalid_argument(what + ": expected an integer, got '" + s + "'");
    return v;
}

inline bool parse_bool(const std::string& s, const std::string& what) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw std::invalid_argument(what + ": expected a boolean, got '" + s + "'");
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            parts.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return parts;
}

/// "x,y" -> Vec2.
inline Vec2 parse_point(const std::string& s, const std::string& what) {
    const auto parts = split(s, ',');
    if (parts.size() != 2) throw std::invalid_argument(what + ": expected 'x,y', got '" + s + "'");
    return {parse_double(parts[0], what), parse_double(parts[1], what)};
}

inline std::string point_to_string(const Vec2& p) {
    return num_to_string(p.x) + "," + num_to_string(p.y);
}

inline std::vector<int> parse_id_list(const std::string& s, const std::string& what) {
    std::vector<int> ids;
    for (const auto& part : split(s, ','))
        ids.push_back(static_cast<int>(parse_int(part, what)));
    return ids;
}

/// FNV-1a 64-bit content hash, hex encoded (scenario fingerprint in reports).
inline std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    static const char* digits = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = digits[h & 0xf];
        h >>= 4;
    }
    buf[16] = '\0';
    return buf;
}

}  // namespace socnav
