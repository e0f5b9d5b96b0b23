#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace flexnav {

// ---------------------------------------------------------------------------
// Errors

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input files or provider output that cannot be decoded.
struct ParseError : Error {
    using Error::Error;
};

// Structurally well-formed input that violates a domain invariant.
struct ValidationError : Error {
    using Error::Error;
};

// Bad or incomplete run configuration.
struct ConfigError : Error {
    using Error::Error;
};

// Transport- or model-level failure of an external provider.
struct ProviderError : Error {
    using Error::Error;
};

// Sink for non-fatal diagnostics. Modules call it when they degrade
// gracefully (fail-open verdicts, abstaining followers, fallbacks).
using WarnFn = std::function<void(const std::string&)>;

inline void warn_to(const WarnFn& warn, const std::string& msg) {
    if (warn) warn(msg);
}

// ---------------------------------------------------------------------------
// Hashing (FNV-1a 64-bit, stable across platforms; used for trace hashes)

inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hash_hex(std::string_view data) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a64(data);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

// ---------------------------------------------------------------------------
// String helpers

inline std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    }
    return true;
}

// Splits on any run of non-alphanumeric characters, lowercased.
inline std::vector<std::string> word_tokens(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char raw : s) {
        unsigned char c = static_cast<unsigned char>(raw);
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

// Fixed-point rendering with one decimal, matching the observation template.
inline std::string format_fixed1(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Angles

// Normalizes an absolute heading into [0, 360).
inline double normalize_heading(double deg) {
    double h = std::fmod(deg, 360.0);
    if (h < 0) h += 360.0;
    // fmod of values like -1e-16 can round back to 360.0
    if (h >= 360.0) h = 0.0;
    return h;
}

// Normalizes a heading difference into (-180, 180].
inline double normalize_delta(double deg) {
    double d = std::fmod(deg, 360.0);
    if (d <= -180.0) d += 360.0;
    if (d > 180.0) d -= 360.0;
    return d;
}

// ---------------------------------------------------------------------------
// Deterministic RNG
//
// std::uniform_int_distribution is not specified bit-exactly across standard
// libraries, so index draws go through this helper instead.

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform index in [0, n). n must be > 0. The modulo bias is irrelevant
    // here (n is tiny); what matters is an identical stream everywhere.
    size_t pick_index(size_t n) { return static_cast<size_t>(engine_() % n); }

    std::uint64_t next() { return engine_(); }

    double unit() {  // in [0, 1)
        return static_cast<double>(engine_() >> 11) * (1.0 / 9007199254740992.0);
    }

private:
    std::mt19937_64 engine_;
};

// Stable per-episode seed derivation.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view key) {
    return base ^ fnv1a64(key);
}

}  // namespace flexnav
