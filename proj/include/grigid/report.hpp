#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "grigid/point_set.hpp"

namespace grigid {

inline constexpr const char* kToolVersion = "grigid 0.1.0";

/// FNV-1a 64-bit digest, printed as hex. Used to fingerprint report inputs.
inline std::string fnv1a_digest(const std::string& data) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

enum class VerdictStatus { Pass, Fail, Info };

inline const char* to_string(VerdictStatus s) {
    switch (s) {
        case VerdictStatus::Pass: return "PASS";
        case VerdictStatus::Fail: return "FAIL";
        default: return "INFO";
    }
}

/// Plain-text certificate report: named blocks of key = value lines plus
/// machine-parseable `VERDICT <name> <PASS|FAIL|INFO>` lines. Contains no
/// timestamps, so identical inputs reproduce identical reports.
class Report {
public:
    Report() { line(std::string("tool = ") + kToolVersion); }

    void input(const std::string& label, const std::string& content) {
        line("input " + label + " digest=fnv1a:" + fnv1a_digest(content));
    }

    void begin_block(const std::string& name) { line("\n[" + name + "]"); }

    void kv(const std::string& key, double value) {
        line(key + " = " + detail::format17(value));
    }
    void kv(const std::string& key, double value, double tolerance) {
        line(key + " = " + detail::format17(value) +
             "  (tol = " + detail::format17(tolerance) + ")");
    }
    void kv(const std::string& key, const std::string& value) {
        line(key + " = " + value);
    }
    void kv(const std::string& key, std::size_t value) {
        line(key + " = " + std::to_string(value));
    }
    void kv(const std::string& key, int value) { line(key + " = " + std::to_string(value)); }
    void kv(const std::string& key, bool value) {
        line(key + std::string(" = ") + (value ? "true" : "false"));
    }

    void note(const std::string& text) { line("# " + text); }

    void verdict(const std::string& name, VerdictStatus status) {
        verdicts_.push_back(status);
        line(std::string("VERDICT ") + name + ' ' + to_string(status));
    }

    bool any_fail() const {
        for (VerdictStatus v : verdicts_)
            if (v == VerdictStatus::Fail) return true;
        return false;
    }

    std::string str() const { return text_.str(); }

private:
    void line(const std::string& s) { text_ << s << '\n'; }

    std::ostringstream text_;
    std::vector<VerdictStatus> verdicts_;
};

}  // namespace grigid
