#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace giantbic {

/// Shortest representation that round-trips to the same double; locale-independent.
inline void append_number(std::string& out, double value) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) {
        out += "nan";
        return;
    }
    out.append(buf, end);
}

[[nodiscard]] inline std::string format_number(double value) {
    std::string s;
    append_number(s, value);
    return s;
}

}  // namespace giantbic
