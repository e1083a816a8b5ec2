#pragma once

#include <array>
#include <cstddef>

namespace giantbic {

/// Four-point Lagrange weights for nodes at 0, 1, 2, 3 evaluated at `s`
/// (in units of the node spacing).
[[nodiscard]] constexpr std::array<double, 4> cubic_lagrange_weights(double s) {
    const double a = s, b = s - 1.0, c = s - 2.0, e = s - 3.0;
    return {-b * c * e / 6.0, a * c * e / 2.0, -a * b * e / 2.0, a * b * c / 6.0};
}

/// First node of a 4-point stencil around position `pos` (in node units),
/// kept inside [lo, hi]. Requires hi − lo ≥ 3.
[[nodiscard]] constexpr std::size_t cubic_stencil_start(double pos, std::size_t lo, std::size_t hi) {
    const auto base = static_cast<std::ptrdiff_t>(pos) - 1;
    std::ptrdiff_t start = base;
    if (start < static_cast<std::ptrdiff_t>(lo)) start = static_cast<std::ptrdiff_t>(lo);
    if (start > static_cast<std::ptrdiff_t>(hi) - 3) start = static_cast<std::ptrdiff_t>(hi) - 3;
    return static_cast<std::size_t>(start);
}

}  // namespace giantbic
