#pragma once

#include <cstdio>
#include <string>

namespace glrdose {

/// Fixed-point rendering with `decimals` digits after the point.
inline std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

}  // namespace glrdose
