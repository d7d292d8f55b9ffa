#pragma once

#include <cstdio>
#include <string>

namespace stochbayes {

/// Shortest decimal form that round-trips a double exactly. Used for every
/// number written to a report so that reruns produce byte-identical files.
inline std::string fmt_double(double v) {
    if (v == static_cast<double>(static_cast<long long>(v)) && v > -1e15 && v < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
        return buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // try trimming to the shortest representation that still round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[64];
        std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(shorter, "%lf", &back);
        if (back == v) {
            return shorter;
        }
    }
    return buf;
}

} // namespace stochbayes
