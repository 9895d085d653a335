#ifndef EDGECC_CSV_HPP
#define EDGECC_CSV_HPP

#include <cstdio>
#include <string>

namespace edgecc::csv {

/// Shortest-faithful decimal rendering at 12 significant digits, '.' decimal
/// separator regardless of locale. All CSV emitters go through this so that
/// identical runs produce byte-identical files.
inline std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

/// Full-precision rendering (%.17g) used where a value must survive a
/// serialize/parse round trip bit-exactly.
inline std::string format_double_exact(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

} // namespace edgecc::csv

#endif // EDGECC_CSV_HPP
