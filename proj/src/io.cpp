#include "hankelbands/io.hpp"

#include <cmath>
#include <cstdio>

namespace hankelbands::io {

std::string format_double(double value) {
    if (value == 0.0) value = 0.0;  // drop the sign of negative zero
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.16e", value);
    // snprintf honours LC_NUMERIC; force the decimal point.
    for (char& c : buffer)
        if (c == ',') c = '.';
    return buffer;
}

}  // namespace hankelbands::io
