#pragma once

#include <string>

namespace hankelbands::io {

// Fixed 17-significant-digit scientific notation, independent of locale.
std::string format_double(double value);

}  // namespace hankelbands::io
