#pragma once

#include <string>

namespace symbolkit {

/// 17 significant digits; "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double v);

}  // namespace symbolkit
