#pragma once

// Number formatting shared by every CSV writer: '.' decimal, exponent
// notation below 1e-3 in magnitude, fixed significant digits otherwise.

#include <span>
#include <string>
#include <string_view>

namespace hqc {

std::string csv_number(double x);
/// Quotes a field when it contains a comma, quote or newline.
std::string csv_field(std::string_view s);
std::string csv_row(std::span<const std::string> fields);

}  // namespace hqc
