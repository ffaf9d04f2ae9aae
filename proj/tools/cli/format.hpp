#pragma once

#include <optional>
#include <string>

namespace riskfusion::cli {

/// Shortest text with 17 significant digits, '.' decimal point, locale independent.
std::string format_double(double x);

/// As format_double, "NA" for an empty optional.
std::string format_optional(const std::optional<double>& x);

} // namespace riskfusion::cli
