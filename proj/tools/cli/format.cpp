#include "cli/format.hpp"

#include <array>
#include <charconv>
#include <stdexcept>

namespace riskfusion::cli {

std::string format_double(double x) {
    std::array<char, 64> buf{};
    const auto [end, ec] =
        std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, 17);
    if (ec != std::errc{}) throw std::runtime_error("failed to format number");
    return std::string(buf.data(), end);
}

std::string format_optional(const std::optional<double>& x) {
    return x ? format_double(*x) : std::string("NA");
}

} // namespace riskfusion::cli
