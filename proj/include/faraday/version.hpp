#pragma once

#include <string_view>

namespace faraday {

inline constexpr std::string_view kVersion = "1.0.0";

} // namespace faraday
