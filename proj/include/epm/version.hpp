#pragma once

namespace epm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace epm
