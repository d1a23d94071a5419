#pragma once

namespace rmcf {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rmcf
