#pragma once

namespace ocean {

inline constexpr const char* kVersion = "0.1.0";

} // namespace ocean
