#pragma once

namespace riemap {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace riemap
