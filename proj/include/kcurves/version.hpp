#pragma once

namespace kcurves {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace kcurves
