#pragma once

namespace biortho {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace biortho
