#pragma once

namespace clsiv {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace clsiv
