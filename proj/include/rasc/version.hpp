#pragma once

namespace rasc {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace rasc
