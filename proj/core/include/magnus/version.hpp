#pragma once

namespace magnus {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace magnus
