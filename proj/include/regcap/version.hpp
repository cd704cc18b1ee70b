#pragma once

namespace regcap {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace regcap
