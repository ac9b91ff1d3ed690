#pragma once

namespace svp {

inline constexpr const char* kToolName = "svpulse";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace svp
