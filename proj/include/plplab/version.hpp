#pragma once

namespace plplab {

inline constexpr const char* kToolName = "plplab";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace plplab
