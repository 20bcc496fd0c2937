#pragma once

namespace irrl {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace irrl
