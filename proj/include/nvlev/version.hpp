#pragma once

namespace nvlev {

inline constexpr const char* version = "0.1.0";

}  // namespace nvlev
