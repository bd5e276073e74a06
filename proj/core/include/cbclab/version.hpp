#pragma once

namespace cbclab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cbclab
