#pragma once

namespace hardy {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hardy
