#pragma once

namespace dynframe {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dynframe
