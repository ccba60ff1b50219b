#pragma once

namespace wavemix {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace wavemix
