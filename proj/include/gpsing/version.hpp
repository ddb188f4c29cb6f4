#pragma once

namespace gpsing {

inline constexpr const char* kVersion = "gpsing 0.1.0";

}  // namespace gpsing
