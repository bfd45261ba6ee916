#pragma once

namespace dwell {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace dwell
