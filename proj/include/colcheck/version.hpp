#pragma once

namespace colcheck {

inline constexpr const char* kVersion = "0.1.0";

} // namespace colcheck
