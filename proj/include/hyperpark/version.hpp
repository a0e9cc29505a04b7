#pragma once

namespace hyperpark {

inline constexpr const char* kVersion = "0.1.0";

} // namespace hyperpark
