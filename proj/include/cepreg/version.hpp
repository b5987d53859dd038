#pragma once

namespace cepreg {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cepreg
