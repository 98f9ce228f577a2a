#pragma once

namespace dreject {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dreject
