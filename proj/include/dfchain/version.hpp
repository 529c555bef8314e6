#pragma once

namespace dfc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dfc
