#pragma once

namespace stochbayes {

inline constexpr const char* kVersion = "0.1.0";

} // namespace stochbayes
