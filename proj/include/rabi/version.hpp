#pragma once

namespace rabi {

inline constexpr const char* kVersion = "0.1.0";

} // namespace rabi
