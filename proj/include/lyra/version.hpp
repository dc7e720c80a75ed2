#pragma once

namespace lyra {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lyra
