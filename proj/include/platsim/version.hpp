#pragma once

namespace platsim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace platsim
