#pragma once

namespace frailtycr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace frailtycr
