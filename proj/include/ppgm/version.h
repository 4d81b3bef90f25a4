#pragma once

namespace ppgm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ppgm
