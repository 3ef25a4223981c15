#pragma once

namespace idim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace idim
