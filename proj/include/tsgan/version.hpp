#pragma once

namespace tsgan {

inline constexpr const char* kVersion = "0.3.0";

}  // namespace tsgan
