#pragma once

namespace adbar {
inline constexpr const char* kVersion = "0.1.0";
}
