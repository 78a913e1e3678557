#pragma once

namespace akmine {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace akmine
