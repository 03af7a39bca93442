#pragma once

namespace ctlnav {

inline constexpr const char* kVersion = "0.1.0";

} // namespace ctlnav
