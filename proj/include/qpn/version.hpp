#pragma once

namespace qpn {

inline constexpr const char* version = "0.1.0";

} // namespace qpn
