#pragma once

namespace sbd {

inline constexpr const char* version = "0.1.0";

} // namespace sbd
