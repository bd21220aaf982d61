#pragma once

namespace dbvn {

inline constexpr const char* kVersion = "0.1.0";

} // namespace dbvn
