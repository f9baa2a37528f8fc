#pragma once

namespace qcorr {

inline constexpr const char* kVersion = "0.1.0";

} // namespace qcorr
