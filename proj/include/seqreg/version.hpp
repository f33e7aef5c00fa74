#pragma once

namespace seqreg {

inline constexpr const char* kToolName = "seqreg";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace seqreg
