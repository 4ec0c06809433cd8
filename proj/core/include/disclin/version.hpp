#pragma once

namespace disclin {

inline constexpr const char* kVersion = "0.1.0";

// Stamp written as the first line of every CSV and as "version" in every JSON
// report, so output files are self-identifying.
inline constexpr const char* kFileStamp = "disclin 0.1.0";

}  // namespace disclin
