#pragma once

namespace mmrve {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kCsvSchema = "mmrve-csv-1";

} // namespace mmrve
