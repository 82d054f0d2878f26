#pragma once

namespace warpcert {

inline constexpr const char* kToolName = "warpcert";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace warpcert
