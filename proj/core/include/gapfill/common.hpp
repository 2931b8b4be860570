// common.hpp  Shared argument checking and numeric constants.
//
// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

namespace gapfill {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Contract violation on a public API: the input is rejected.
inline void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

}  // namespace gapfill
