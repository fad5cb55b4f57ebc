#pragma once

#include <string>
#include <string_view>

#include "srfid/common/error.hpp"

namespace srfid {

enum class Orientation { higher_is_better, lower_is_better };

inline std::string_view to_string(Orientation o) noexcept {
  return o == Orientation::higher_is_better ? "higher_is_better" : "lower_is_better";
}

inline Orientation parse_orientation(std::string_view s) {
  if (s == "higher_is_better") return Orientation::higher_is_better;
  if (s == "lower_is_better") return Orientation::lower_is_better;
  throw ArgumentError("unknown orientation '" + std::string(s) + "'");
}

}  // namespace srfid
