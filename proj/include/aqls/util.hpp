#pragma once

#include <array>
#include <charconv>
#include <string>

namespace aqls {

/// Shortest decimal string that parses back to exactly the same double.
/// Used everywhere a double ends up in text (expressions, CSV) so that
/// emitted artifacts are byte-deterministic.
inline std::string format_double(double value) {
  std::array<char, 64> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

}  // namespace aqls
