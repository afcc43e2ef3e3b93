#pragma once

#include <algorithm>
#include <istream>
#include <iterator>
#include <string>

#include "json.hpp"
#include "satkit/error.hpp"

namespace satkit::detail {

/// Parses a whole stream; syntax errors become InputError with a line number.
inline nlohmann::json parse_json(std::istream& in, const std::string& source) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto upto = static_cast<long>(std::min<std::size_t>(e.byte, text.size()));
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + upto, '\n'));
    throw InputError(source, line, "invalid JSON");
  }
}

}  // namespace satkit::detail
