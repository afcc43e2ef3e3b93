#pragma once

#include <stdexcept>
#include <string>

namespace satkit {

/// Malformed input: a file that cannot be parsed or a structure that breaks
/// an invariant (a cyclic stemma, an inconsistent sample, ...). Carries the
/// offending source and line when known (line 0 = whole input).
class InputError : public std::runtime_error {
 public:
  InputError(std::string source, int line, const std::string& what)
      : std::runtime_error(format(source, line, what)),
        source_(std::move(source)),
        line_(line) {}
  explicit InputError(const std::string& what) : InputError("", 0, what) {}

  const std::string& source() const { return source_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& source, int line,
                            const std::string& what) {
    std::string out;
    if (!source.empty()) out += source;
    if (line > 0) out += ":" + std::to_string(line);
    if (!out.empty()) out += ": ";
    return out + what;
  }

  std::string source_;
  int line_ = 0;
};

}  // namespace satkit
