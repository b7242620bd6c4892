#pragma once

#include <stdexcept>
#include <string>

namespace evblur {

class SingularFitError : public std::runtime_error {
 public:
  explicit SingularFitError(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t offset = 0)
      : std::runtime_error(what + " (line " + std::to_string(line) +
                           (offset ? ", offset " + std::to_string(offset) : "") + ")"),
        line_(line),
        offset_(offset) {}

  std::size_t line() const { return line_; }
  std::size_t offset() const { return offset_; }

 private:
  std::size_t line_;
  std::size_t offset_;
};

}  // namespace evblur
