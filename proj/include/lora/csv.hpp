#pragma once

// Minimal RFC 4180 writer.

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace lora::csv {

/// Quotes the field when it holds a comma, quote, CR or LF.
std::string escape(std::string_view field);

/// %.12g rendering; empty for NaN.
std::string number(double value);

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  void comment(std::string_view text);
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

}  // namespace lora::csv
