#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "jacsdp/polynomial.hpp"

namespace jacsdp {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Parses an expression over the given variable names.
///
/// Grammar:
///   expr   := term (('+' | '-') term)*
///   term   := unary (('*' | '/') unary)*      ('/' only by a constant)
///   unary  := ('+' | '-') unary | power
///   power  := atom ('^' integer)?
///   atom   := number | identifier | '(' expr ')'
///
/// Decimal literals are converted exactly (0.5 -> 1/2).
Polynomial parse_polynomial(std::string_view text, const std::vector<std::string>& vars);

/// Exact value of a decimal literal such as "5.1926" or "12".
Rational parse_decimal(std::string_view literal);

}  // namespace jacsdp
