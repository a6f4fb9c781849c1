#pragma once

// Text syntax for family members.
//
//   expr    := term (("+" | "-") term)* ;
//   term    := factor ("*" factor)* ;
//   factor  := ["-"] atom ["^" uint] ;
//   atom    := number | "i" | "z" | "zbar" | "exp" "(" expr ")" | "(" expr ")" ;
//   number  := decimal with optional exponent, optionally suffixed "i" ;
//
// Multiplication is explicit ("2*z"). The argument of exp must reduce to
// c0 + c1*z + c2*zbar with constant c's; c0 folds into the coefficient and the
// stored frequencies are c1/i and c2/i.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "mwqc/term_algebra.hpp"

namespace mwqc {

inline constexpr std::size_t kMaxSourceBytes = 64 * 1024;

class ParseError : public std::runtime_error {
 public:
  enum class Kind { syntax, family_violation, power_overflow, input_too_large };

  ParseError(Kind kind, std::size_t position, std::string expected, std::string found);

  Kind kind() const noexcept { return kind_; }
  /// Byte offset into the source.
  std::size_t position() const noexcept { return position_; }
  const std::string& expected() const noexcept { return expected_; }
  const std::string& found() const noexcept { return found_; }

 private:
  Kind kind_;
  std::size_t position_;
  std::string expected_;
  std::string found_;
};

StarExpr parse(std::string_view src);

/// Canonical text; parse(serialize(f)) == f. The zero function prints as "0".
std::string serialize(const StarExpr& f);

/// Shortest round-trip decimal form of a complex number in the same syntax:
/// "2", "-0.5", "3i", "(1+2i)".
std::string format_complex(Complex c);

/// Parses src and requires a constant; throws ParseError otherwise.
Complex parse_constant(std::string_view src);

}  // namespace mwqc
