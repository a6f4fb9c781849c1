#include "mwqc/expr_parser.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace mwqc {

namespace {

enum class TokenKind { number, ident, plus, minus, star, caret, lparen, rparen, end };

struct Token {
  TokenKind kind = TokenKind::end;
  std::size_t pos = 0;
  std::string_view text;
  Complex value{};
  bool integer_literal = false;
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string describe(const Token& t) {
  switch (t.kind) {
    case TokenKind::end:
      return "end of input";
    case TokenKind::number:
      return "number '" + std::string(t.text) + "'";
    case TokenKind::ident:
      return "identifier '" + std::string(t.text) + "'";
    default:
      return "'" + std::string(t.text) + "'";
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    Token t;
    t.pos = pos_;
    if (pos_ == src_.size()) return t;

    const char c = src_[pos_];
    if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
      return number();
    }
    if (is_ident_start(c)) {
      std::size_t end = pos_;
      while (end < src_.size() && is_ident_char(src_[end])) ++end;
      t.kind = TokenKind::ident;
      t.text = src_.substr(pos_, end - pos_);
      pos_ = end;
      return t;
    }
    switch (c) {
      case '+': t.kind = TokenKind::plus; break;
      case '-': t.kind = TokenKind::minus; break;
      case '*': t.kind = TokenKind::star; break;
      case '^': t.kind = TokenKind::caret; break;
      case '(': t.kind = TokenKind::lparen; break;
      case ')': t.kind = TokenKind::rparen; break;
      default:
        throw ParseError(ParseError::Kind::syntax, pos_, "token",
                         "character '" + std::string(1, c) + "'");
    }
    t.text = src_.substr(pos_, 1);
    ++pos_;
    return t;
  }

 private:
  Token number() {
    Token t;
    t.kind = TokenKind::number;
    t.pos = pos_;
    std::size_t end = pos_;
    bool integer = true;
    while (end < src_.size() && is_digit(src_[end])) ++end;
    if (end < src_.size() && src_[end] == '.') {
      integer = false;
      ++end;
      while (end < src_.size() && is_digit(src_[end])) ++end;
    }
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t exp_end = end + 1;
      if (exp_end < src_.size() && (src_[exp_end] == '+' || src_[exp_end] == '-')) ++exp_end;
      if (exp_end < src_.size() && is_digit(src_[exp_end])) {
        while (exp_end < src_.size() && is_digit(src_[exp_end])) ++exp_end;
        end = exp_end;
        integer = false;
      }
    }
    const std::string_view digits = src_.substr(pos_, end - pos_);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || !std::isfinite(v)) {
      throw ParseError(ParseError::Kind::syntax, pos_, "finite number", "'" + std::string(digits) + "'");
    }
    bool imaginary = false;
    if (end < src_.size() && src_[end] == 'i' && (end + 1 == src_.size() || !is_ident_char(src_[end + 1]))) {
      imaginary = true;
      integer = false;
      ++end;
    }
    t.text = src_.substr(pos_, end - pos_);
    t.value = imaginary ? Complex{0.0, v} : Complex{v, 0.0};
    t.integer_literal = integer;
    pos_ = end;
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

// exact multiplication by -i
Complex div_i(Complex c) { return {c.imag(), -c.real()}; }

Complex ipow(Complex base, unsigned long long k) {
  Complex r{1.0, 0.0};
  while (k > 0) {
    if (k & 1ull) r *= base;
    k >>= 1ull;
    if (k > 0) base *= base;
  }
  return r;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : lexer_(src) { advance(); }

  StarExpr parse_all() {
    if (current_.kind == TokenKind::end) {
      throw ParseError(ParseError::Kind::syntax, current_.pos, "expression", describe(current_));
    }
    StarExpr e = expr();
    if (current_.kind != TokenKind::end) {
      throw ParseError(ParseError::Kind::syntax, current_.pos, "operator or end of input",
                       describe(current_));
    }
    return e;
  }

 private:
  void advance() { current_ = lexer_.next(); }

  StarExpr expr() {
    StarExpr acc = term();
    while (current_.kind == TokenKind::plus || current_.kind == TokenKind::minus) {
      const bool minus = current_.kind == TokenKind::minus;
      advance();
      StarExpr rhs = term();
      acc = minus ? sub(acc, rhs) : add(acc, rhs);
    }
    return acc;
  }

  StarExpr term() {
    StarExpr acc = factor();
    while (current_.kind == TokenKind::star) {
      const std::size_t op_pos = current_.pos;
      advance();
      StarExpr rhs = factor();
      acc = guarded_mul(acc, rhs, op_pos);
    }
    return acc;
  }

  StarExpr factor() {
    bool negate = false;
    if (current_.kind == TokenKind::minus) {
      negate = true;
      advance();
    }
    StarExpr base = atom();
    if (current_.kind == TokenKind::caret) {
      advance();
      base = raise(base);
    }
    return negate ? neg(base) : base;
  }

  StarExpr atom() {
    const Token t = current_;
    switch (t.kind) {
      case TokenKind::number:
        advance();
        return StarExpr::constant(t.value);
      case TokenKind::lparen: {
        advance();
        StarExpr inner = expr();
        expect(TokenKind::rparen, "')'");
        return inner;
      }
      case TokenKind::ident:
        if (t.text == "i") {
          advance();
          return StarExpr::constant(kI);
        }
        if (t.text == "z") {
          advance();
          return StarExpr::z();
        }
        if (t.text == "zbar") {
          advance();
          return StarExpr::zbar();
        }
        if (t.text == "exp") {
          advance();
          return exponential();
        }
        throw ParseError(ParseError::Kind::syntax, t.pos, "number, 'i', 'z', 'zbar', 'exp' or '('",
                         describe(t));
      default:
        throw ParseError(ParseError::Kind::syntax, t.pos, "number, 'i', 'z', 'zbar', 'exp' or '('",
                         describe(t));
    }
  }

  StarExpr exponential() {
    expect(TokenKind::lparen, "'(' after exp");
    const std::size_t arg_pos = current_.pos;
    StarExpr arg = expr();
    expect(TokenKind::rparen, "')'");

    Complex c0{}, c1{}, c2{};
    for (const Term& t : arg.terms()) {
      if (t.has_frequency() || t.degree() > 1) {
        throw ParseError(ParseError::Kind::family_violation, arg_pos, "c0 + c1*z + c2*zbar",
                         "argument outside the linear family");
      }
      if (t.pow_z == 1) {
        c1 = t.coeff;
      } else if (t.pow_zbar == 1) {
        c2 = t.coeff;
      } else {
        c0 = t.coeff;
      }
    }
    return StarExpr::exponential(std::exp(c0), div_i(c1), div_i(c2));
  }

  StarExpr raise(const StarExpr& base) {
    const Token t = current_;
    if (t.kind != TokenKind::number || !t.integer_literal) {
      throw ParseError(ParseError::Kind::syntax, t.pos, "nonnegative integer exponent", describe(t));
    }
    unsigned long long k = 0;
    const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), k);
    if (ec != std::errc{} || ptr != t.text.data() + t.text.size()) {
      throw ParseError(ParseError::Kind::power_overflow, t.pos, "exponent that fits the degree limit",
                       describe(t));
    }
    advance();

    if (base.size() <= 1) {
      if (base.is_zero()) return k == 0 ? StarExpr::constant(1.0) : base;
      const Term& b = base.terms()[0];
      const unsigned long long degree = static_cast<unsigned long long>(b.degree());
      if (degree > 0 && k > static_cast<unsigned long long>(kMaxDegree) / degree) {
        throw ParseError(ParseError::Kind::power_overflow, t.pos, "total degree <= 64", describe(t));
      }
      const double kd = static_cast<double>(k);
      const int ki = static_cast<int>(std::min<unsigned long long>(k, kMaxDegree));
      try {
        return StarExpr::term(Term{ipow(b.coeff, k), b.pow_z * ki, b.pow_zbar * ki, b.freq_z * kd,
                                   b.freq_zbar * kd});
      } catch (const NonFiniteTermError&) {
        throw ParseError(ParseError::Kind::power_overflow, t.pos, "finite power", describe(t));
      }
    }
    if (k > static_cast<unsigned long long>(kMaxDegree) ||
        static_cast<unsigned long long>(base.degree()) * k > static_cast<unsigned long long>(kMaxDegree)) {
      throw ParseError(ParseError::Kind::power_overflow, t.pos, "total degree <= 64", describe(t));
    }
    return power(base, static_cast<unsigned>(k));
  }

  StarExpr guarded_mul(const StarExpr& a, const StarExpr& b, std::size_t op_pos) {
    if (a.degree() + b.degree() > kMaxDegree) {
      throw ParseError(ParseError::Kind::power_overflow, op_pos, "total degree <= 64",
                       "degree " + std::to_string(a.degree() + b.degree()));
    }
    return mul(a, b);
  }

  void expect(TokenKind kind, const char* what) {
    if (current_.kind != kind) {
      throw ParseError(ParseError::Kind::syntax, current_.pos, what, describe(current_));
    }
    advance();
  }

  Lexer lexer_;
  Token current_;
};

std::string format_real(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

// Real negative or negative imaginary coefficients print as " - |c|".
bool prints_negative(Complex c) {
  return (c.imag() == 0.0 && c.real() < 0.0) || (c.real() == 0.0 && c.imag() < 0.0);
}

void append_signed(std::string& out, Complex c, const std::string& factor) {
  const bool negative = prints_negative(c);
  if (negative) c = -c;
  if (out.empty()) {
    if (negative) out += "-";
  } else {
    out += negative ? " - " : " + ";
  }
  if (factor.empty()) {
    out += format_complex(c);
  } else if (c == Complex{1.0, 0.0}) {
    out += factor;
  } else {
    out += format_complex(c) + "*" + factor;
  }
}

std::string power_factor(const char* name, int k) {
  if (k == 1) return name;
  return std::string(name) + "^" + std::to_string(k);
}

}  // namespace

ParseError::ParseError(Kind kind, std::size_t position, std::string expected, std::string found)
    : std::runtime_error("at offset " + std::to_string(position) + ": expected " + expected + ", found " +
                         found),
      kind_(kind),
      position_(position),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

StarExpr parse(std::string_view src) {
  if (src.size() > kMaxSourceBytes) {
    throw ParseError(ParseError::Kind::input_too_large, kMaxSourceBytes, "at most 65536 bytes",
                     std::to_string(src.size()) + " bytes");
  }
  return Parser(src).parse_all();
}

Complex parse_constant(std::string_view src) {
  const StarExpr e = parse(src);
  if (!e.is_constant()) throw ParseError(ParseError::Kind::syntax, 0, "constant", "non-constant expression");
  return e.is_zero() ? Complex{} : e.terms()[0].coeff;
}

std::string format_complex(Complex c) {
  const double re = c.real() == 0.0 ? 0.0 : c.real();
  const double im = c.imag() == 0.0 ? 0.0 : c.imag();
  if (im == 0.0) return format_real(re);
  if (re == 0.0) return format_real(im) + "i";
  return "(" + format_real(re) + (im < 0.0 ? "-" : "+") + format_real(std::abs(im)) + "i)";
}

std::string serialize(const StarExpr& f) {
  if (f.is_zero()) return "0";
  std::string out;
  for (const Term& t : f.terms()) {
    std::string factor;
    const auto push = [&](const std::string& s) {
      if (!factor.empty()) factor += "*";
      factor += s;
    };
    if (t.pow_z > 0) push(power_factor("z", t.pow_z));
    if (t.pow_zbar > 0) push(power_factor("zbar", t.pow_zbar));
    if (t.has_frequency()) {
      std::string linear;
      if (t.freq_z != Complex{}) append_signed(linear, t.freq_z, "z");
      if (t.freq_zbar != Complex{}) append_signed(linear, t.freq_zbar, "zbar");
      push("exp(i*(" + linear + "))");
    }
    append_signed(out, t.coeff, factor);
  }
  return out;
}

}  // namespace mwqc
