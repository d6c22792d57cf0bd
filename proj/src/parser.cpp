#include "jacsdp/parser.hpp"

#include <cctype>

namespace jacsdp {

namespace {

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& vars)
      : text_(text), vars_(vars) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  int nvars() const { return static_cast<int>(vars_.size()); }

  Polynomial expr() {
    Polynomial p = term();
    for (;;) {
      if (accept('+')) {
        p += term();
      } else if (accept('-')) {
        p -= term();
      } else {
        return p;
      }
    }
  }

  Polynomial term() {
    Polynomial p = unary();
    for (;;) {
      if (accept('*')) {
        p = p * unary();
      } else if (accept('/')) {
        const std::size_t at = pos_;
        Polynomial d = unary();
        if (d.degree() > 0) throw ParseError("division by a non-constant expression", at);
        if (d.is_zero()) throw ParseError("division by zero", at);
        p *= Rational(1) / d.coefficient(Monomial(nvars()));
      } else {
        return p;
      }
    }
  }

  Polynomial unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Polynomial power() {
    Polynomial base = atom();
    if (accept('^')) {
      skip_space();
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected integer exponent");
      const std::string digits(text_.substr(start, pos_ - start));
      if (digits.size() > 4) throw ParseError("exponent too large", start);
      return base.pow(std::stoi(digits));
    }
    return base;
  }

  Polynomial atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial p = expr();
      if (!accept(')')) fail("expected ')'");
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
        ++pos_;
      }
      try {
        return Polynomial::constant(nvars(), parse_decimal(text_.substr(start, pos_ - start)));
      } catch (const std::invalid_argument&) {
        throw ParseError("malformed number", start);
      }
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string_view name = text_.substr(start, pos_ - start);
      for (int i = 0; i < nvars(); ++i) {
        if (vars_[static_cast<std::size_t>(i)] == name) return Polynomial::variable(nvars(), i);
      }
      throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Rational parse_decimal(std::string_view literal) {
  const std::size_t dot = literal.find('.');
  std::string digits;
  std::size_t frac_len = 0;
  if (dot == std::string_view::npos) {
    digits = std::string(literal);
  } else {
    if (literal.find('.', dot + 1) != std::string_view::npos) {
      throw std::invalid_argument("multiple decimal points");
    }
    digits = std::string(literal.substr(0, dot)) + std::string(literal.substr(dot + 1));
    frac_len = literal.size() - dot - 1;
  }
  if (digits.empty()) throw std::invalid_argument("empty number");
  mpz_class num(digits, 10);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Polynomial parse_polynomial(std::string_view text, const std::vector<std::string>& vars) {
  if (vars.empty()) throw std::invalid_argument("parse_polynomial: no variables declared");
  return Parser(text, vars).parse();
}

}  // namespace jacsdp
