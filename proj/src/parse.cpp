#include "zerodist/parse.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "zerodist/error.hpp"

namespace zerodist {
namespace {

class Parser {
 public:
  Parser(std::string_view text, int line) : text_(text), line_(line) {}

  Expr parse() {
    Expr e = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw Error(ErrorKind::parse_error, "line " + std::to_string(line_) + ", column " +
                                            std::to_string(pos_ + 1) + ": " + message);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool starts_primary() {
    const char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '(' || c == 'z' ||
           c == 'i' || c == 'e';
  }

  Expr expression() {
    Expr e = term();
    for (;;) {
      const char c = peek();
      if (c == '+') {
        ++pos_;
        e = e + term();
      } else if (c == '-') {
        ++pos_;
        e = e + Expr::constant(-1.0) * term();
      } else {
        return e;
      }
    }
  }

  Expr term() {
    Expr e = factor();
    for (;;) {
      if (peek() == '*') {
        ++pos_;
        e = e * factor();
      } else if (starts_primary()) {
        e = e * factor();
      } else {
        return e;
      }
    }
  }

  Expr factor() {
    Expr base = unary();
    if (peek() != '^') return base;
    ++pos_;
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a nonnegative integer exponent");
    int k = 0;
    const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, k);
    if (ec != std::errc{}) {
      pos_ = start;
      fail("exponent out of range");
    }
    return Expr::power(std::move(base), k);
  }

  Expr unary() {
    if (peek() == '-') {
      ++pos_;
      return Expr::constant(-1.0) * unary();
    }
    return primary();
  }

  Expr primary() {
    const char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == 'z') {
      ++pos_;
      return Expr::variable();
    }
    if (c == 'i') {
      ++pos_;
      return Expr::constant(Complex(0.0, 1.0));
    }
    if (text_.substr(pos_, 3) == "exp") {
      pos_ += 3;
      if (peek() != '(') fail("expected '(' after exp");
      ++pos_;
      Expr arg = expression();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return Expr::exp(std::move(arg));
    }
    if (c == '(') {
      ++pos_;
      Expr e = expression();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return e;
    }
    if (c == '\0') fail("unexpected end of expression");
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    // Exponent suffix such as 1e-3; "e" alone would start exp(...).
    if (pos_ + 1 < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (text_[p] == '+' || text_[p] == '-') ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        pos_ = p;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
          ++pos_;
      }
    }
    double value = 0.0;
    try {
      std::size_t used = 0;
      const std::string token(text_.substr(start, pos_ - start));
      value = std::stod(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      pos_ = start;
      fail("malformed number");
    }
    if (pos_ < text_.size() && text_[pos_] == 'i') {
      ++pos_;
      return Expr::constant(Complex(0.0, value));
    }
    return Expr::constant(value);
  }

  std::string_view text_;
  int line_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expression(std::string_view text, int line) { return Parser(text, line).parse(); }

BasisSystem parse_basis(std::string_view text) {
  std::vector<Expr> functions;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first != std::string_view::npos && line[first] != '#') {
      if (line.back() == '\r') line.remove_suffix(1);
      functions.push_back(parse_expression(line, line_no));
    }
    start = end + 1;
  }
  if (functions.empty())
    throw Error(ErrorKind::parse_error, "line 1, column 1: basis file defines no functions");
  return BasisSystem(std::move(functions));
}

BasisSystem load_basis(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open basis file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_basis(buffer.str());
}

}  // namespace zerodist
