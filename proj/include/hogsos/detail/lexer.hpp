#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>

#include "hogsos/error.hpp"

namespace hogsos::detail {

// UTF-8 encodings of the two non-ASCII tokens the grammars accept.
inline constexpr std::string_view middle_dot = "\xC2\xB7";  // ·
inline constexpr std::string_view circled_plus = "\xE2\x8A\x95";  // ⊕
inline constexpr std::string_view greek_lambda = "\xCE\xBB";  // λ

enum class Tok {
  ident,
  nat,
  lparen,
  rparen,
  lbrace,
  rbrace,
  comma,
  semicolon,
  colon,
  slash,
  dot,
  backslash,
  at,
  equals,
  plus,
  turnstile,    // |-
  arrow,        // ->
  long_arrow,   // -->
  label_open,   // -[
  label_close,  // ]->
  fun_open,     // =[
  fun_close,    // ]=>
  end,
};

struct Token {
  Tok kind = Tok::end;
  std::string text;
  std::size_t offset = 0;
};

// Hand-written scanner shared by the term, rule-spec and lambda grammars.
// Whitespace and `//` line comments are skipped. The middle dot lexes as an
// identifier so the hole can be written directly.
class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const noexcept { return current_; }

  Token next() {
    Token t = current_;
    advance();
    return t;
  }

  bool accept(Tok kind) {
    if (current_.kind != kind) return false;
    advance();
    return true;
  }

  Token expect(Tok kind, std::string_view what) {
    if (current_.kind != kind) fail("expected " + std::string(what) + ", found " + describe(current_));
    return next();
  }

  [[noreturn]] void fail(const std::string& message) const { fail_at(current_.offset, message); }

  [[noreturn]] void fail_at(std::size_t offset, const std::string& message) const {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < offset && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        column = 1;
      } else if ((static_cast<unsigned char>(src_[i]) & 0xC0) != 0x80) {
        ++column;
      }
    }
    throw ParseError(message, line, column);
  }

  static std::string describe(const Token& t) {
    if (t.kind == Tok::end) return "end of input";
    return "'" + t.text + "'";
  }

 private:
  static bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_';
  }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '\'';
  }

  bool starts_with(std::string_view s) const { return src_.substr(pos_).starts_with(s); }

  void skip_blank() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) != 0) {
        ++pos_;
      } else if (starts_with("//")) {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  void emit(Tok kind, std::size_t len) {
    current_ = Token{kind, std::string(src_.substr(pos_, len)), pos_};
    pos_ += len;
  }

  void advance() {
    skip_blank();
    if (pos_ >= src_.size()) {
      current_ = Token{Tok::end, "", src_.size()};
      return;
    }
    const char c = src_[pos_];
    if (ident_start(c)) {
      std::size_t end = pos_ + 1;
      while (end < src_.size() && ident_char(src_[end])) ++end;
      emit(Tok::ident, end - pos_);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) != 0) {
      std::size_t end = pos_ + 1;
      while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end])) != 0) ++end;
      emit(Tok::nat, end - pos_);
      return;
    }
    if (starts_with(middle_dot)) return emit(Tok::ident, middle_dot.size());
    if (starts_with(circled_plus)) return emit(Tok::plus, circled_plus.size());
    if (starts_with(greek_lambda)) return emit(Tok::backslash, greek_lambda.size());
    if (starts_with("-->")) return emit(Tok::long_arrow, 3);
    if (starts_with("->")) return emit(Tok::arrow, 2);
    if (starts_with("-[")) return emit(Tok::label_open, 2);
    if (starts_with("]->")) return emit(Tok::label_close, 3);
    if (starts_with("]=>")) return emit(Tok::fun_close, 3);
    if (starts_with("=[")) return emit(Tok::fun_open, 2);
    if (starts_with("|-")) return emit(Tok::turnstile, 2);
    switch (c) {
      case '(': return emit(Tok::lparen, 1);
      case ')': return emit(Tok::rparen, 1);
      case '{': return emit(Tok::lbrace, 1);
      case '}': return emit(Tok::rbrace, 1);
      case ',': return emit(Tok::comma, 1);
      case ';': return emit(Tok::semicolon, 1);
      case ':': return emit(Tok::colon, 1);
      case '/': return emit(Tok::slash, 1);
      case '.': return emit(Tok::dot, 1);
      case '\\': return emit(Tok::backslash, 1);
      case '@': return emit(Tok::at, 1);
      case '=': return emit(Tok::equals, 1);
      case '+': return emit(Tok::plus, 1);
      default: break;
    }
    fail_at(pos_, "unexpected character '" + std::string(1, c) + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token current_;
};

}  // namespace hogsos::detail
