#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include "relkvn/error.hpp"

namespace relkvn::detail {

enum class Tok { Number, Ident, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const noexcept { return cur_; }

  Token take() {
    Token t = cur_;
    advance();
    return t;
  }

  bool accept(char c) {
    if (cur_.kind == Tok::Punct && cur_.text[0] == c) {
      advance();
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " at offset " + std::to_string(cur_.pos) + " in '" + std::string(src_) + "'");
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    cur_ = Token{};
    cur_.pos = pos_;
    if (pos_ >= src_.size()) return;
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t e = pos_;
      while (e < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[e])) || src_[e] == '.')) ++e;
      if (e < src_.size() && (src_[e] == 'e' || src_[e] == 'E')) {
        std::size_t k = e + 1;
        if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
        if (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) {
          while (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) ++k;
          e = k;
        }
      }
      cur_.kind = Tok::Number;
      cur_.text = std::string(src_.substr(pos_, e - pos_));
      pos_ = e;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t e = pos_;
      while (e < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[e])) || src_[e] == '_')) ++e;
      cur_.kind = Tok::Ident;
      cur_.text = std::string(src_.substr(pos_, e - pos_));
      pos_ = e;
      return;
    }
    if (std::string_view("+-*/^(),").find(c) != std::string_view::npos) {
      cur_.kind = Tok::Punct;
      cur_.text = std::string(1, c);
      ++pos_;
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "' at offset " + std::to_string(pos_));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token cur_;
};

}  // namespace relkvn::detail
