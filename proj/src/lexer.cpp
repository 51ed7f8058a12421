#include "lexer.hpp"

#include <cctype>

namespace slc::detail {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '#';
}

constexpr std::string_view kMultiPunct[] = {"->", "==", "!=", "<=", ">=", ":=", "\\/", "&&", "||"};

}  // namespace

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      t.kind = Token::Kind::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Token::Kind::Int;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else {
      t.kind = Token::Kind::Punct;
      bool matched = false;
      for (auto p : kMultiPunct) {
        if (src.substr(i, p.size()) == p) {
          t.text = std::string(p);
          advance(p.size());
          matched = true;
          break;
        }
      }
      if (!matched) {
        if (std::string_view("(){}[],;:.*&|!=<>+-").find(c) == std::string_view::npos) {
          throw ParseError(std::string("unexpected character '") + c + "'", line, col);
        }
        t.text = std::string(1, c);
        advance(1);
      }
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Token::Kind::End;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

const Token& TokenStream::peek(std::size_t ahead) const {
  std::size_t k = pos_ + ahead;
  return k < toks_.size() ? toks_[k] : toks_.back();
}

const Token& TokenStream::next() {
  const Token& t = peek();
  if (pos_ < toks_.size() - 1) ++pos_;
  return t;
}

bool TokenStream::is(std::string_view s, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return (t.kind == Token::Kind::Punct || t.kind == Token::Kind::Ident) && t.text == s;
}

bool TokenStream::accept(std::string_view s) {
  if (is(s)) {
    next();
    return true;
  }
  return false;
}

const Token& TokenStream::expect(std::string_view s) {
  if (!is(s)) fail("expected '" + std::string(s) + "'");
  return next();
}

std::string TokenStream::expect_ident() {
  if (peek().kind != Token::Kind::Ident) fail("expected identifier");
  return next().text;
}

long long TokenStream::expect_int() {
  if (peek().kind != Token::Kind::Int) fail("expected integer literal");
  const Token& t = next();
  if (t.text.size() > 11) fail_at(t, "integer literal out of 32-bit range");
  return std::stoll(t.text);
}

void TokenStream::fail(const std::string& msg) const { fail_at(peek(), msg); }

void TokenStream::fail_at(const Token& t, const std::string& msg) const {
  std::string got = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
  throw ParseError(msg + ", got " + got, t.line, t.column);
}

}  // namespace slc::detail
