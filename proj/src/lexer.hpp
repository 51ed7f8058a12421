// Tokenizer shared by the .sl and .ir front ends.
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "slc/formulas.hpp"

namespace slc::detail {

struct Token {
  enum class Kind { Ident, Int, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 1;
  int column = 1;
};

std::vector<Token> tokenize(std::string_view src);

class TokenStream {
 public:
  explicit TokenStream(std::string_view src) : toks_(tokenize(src)) {}

  const Token& peek(std::size_t ahead = 0) const;
  const Token& next();
  bool at_end() const { return peek().kind == Token::Kind::End; }

  bool is(std::string_view punct_or_word, std::size_t ahead = 0) const;
  bool accept(std::string_view punct_or_word);
  const Token& expect(std::string_view punct_or_word);
  std::string expect_ident();
  long long expect_int();

  [[noreturn]] void fail(const std::string& msg) const;
  [[noreturn]] void fail_at(const Token& t, const std::string& msg) const;

  std::size_t mark() const { return pos_; }
  void reset(std::size_t m) { pos_ = m; }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace slc::detail
