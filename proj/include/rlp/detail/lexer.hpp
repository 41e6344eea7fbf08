#pragma once

#include "rlp/rational.hpp"

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace rlp::detail {

struct Token {
  enum class Kind {
    Ident,     // lowercase-initial identifier
    Variable,  // uppercase-initial identifier
    Anon,      // _
    Number,
    Punct,  // single char: ( ) { } , ; . plus operators below as text
    End
  };
  Kind kind = Kind::End;
  std::string text;
  Rational number;
  int line = 1;
  int col = 1;
};

// Shared tokenizer for the .lkb and .rlp surfaces. Longest-match on the
// operator set; `comment_char` starts a to-end-of-line comment.
class Lexer {
 public:
  Lexer(std::string_view src, char comment_char)
      : src_(src), comment_(comment_char) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_ws();
      Token t;
      t.line = line_;
      t.col = col_;
      if (pos_ >= src_.size()) {
        t.kind = Token::Kind::End;
        out.push_back(t);
        break;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                src_[pos_] == '_'))
          advance();
        t.text = std::string(src_.substr(start, pos_ - start));
        if (t.text == "_")
          t.kind = Token::Kind::Anon;
        else if (std::isupper(static_cast<unsigned char>(t.text[0])))
          t.kind = Token::Kind::Variable;
        else
          t.kind = Token::Kind::Ident;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
                src_[pos_] == '.')) {
          // a '.' only belongs to the number when followed by a digit,
          // otherwise it is the clause terminator
          if (src_[pos_] == '.' &&
              (pos_ + 1 >= src_.size() ||
               !std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))))
            break;
          advance();
        }
        t.kind = Token::Kind::Number;
        t.text = std::string(src_.substr(start, pos_ - start));
        t.number = *parse_rational(t.text);
      } else {
        t.kind = Token::Kind::Punct;
        static const char* two[] = {"<=", ">=", "==", "!=", ":-"};
        bool matched = false;
        for (const char* op : two) {
          if (src_.substr(pos_, 2) == op) {
            t.text = op;
            advance();
            advance();
            matched = true;
            break;
          }
        }
        if (!matched) {
          t.text = std::string(1, c);
          advance();
        }
      }
      out.push_back(std::move(t));
    }
    return out;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == comment_) {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view src_;
  char comment_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace rlp::detail
