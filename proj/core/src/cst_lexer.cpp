#include <array>
#include <cctype>
#include <unordered_set>

#include "cassim/cst.hpp"

namespace cassim::cst {

namespace {

const std::unordered_set<std::string_view>& keyword_set() {
  static const std::unordered_set<std::string_view> kw = {
      "int",   "float", "double",   "char",   "void", "long",
      "short", "unsigned", "signed", "const",  "if",   "else",
      "while", "for",   "return",   "break",  "continue",
  };
  return kw;
}

// Multi-character punctuators, longest first per leading character.
const std::array<std::string_view, 19> kLongPunct = {
    "<<=", ">>=", "->", "++", "--", "<<", ">>", "<=", ">=", "==",
    "!=",  "&&",  "||", "+=", "-=", "*=", "/=", "%=", "&=",
};
const std::array<std::string_view, 2> kLongPunct2 = {"|=", "^="};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

bool is_keyword(std::string_view text) { return keyword_set().count(text) > 0; }

TokenCategory classify_token(std::string_view text) {
  if (text.empty()) return TokenCategory::punct;
  char c = text.front();
  if (is_digit(c) || c == '"' || c == '\'') return TokenCategory::literal;
  if (c == '.' && text.size() > 1 && is_digit(text[1])) return TokenCategory::literal;
  if (is_ident_start(c)) {
    return is_keyword(text) ? TokenCategory::keyword : TokenCategory::identifier;
  }
  return TokenCategory::punct;
}

std::string preprocess(std::string_view contents) {
  std::string out(contents);
  size_t i = 0;
  const size_t n = out.size();
  auto at_line_start = [&](size_t pos) {
    while (pos > 0) {
      char c = out[pos - 1];
      if (c == '\n') return true;
      if (c != ' ' && c != '\t' && c != '\r') return false;
      --pos;
    }
    return true;
  };
  while (i < n) {
    char c = out[i];
    if (c == '/' && i + 1 < n && out[i + 1] == '/') {
      while (i < n && out[i] != '\n') out[i++] = ' ';
    } else if (c == '/' && i + 1 < n && out[i + 1] == '*') {
      size_t start = i;
      out[i] = ' ';
      out[i + 1] = ' ';
      i += 2;
      bool closed = false;
      while (i < n) {
        if (out[i] == '*' && i + 1 < n && out[i + 1] == '/') {
          out[i] = ' ';
          out[i + 1] = ' ';
          i += 2;
          closed = true;
          break;
        }
        if (out[i] != '\n') out[i] = ' ';
        ++i;
      }
      if (!closed) {
        throw Error("unterminated block comment at byte " + std::to_string(start));
      }
    } else if (c == '#' && at_line_start(i)) {
      // Preprocessor line; honours backslash continuations.
      while (i < n && out[i] != '\n') {
        bool continued = out[i] == '\\' && i + 1 < n && out[i + 1] == '\n';
        out[i++] = ' ';
        if (continued) ++i;
      }
    } else if (c == '"' || c == '\'') {
      // Skip string/char bodies so `//` inside them survives.
      char quote = c;
      ++i;
      while (i < n && out[i] != quote) {
        if (out[i] == '\\' && i + 1 < n) ++i;
        ++i;
      }
      ++i;  // closing quote or one past end; the lexer reports unterminated
    } else {
      ++i;
    }
  }
  return out;
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> tokens;
  size_t i = 0;
  const size_t n = src.size();
  auto push = [&](size_t begin, size_t end, TokenCategory cat) {
    tokens.push_back(Token{std::string(src.substr(begin, end - begin)),
                           Span{static_cast<uint32_t>(begin), static_cast<uint32_t>(end)}, cat});
  };
  while (i < n) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
      ++i;
      continue;
    }
    size_t begin = i;
    if (is_ident_start(c)) {
      while (i < n && is_ident_char(src[i])) ++i;
      std::string_view text = src.substr(begin, i - begin);
      push(begin, i, is_keyword(text) ? TokenCategory::keyword : TokenCategory::identifier);
      continue;
    }
    if (is_digit(c) || (c == '.' && i + 1 < n && is_digit(src[i + 1]))) {
      bool hex = c == '0' && i + 1 < n && (src[i + 1] == 'x' || src[i + 1] == 'X');
      if (hex) i += 2;
      auto digit_ok = [&](char d) {
        if (hex) return std::isxdigit(static_cast<unsigned char>(d)) != 0;
        return is_digit(d);
      };
      while (i < n && digit_ok(src[i])) ++i;
      if (!hex && i < n && src[i] == '.') {
        ++i;
        while (i < n && is_digit(src[i])) ++i;
      }
      if (!hex && i < n && (src[i] == 'e' || src[i] == 'E')) {
        size_t j = i + 1;
        if (j < n && (src[j] == '+' || src[j] == '-')) ++j;
        if (j < n && is_digit(src[j])) {
          i = j;
          while (i < n && is_digit(src[i])) ++i;
        }
      }
      while (i < n && (src[i] == 'u' || src[i] == 'U' || src[i] == 'l' || src[i] == 'L' ||
                       src[i] == 'f' || src[i] == 'F')) {
        ++i;
      }
      push(begin, i, TokenCategory::literal);
      continue;
    }
    if (c == '"' || c == '\'') {
      ++i;
      bool closed = false;
      while (i < n) {
        if (src[i] == '\\' && i + 1 < n) {
          i += 2;
          continue;
        }
        if (src[i] == c) {
          ++i;
          closed = true;
          break;
        }
        if (src[i] == '\n') break;
        ++i;
      }
      if (!closed) {
        throw Error(std::string("unterminated ") + (c == '"' ? "string" : "character") +
                    " literal at byte " + std::to_string(begin));
      }
      push(begin, i, TokenCategory::literal);
      continue;
    }
    // Punctuators, maximal munch.
    bool matched = false;
    for (std::string_view p : kLongPunct) {
      if (src.substr(i).starts_with(p)) {
        i += p.size();
        push(begin, i, TokenCategory::punct);
        matched = true;
        break;
      }
    }
    if (!matched) {
      for (std::string_view p : kLongPunct2) {
        if (src.substr(i).starts_with(p)) {
          i += p.size();
          push(begin, i, TokenCategory::punct);
          matched = true;
          break;
        }
      }
    }
    if (matched) continue;
    static const std::string_view kSingle = "+-*/%=<>!~&|^.,;:?()[]{}";
    if (kSingle.find(c) != std::string_view::npos) {
      ++i;
      push(begin, i, TokenCategory::punct);
      continue;
    }
    throw Error("unexpected character '" + std::string(1, c) + "' at byte " +
                std::to_string(begin));
  }
  return tokens;
}

}  // namespace cassim::cst
