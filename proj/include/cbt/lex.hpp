#pragma once

// Tokenizer for the .cbt surface syntax, plus the Diagnostic type shared by
// every frontend stage. The surface is ASCII-only; anything else is reported
// with a span instead of being silently skipped.

#include <array>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cbt {

struct Span {
  std::size_t begin = 0;  // byte offsets, end exclusive
  std::size_t end = 0;
};

enum class TokenKind { Ident, Keyword, Symbol, Eof };

struct Token {
  TokenKind kind = TokenKind::Eof;
  std::string lexeme;
  Span span;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string message;
  Span span;
  std::optional<std::string> expected;  // pretty-printed normal forms
  std::optional<std::string> actual;

  /// "file:line:col: error: message [expected ...; actual ...]"
  std::string one_line(const std::string& file, const std::string& source) const {
    auto [line, col] = line_col(source, span.begin);
    std::ostringstream os;
    os << file << ":" << line << ":" << col << ": "
       << (severity == Severity::Error ? "error" : "warning") << ": " << message;
    if (expected || actual) {
      os << " [";
      if (expected) os << "expected " << *expected;
      if (expected && actual) os << "; ";
      if (actual) os << "actual " << *actual;
      os << "]";
    }
    return os.str();
  }

  /// One-line header plus the offending source line with carets underneath.
  std::string caret_display(const std::string& file, const std::string& source) const {
    auto [line, col] = line_col(source, span.begin);
    std::ostringstream os;
    os << file << ":" << line << ":" << col << ": "
       << (severity == Severity::Error ? "error" : "warning") << ": " << message << "\n";
    std::size_t ls = span.begin;
    while (ls > 0 && source[ls - 1] != '\n') --ls;
    std::size_t le = span.begin;
    while (le < source.size() && source[le] != '\n') ++le;
    os << "  " << source.substr(ls, le - ls) << "\n  ";
    for (std::size_t k = ls; k < span.begin; ++k) os << (source[k] == '\t' ? '\t' : ' ');
    std::size_t width = span.end > span.begin ? span.end - span.begin : 1;
    for (std::size_t k = 0; k < width && span.begin + k < le + 1; ++k) os << '^';
    if (expected) os << "\nexpected: " << *expected;
    if (actual) os << "\nactual:   " << *actual;
    return os.str();
  }

  static std::pair<std::size_t, std::size_t> line_col(const std::string& source,
                                                      std::size_t offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k < offset && k < source.size(); ++k) {
      if (source[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return {line, col};
  }
};

inline const std::array<std::string_view, 29>& keywords() {
  static const std::array<std::string_view, 29> kws = {
      "def",  "eq",    "assume", "Unit", "Prop", "Bool",   "Void",
      "Id",   "Pi",    "El",     "Trunc", "star", "pair",  "inl",
      "inr",  "match", "as",     "fun",  "dfun", "refl",   "R",
      "true", "false", "if",     "then", "else", "squash", "truncElim",
      "IdP"};
  return kws;
}

inline bool is_keyword(std::string_view s) {
  for (auto k : keywords())
    if (k == s) return true;
  return false;
}

/// Deterministic token stream; `--` comments run to end of line.
inline std::variant<std::vector<Token>, Diagnostic> tokenize(const std::string& src) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = src.size();
  auto sym = [&](std::size_t start, std::string s) {
    out.push_back({TokenKind::Symbol, std::move(s), {start, i}});
  };
  while (i < n) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < n && src[i + 1] == '-') {
      while (i < n && src[i] != '\n') ++i;
      continue;
    }
    std::size_t start = i;
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
      ++i;
      while (i < n && ((src[i] >= 'a' && src[i] <= 'z') || (src[i] >= 'A' && src[i] <= 'Z') ||
                       (src[i] >= '0' && src[i] <= '9') || src[i] == '_'))
        ++i;
      std::string word = src.substr(start, i - start);
      out.push_back({is_keyword(word) ? TokenKind::Keyword : TokenKind::Ident,
                     std::move(word),
                     {start, i}});
      continue;
    }
    switch (c) {
      case '(': case ')': case '{': case '}': case ',': case ';':
      case '*': case '+':
        ++i;
        sym(start, std::string(1, c));
        continue;
      case ':':
        ++i;
        if (i < n && src[i] == '=') {
          ++i;
          sym(start, ":=");
        } else {
          sym(start, ":");
        }
        continue;
      case '=':
        ++i;
        if (i < n && src[i] == '>') {
          ++i;
          sym(start, "=>");
        } else {
          sym(start, "=");
        }
        continue;
      case '-':
        ++i;
        if (i < n && src[i] == '>') {
          ++i;
          sym(start, "->");
          continue;
        }
        return Diagnostic{Severity::Error, "stray '-'; expected '->' or a '--' comment",
                          {start, i}};
      case '.':
        ++i;
        if (i < n && (src[i] == '1' || src[i] == '2')) {
          ++i;
          sym(start, src.substr(start, 2));
          continue;
        }
        return Diagnostic{Severity::Error, "expected '.1' or '.2' after '.'", {start, i}};
      default:
        break;
    }
    // flag the whole UTF-8 sequence, not just its first byte
    std::size_t len = 1;
    if ((c & 0xE0) == 0xC0) len = 2;
    else if ((c & 0xF0) == 0xE0) len = 3;
    else if ((c & 0xF8) == 0xF0) len = 4;
    return Diagnostic{Severity::Error,
                      "unsupported character '" + src.substr(start, len) +
                          "'; the surface syntax is ASCII",
                      {start, start + len}};
  }
  out.push_back({TokenKind::Eof, "", {n, n}});
  return out;
}

}  // namespace cbt
