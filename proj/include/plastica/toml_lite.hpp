#pragma once

#include <cctype>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "plastica/errors.hpp"
#include "plastica/io.hpp"

namespace plastica {

// Parser for the TOML subset used by scenario files: comments, [a.b]
// section headers, bare keys, strings, booleans, integers, floats and
// (nested) arrays. Arrays may span lines until their brackets balance.
// Produces the same Json document the JSON scenario form parses to.
namespace toml_lite {

namespace detail {

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1;
  int col = 1;

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  char take() {
    const char c = text[pos++];
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return c;
  }
  void skip_ws_inline() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) take();
  }
  // whitespace, newlines and comments
  void skip_ws_and_comments() {
    while (!eof()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        take();
      } else if (c == '#') {
        while (!eof() && peek() != '\n') take();
      } else {
        break;
      }
    }
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ScenarioError(what, line, col);
  }
};

inline bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

inline std::string parse_bare_key(Cursor& c) {
  std::string key;
  while (!c.eof() && is_bare_key_char(c.peek())) key += c.take();
  if (key.empty()) c.fail("expected a key");
  return key;
}

inline std::string parse_string(Cursor& c) {
  c.take();  // opening quote
  std::string s;
  while (true) {
    if (c.eof()) c.fail("unterminated string");
    char ch = c.take();
    if (ch == '"') break;
    if (ch == '\\') {
      if (c.eof()) c.fail("unterminated escape");
      const char esc = c.take();
      switch (esc) {
        case '"': s += '"'; break;
        case '\\': s += '\\'; break;
        case 'n': s += '\n'; break;
        case 't': s += '\t'; break;
        default: c.fail(std::string("unsupported escape \\") + esc);
      }
    } else if (ch == '\n') {
      c.fail("newline inside string");
    } else {
      s += ch;
    }
  }
  return s;
}

inline Json parse_value(Cursor& c);

inline Json parse_array(Cursor& c) {
  c.take();  // '['
  Json arr = Json::array();
  c.skip_ws_and_comments();
  if (!c.eof() && c.peek() == ']') {
    c.take();
    return arr;
  }
  while (true) {
    c.skip_ws_and_comments();
    arr.push_back(parse_value(c));
    c.skip_ws_and_comments();
    if (c.eof()) c.fail("unterminated array");
    const char ch = c.take();
    if (ch == ']') break;
    if (ch != ',') c.fail("expected ',' or ']' in array");
    c.skip_ws_and_comments();
    if (!c.eof() && c.peek() == ']') {  // trailing comma
      c.take();
      break;
    }
  }
  return arr;
}

inline Json parse_number(Cursor& c) {
  std::string tok;
  while (!c.eof() && (std::isdigit(static_cast<unsigned char>(c.peek())) ||
                      c.peek() == '+' || c.peek() == '-' || c.peek() == '.' ||
                      c.peek() == 'e' || c.peek() == 'E' || c.peek() == '_'))
    tok += c.take();
  std::string clean;
  for (char ch : tok)
    if (ch != '_') clean += ch;
  if (clean.empty()) c.fail("expected a number");
  const bool is_float = clean.find_first_of(".eE") != std::string::npos;
  try {
    if (is_float) return Json(std::stod(clean));
    return Json(static_cast<std::int64_t>(std::stoll(clean)));
  } catch (const std::exception&) {
    c.fail("malformed number '" + clean + "'");
  }
}

inline Json parse_value(Cursor& c) {
  if (c.eof()) c.fail("expected a value");
  const char ch = c.peek();
  if (ch == '"') return Json(parse_string(c));
  if (ch == '[') return parse_array(c);
  if (std::isalpha(static_cast<unsigned char>(ch))) {
    const std::string word = parse_bare_key(c);
    if (word == "true") return Json(true);
    if (word == "false") return Json(false);
    if (word == "inf") return Json(std::numeric_limits<double>::infinity());
    if (word == "nan") return Json(std::numeric_limits<double>::quiet_NaN());
    c.fail("unexpected token '" + word + "'");
  }
  return parse_number(c);
}

}  // namespace detail

inline Json parse(const std::string& text) {
  detail::Cursor c{text};
  Json root = Json::object();
  Json* section = &root;

  while (true) {
    c.skip_ws_and_comments();
    if (c.eof()) break;
    if (c.peek() == '[') {
      c.take();
      // dotted section path
      Json* node = &root;
      while (true) {
        c.skip_ws_inline();
        const std::string part = detail::parse_bare_key(c);
        if (!node->contains(part)) (*node)[part] = Json::object();
        node = &(*node)[part];
        if (!node->is_object())
          c.fail("section '" + part + "' conflicts with an existing key");
        c.skip_ws_inline();
        if (c.eof()) c.fail("unterminated section header");
        const char ch = c.take();
        if (ch == ']') break;
        if (ch != '.') c.fail("expected '.' or ']' in section header");
      }
      section = node;
      continue;
    }
    const int key_line = c.line, key_col = c.col;
    const std::string key = detail::parse_bare_key(c);
    c.skip_ws_inline();
    if (c.eof() || c.take() != '=')
      throw ScenarioError("expected '=' after key '" + key + "'", key_line,
                          key_col);
    c.skip_ws_inline();
    if (section->contains(key))
      throw ScenarioError("duplicate key '" + key + "'", key_line, key_col);
    (*section)[key] = detail::parse_value(c);
    c.skip_ws_inline();
    if (!c.eof() && c.peek() == '#')
      while (!c.eof() && c.peek() != '\n') c.take();
    if (!c.eof() && c.peek() != '\n') c.fail("unexpected trailing characters");
  }
  return root;
}

}  // namespace toml_lite
}  // namespace plastica
