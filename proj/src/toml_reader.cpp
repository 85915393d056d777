#include "sea/toml_reader.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "sea/error.hpp"

namespace sea {
namespace {

using nlohmann::json;

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  json parse() {
    json root = json::object();
    json* current = &root;
    while (true) {
      skip_ws_and_newlines();
      if (eof()) break;
      if (peek() == '[') {
        current = parse_header(root);
      } else {
        parse_key_value(*current);
      }
      expect_line_end();
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(errc::kParse, "toml:" + std::to_string(line_), what);
  }

  bool eof() const { return pos_ >= s_.size(); }
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0'; }
  char get() {
    const char c = s_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
    if (peek() == '#') {
      while (!eof() && peek() != '\n') ++pos_;
    }
  }

  void skip_ws_and_newlines() {
    while (true) {
      skip_ws();
      if (peek() == '\r' || peek() == '\n') {
        get();
        continue;
      }
      break;
    }
  }

  void expect_line_end() {
    skip_ws();
    if (eof()) return;
    if (peek() == '\r') get();
    if (peek() != '\n') fail("expected end of line");
    get();
  }

  std::string parse_key_part() {
    skip_ws();
    if (peek() == '"') return parse_basic_string();
    if (peek() == '\'') return parse_literal_string();
    std::string key;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) {
      key.push_back(get());
    }
    if (key.empty()) fail("expected a key");
    return key;
  }

  std::vector<std::string> parse_key() {
    std::vector<std::string> parts{parse_key_part()};
    skip_ws();
    while (peek() == '.') {
      get();
      parts.push_back(parse_key_part());
      skip_ws();
    }
    return parts;
  }

  json* descend(json* node, const std::string& key) {
    json& child = (*node)[key];
    if (child.is_null()) child = json::object();
    if (child.is_array() && !child.empty() && child.back().is_object()) return &child.back();
    if (!child.is_object()) fail("key '" + key + "' is not a table");
    return &child;
  }

  json* parse_header(json& root) {
    get();
    const bool array_of_tables = peek() == '[';
    if (array_of_tables) get();
    const auto parts = parse_key();
    if (get() != ']') fail("expected ']'");
    if (array_of_tables && get() != ']') fail("expected ']]'");
    json* node = &root;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = descend(node, parts[i]);
    json& last = (*node)[parts.back()];
    if (array_of_tables) {
      if (last.is_null()) last = json::array();
      if (!last.is_array()) fail("'" + parts.back() + "' is not an array of tables");
      last.push_back(json::object());
      return &last.back();
    }
    if (last.is_null()) last = json::object();
    if (!last.is_object()) fail("'" + parts.back() + "' redefined as a table");
    return &last;
  }

  void parse_key_value(json& table) {
    const auto parts = parse_key();
    skip_ws();
    if (get() != '=') fail("expected '='");
    skip_ws();
    json* node = &table;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = descend(node, parts[i]);
    if (node->contains(parts.back())) fail("duplicate key '" + parts.back() + "'");
    (*node)[parts.back()] = parse_value();
  }

  json parse_value() {
    skip_ws();
    const char c = peek();
    if (c == '"') return parse_basic_string();
    if (c == '\'') return parse_literal_string();
    if (c == '[') return parse_array();
    if (c == '{') return parse_inline_table();
    if (s_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return true;
    }
    if (s_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return false;
    }
    return parse_number();
  }

  std::string parse_basic_string() {
    get();
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = get();
      if (c == '"') break;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      const char e = get();
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        default: fail(std::string("unsupported escape \\") + e);
      }
    }
    return out;
  }

  std::string parse_literal_string() {
    get();
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = get();
      if (c == '\'') break;
      out.push_back(c);
    }
    return out;
  }

  json parse_array() {
    get();
    json arr = json::array();
    while (true) {
      skip_ws_and_newlines();
      if (peek() == ']') {
        get();
        return arr;
      }
      arr.push_back(parse_value());
      skip_ws_and_newlines();
      if (peek() == ',') {
        get();
        continue;
      }
      if (peek() == ']') {
        get();
        return arr;
      }
      fail("expected ',' or ']' in array");
    }
  }

  json parse_inline_table() {
    get();
    json table = json::object();
    skip_ws();
    if (peek() == '}') {
      get();
      return table;
    }
    while (true) {
      parse_key_value(table);
      skip_ws();
      const char c = get();
      if (c == '}') return table;
      if (c != ',') fail("expected ',' or '}' in inline table");
    }
  }

  json parse_number() {
    std::string token;
    while (!eof()) {
      const char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.' || c == '_') {
        if (c != '_') token.push_back(c);
        ++pos_;
      } else {
        break;
      }
    }
    if (token.empty()) fail("expected a value");
    std::string_view body = token;
    bool negative = false;
    if (body.front() == '+' || body.front() == '-') {
      negative = body.front() == '-';
      body.remove_prefix(1);
    }
    if (body == "inf") return negative ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    if (body == "nan") return std::numeric_limits<double>::quiet_NaN();
    const bool is_float = token.find_first_of(".eE") != std::string::npos;
    if (!is_float) {
      long long v = 0;
      const auto [end, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
      if (ec != std::errc() || end != body.data() + body.size()) fail("invalid number '" + token + "'");
      return negative ? -v : v;
    }
    double v = 0.0;
    const auto [end, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
    if (ec != std::errc() || end != body.data() + body.size()) fail("invalid number '" + token + "'");
    return negative ? -v : v;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

nlohmann::json parse_toml(std::string_view text) { return Parser(text).parse(); }

}  // namespace sea
