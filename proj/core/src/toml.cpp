#include "mecsim/toml.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <stdexcept>

namespace mecsim::toml {

namespace {

[[noreturn]] void fail(const std::string& origin, int line, const std::string& message) {
  throw std::runtime_error(origin + ":" + std::to_string(line) + ": " + message);
}

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
    ++b;
  }
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
    --e;
  }
  return s.substr(b, e - b);
}

bool is_bare_key(const std::string& s) {
  if (s.empty()) {
    return false;
  }
  for (char c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    if (!ok) {
      return false;
    }
  }
  return true;
}

bool is_dotted_key(const std::string& s, const std::string& origin, int line) {
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = s.find('.', start);
    const std::string part = s.substr(start, dot == std::string::npos ? dot : dot - start);
    if (!is_bare_key(part)) {
      fail(origin, line, "invalid key '" + s + "'");
    }
    if (dot == std::string::npos) {
      return true;
    }
    start = dot + 1;
  }
}

// Removes an unquoted # comment. Quotes only matter in value position, and
// the subset forbids # inside bare keys, so scanning the whole line works.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
    } else if (c == '"') {
      in_string = true;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

class ValueParser {
public:
  ValueParser(std::string text, std::string origin, int line)
      : text_(std::move(text)), origin_(std::move(origin)), line_(line) {}

  Value parse_all() {
    const Value v = parse_value();
    skip_spaces();
    if (pos_ != text_.size()) {
      fail(origin_, line_, "trailing characters after value");
    }
    return v;
  }

private:
  void skip_spaces() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  Value parse_value() {
    skip_spaces();
    if (pos_ >= text_.size()) {
      fail(origin_, line_, "missing value");
    }
    const char c = text_[pos_];
    if (c == '"') {
      return parse_string();
    }
    if (c == '[') {
      return parse_array();
    }
    return parse_scalar();
  }

  Value parse_string() {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < text_.size()) {
      const char c = text_[pos_++];
      if (c == '"') {
        return Value::string(out, line_);
      }
      if (c == '\\') {
        if (pos_ >= text_.size()) {
          break;
        }
        const char esc = text_[pos_++];
        switch (esc) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          default: fail(origin_, line_, std::string("unsupported escape '\\") + esc + "'");
        }
      } else {
        out += c;
      }
    }
    fail(origin_, line_, "unterminated string");
  }

  Value parse_array() {
    const int line = line_;
    ++pos_;  // opening bracket
    std::vector<Value> items;
    skip_spaces();
    if (pos_ < text_.size() && text_[pos_] == ']') {
      ++pos_;
      return Value::array(std::move(items), line);
    }
    while (true) {
      items.push_back(parse_value());
      if (items.size() > 1 && items.back().kind() != items.front().kind()) {
        fail(origin_, line, "arrays must hold one value type");
      }
      skip_spaces();
      if (pos_ >= text_.size()) {
        fail(origin_, line, "unterminated array");
      }
      const char c = text_[pos_++];
      if (c == ']') {
        return Value::array(std::move(items), line);
      }
      if (c != ',') {
        fail(origin_, line, "expected ',' or ']' in array");
      }
    }
  }

  Value parse_scalar() {
    std::size_t end = pos_;
    while (end < text_.size() && text_[end] != ',' && text_[end] != ']' &&
           !std::isspace(static_cast<unsigned char>(text_[end]))) {
      ++end;
    }
    const std::string token = text_.substr(pos_, end - pos_);
    pos_ = end;
    if (token == "true") {
      return Value::boolean(true, line_);
    }
    if (token == "false") {
      return Value::boolean(false, line_);
    }

    bool integer_shaped = !token.empty();
    for (std::size_t i = 0; i < token.size(); ++i) {
      const char c = token[i];
      if (i == 0 && (c == '+' || c == '-')) {
        integer_shaped = token.size() > 1;
        continue;
      }
      if (!std::isdigit(static_cast<unsigned char>(c))) {
        integer_shaped = false;
        break;
      }
    }
    errno = 0;
    if (integer_shaped) {
      char* end_ptr = nullptr;
      const long long v = std::strtoll(token.c_str(), &end_ptr, 10);
      if (errno == ERANGE) {
        fail(origin_, line_, "integer out of range: " + token);
      }
      if (end_ptr && *end_ptr == '\0') {
        return Value::integer(v, line_);
      }
    }
    char* end_ptr = nullptr;
    const double d = std::strtod(token.c_str(), &end_ptr);
    if (token.empty() || end_ptr == nullptr || *end_ptr != '\0') {
      fail(origin_, line_, "cannot parse value '" + token + "'");
    }
    if (errno == ERANGE) {
      fail(origin_, line_, "number out of range: " + token);
    }
    return Value::floating(d, line_);
  }

  const std::string text_;
  const std::string origin_;
  int line_;
  std::size_t pos_ = 0;
};

}  // namespace

Value Value::integer(std::int64_t v, int line) {
  Value out;
  out.kind_ = Kind::Integer;
  out.line_ = line;
  out.data_ = v;
  return out;
}

Value Value::floating(double v, int line) {
  Value out;
  out.kind_ = Kind::Float;
  out.line_ = line;
  out.data_ = v;
  return out;
}

Value Value::boolean(bool v, int line) {
  Value out;
  out.kind_ = Kind::Boolean;
  out.line_ = line;
  out.data_ = v;
  return out;
}

Value Value::string(std::string v, int line) {
  Value out;
  out.kind_ = Kind::String;
  out.line_ = line;
  out.data_ = std::move(v);
  return out;
}

Value Value::array(std::vector<Value> v, int line) {
  Value out;
  out.kind_ = Kind::Array;
  out.line_ = line;
  out.data_ = std::move(v);
  return out;
}

std::int64_t Value::as_integer() const {
  if (kind_ != Kind::Integer) {
    throw std::runtime_error("value is not an integer (line " + std::to_string(line_) + ")");
  }
  return std::get<std::int64_t>(data_);
}

double Value::as_number() const {
  if (kind_ == Kind::Integer) {
    return static_cast<double>(std::get<std::int64_t>(data_));
  }
  if (kind_ == Kind::Float) {
    return std::get<double>(data_);
  }
  throw std::runtime_error("value is not a number (line " + std::to_string(line_) + ")");
}

bool Value::as_boolean() const {
  if (kind_ != Kind::Boolean) {
    throw std::runtime_error("value is not a boolean (line " + std::to_string(line_) + ")");
  }
  return std::get<bool>(data_);
}

const std::string& Value::as_string() const {
  if (kind_ != Kind::String) {
    throw std::runtime_error("value is not a string (line " + std::to_string(line_) + ")");
  }
  return std::get<std::string>(data_);
}

const std::vector<Value>& Value::as_array() const {
  if (kind_ != Kind::Array) {
    throw std::runtime_error("value is not an array (line " + std::to_string(line_) + ")");
  }
  return std::get<std::vector<Value>>(data_);
}

Document parse(const std::string& text, const std::string& origin) {
  Document doc;
  std::string prefix;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string raw =
        text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    const std::string line = trim(strip_comment(raw));
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        fail(origin, line_no, "unterminated table header");
      }
      const std::string name = trim(line.substr(1, line.size() - 2));
      is_dotted_key(name, origin, line_no);
      prefix = name;
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      fail(origin, line_no, "expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    is_dotted_key(key, origin, line_no);
    const std::string full_key = prefix.empty() ? key : prefix + "." + key;
    if (doc.contains(full_key)) {
      fail(origin, line_no, "duplicate key '" + full_key + "'");
    }
    ValueParser vp(line.substr(eq + 1), origin, line_no);
    doc.emplace(full_key, vp.parse_all());
  }
  return doc;
}

}  // namespace mecsim::toml
