#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace mecsim::toml {

// Strict subset of TOML sufficient for flat configuration files: comments,
// [table] headers (dotted allowed), and key = value lines with integers,
// floats, booleans, basic strings, and single-line homogeneous arrays.
// Errors carry the origin name and 1-based line number.
class Value {
public:
  enum class Kind { Integer, Float, Boolean, String, Array };

  static Value integer(std::int64_t v, int line);
  static Value floating(double v, int line);
  static Value boolean(bool v, int line);
  static Value string(std::string v, int line);
  static Value array(std::vector<Value> v, int line);

  Kind kind() const { return kind_; }
  int line() const { return line_; }

  std::int64_t as_integer() const;
  // Accepts Integer or Float.
  double as_number() const;
  bool as_boolean() const;
  const std::string& as_string() const;
  const std::vector<Value>& as_array() const;

private:
  Kind kind_ = Kind::Integer;
  int line_ = 0;
  std::variant<std::int64_t, double, bool, std::string, std::vector<Value>> data_;
};

// Keys are full dotted paths ("radio.noise_variance").
using Document = std::map<std::string, Value>;

// Throws std::runtime_error with "origin:line: message" on any syntax
// problem, duplicate key, or unsupported construct.
Document parse(const std::string& text, const std::string& origin = "config");

}  // namespace mecsim::toml
