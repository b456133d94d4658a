#pragma once

// Model terms, shared by distributions, intensities, dependence
// models and weight laws:
//
//   term   := ident [ '{' [ arg { ',' arg } ] '}' ]
//   arg    := ident '=' value
//   value  := number | ident | '[' [ number { ',' number } ] ']'
//   ident  := letter { letter | digit | '_' }
//   number := C locale floating literal (strtod syntax, no hex)
//
// Whitespace is allowed between tokens.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ruinlab/errors.hpp"

namespace ruinlab {

/// Syntax or semantic error in a term; column is 1-based within the term text.
class TermError : public DomainError {
 public:
  TermError(const std::string& what, int column) : DomainError(what), column_(column) {}
  int column() const noexcept { return column_; }

 private:
  int column_;
};

struct TermArg {
  std::string key;
  std::variant<double, std::string, std::vector<double>> value;
  int column = 0;
};

class Term {
 public:
  std::string name;
  std::vector<TermArg> args;
  int name_column = 1;

  /// Required numeric argument.
  double number(std::string_view key) const;
  double number_or(std::string_view key, double fallback) const;
  std::string ident_or(std::string_view key, std::string_view fallback) const;
  std::vector<double> list(std::string_view key) const;
  bool has(std::string_view key) const;

  /// Throws TermError naming the first argument whose key is not in `allowed`.
  void expect_keys(std::initializer_list<std::string_view> allowed) const;

 private:
  const TermArg* find(std::string_view key) const;
};

Term parse_term(std::string_view text);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_number(double v);
std::string format_list(std::span<const double> values);

/// Parses "[a, b, c]" or "a, b, c" into numbers.
std::vector<double> parse_number_list(std::string_view text);

}  // namespace ruinlab
