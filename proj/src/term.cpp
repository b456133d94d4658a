#include "ruinlab/term.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

namespace ruinlab {

namespace {

class TermLexer {
 public:
  explicit TermLexer(std::string_view text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }
  int column() const { return static_cast<int>(pos_) + 1; }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool accept(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) {
      throw TermError(std::string("expected '") + c + "'" + found(), column());
    }
  }
  std::string ident() {
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
    }
    if (pos_ == start) throw TermError("expected identifier" + found(), column());
    return std::string(text_.substr(start, pos_ - start));
  }
  double number() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+' || c == 'e' ||
          c == 'E') {
        ++pos_;
      } else {
        break;
      }
    }
    const std::string token(text_.substr(start, pos_ - start));
    if (token.empty()) {
      pos_ = start;
      throw TermError("expected number" + found(), column());
    }
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size() || !std::isfinite(v)) {
      pos_ = start;
      throw TermError("malformed number '" + token + "'", column());
    }
    return v;
  }
  bool number_next() {
    const char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+';
  }

 private:
  std::string found() {
    skip_ws();
    if (pos_ >= text_.size()) return ", found end of input";
    return std::string(", found '") + text_[pos_] + "'";
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::vector<double> parse_list_body(TermLexer& lex) {
  std::vector<double> out;
  lex.expect('[');
  if (lex.accept(']')) return out;
  do {
    out.push_back(lex.number());
  } while (lex.accept(','));
  lex.expect(']');
  return out;
}

}  // namespace

const TermArg* Term::find(std::string_view key) const {
  for (const auto& a : args) {
    if (a.key == key) return &a;
  }
  return nullptr;
}

bool Term::has(std::string_view key) const { return find(key) != nullptr; }

double Term::number(std::string_view key) const {
  const auto* a = find(key);
  if (a == nullptr) {
    throw TermError(name + ": missing required argument '" + std::string(key) + "'", name_column);
  }
  if (const auto* v = std::get_if<double>(&a->value)) return *v;
  throw TermError(name + ": argument '" + a->key + "' must be a number", a->column);
}

double Term::number_or(std::string_view key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::string Term::ident_or(std::string_view key, std::string_view fallback) const {
  const auto* a = find(key);
  if (a == nullptr) return std::string(fallback);
  if (const auto* v = std::get_if<std::string>(&a->value)) return *v;
  throw TermError(name + ": argument '" + a->key + "' must be an identifier", a->column);
}

std::vector<double> Term::list(std::string_view key) const {
  const auto* a = find(key);
  if (a == nullptr) {
    throw TermError(name + ": missing required argument '" + std::string(key) + "'", name_column);
  }
  if (const auto* v = std::get_if<std::vector<double>>(&a->value)) return *v;
  if (const auto* v = std::get_if<double>(&a->value)) return {*v};
  throw TermError(name + ": argument '" + a->key + "' must be a list of numbers", a->column);
}

void Term::expect_keys(std::initializer_list<std::string_view> allowed) const {
  for (const auto& a : args) {
    bool ok = false;
    for (auto k : allowed) ok = ok || a.key == k;
    if (!ok) throw TermError(name + ": unknown argument '" + a.key + "'", a.column);
  }
}

Term parse_term(std::string_view text) {
  TermLexer lex(text);
  Term term;
  lex.skip_ws();
  term.name_column = lex.column();
  term.name = lex.ident();
  if (lex.accept('{')) {
    if (!lex.accept('}')) {
      do {
        TermArg arg;
        lex.skip_ws();
        arg.column = lex.column();
        arg.key = lex.ident();
        for (const auto& prev : term.args) {
          if (prev.key == arg.key) throw TermError("duplicate argument '" + arg.key + "'", arg.column);
        }
        lex.expect('=');
        if (lex.peek() == '[') {
          arg.value = parse_list_body(lex);
        } else if (lex.number_next()) {
          arg.value = lex.number();
        } else {
          arg.value = lex.ident();
        }
        term.args.push_back(std::move(arg));
      } while (lex.accept(','));
      lex.expect('}');
    }
  }
  if (!lex.at_end()) throw TermError("unexpected trailing text", lex.column());
  return term;
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_list(std::span<const double> values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_number(values[i]);
  }
  return out + "]";
}

std::vector<double> parse_number_list(std::string_view text) {
  std::string buf(text);
  std::size_t first = buf.find_first_not_of(" \t");
  if (first == std::string::npos || buf[first] != '[') buf = "[" + buf + "]";
  TermLexer lex(buf);
  auto out = parse_list_body(lex);
  if (!lex.at_end()) throw TermError("unexpected trailing text", lex.column());
  return out;
}

}  // namespace ruinlab
