#include "gridlint/formula.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>

#include "gridlint/workbook.hpp"

namespace gridlint {

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ", ";
    out += parts[i];
  }
  return out;
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '$';
}

bool is_plain_sheet_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

// Matches $?LETTERS$?DIGITS exactly.
std::optional<RefCorner> match_corner(std::string_view w) {
  RefCorner c;
  size_t i = 0;
  if (i < w.size() && w[i] == '$') {
    c.col_absolute = true;
    ++i;
  }
  size_t letters_begin = i;
  while (i < w.size() && std::isalpha(static_cast<unsigned char>(w[i]))) ++i;
  if (i == letters_begin) return std::nullopt;
  auto col = parse_column(w.substr(letters_begin, i - letters_begin));
  if (!col) return std::nullopt;
  c.col = *col;
  if (i < w.size() && w[i] == '$') {
    c.row_absolute = true;
    ++i;
  }
  size_t digits_begin = i;
  std::int64_t row = 0;
  while (i < w.size() && std::isdigit(static_cast<unsigned char>(w[i]))) {
    row = row * 10 + (w[i] - '0');
    if (row > 1'000'000'000) return std::nullopt;
    ++i;
  }
  if (i == digits_begin || i != w.size() || row < 1) return std::nullopt;
  c.row = static_cast<int>(row);
  return c;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  FormulaAst parse() {
    skip_ws();
    if (!eat('=')) fail({"'='"});
    Expr e = comparison();
    skip_ws();
    if (pos_ != src_.size()) fail({"operator", "end of input"});
    return FormulaAst{std::move(e)};
  }

 private:
  [[noreturn]] void fail(std::vector<std::string> expected) const {
    throw ParseError(pos_, std::move(expected));
  }

  void skip_ws() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                                  src_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool peek(char c) const { return pos_ < src_.size() && src_[pos_] == c; }

  bool eat(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }

  bool eat(std::string_view s) {
    if (src_.substr(pos_, s.size()) != s) return false;
    pos_ += s.size();
    return true;
  }

  static Expr binary(std::string op, Expr lhs, Expr rhs) {
    Expr e;
    e.kind = Expr::Kind::BinaryOp;
    e.text = std::move(op);
    e.span = {lhs.span.begin, rhs.span.end};
    e.args.push_back(std::move(lhs));
    e.args.push_back(std::move(rhs));
    return e;
  }

  Expr comparison() {
    Expr lhs = concat();
    for (;;) {
      skip_ws();
      std::string op;
      if (eat("<>")) op = "<>";
      else if (eat("<=")) op = "<=";
      else if (eat(">=")) op = ">=";
      else if (eat('<')) op = "<";
      else if (eat('>')) op = ">";
      else if (eat('=')) op = "=";
      else return lhs;
      lhs = binary(op, std::move(lhs), concat());
    }
  }

  Expr concat() {
    Expr lhs = additive();
    for (;;) {
      skip_ws();
      if (!eat('&')) return lhs;
      lhs = binary("&", std::move(lhs), additive());
    }
  }

  Expr additive() {
    Expr lhs = term();
    for (;;) {
      skip_ws();
      std::string op;
      if (eat('+')) op = "+";
      else if (eat('-')) op = "-";
      else return lhs;
      lhs = binary(op, std::move(lhs), term());
    }
  }

  Expr term() {
    Expr lhs = power();
    for (;;) {
      skip_ws();
      std::string op;
      if (eat('*')) op = "*";
      else if (eat('/')) op = "/";
      else return lhs;
      lhs = binary(op, std::move(lhs), power());
    }
  }

  // Right-associative; operands are unary expressions (unary binds tightest).
  Expr power() {
    Expr base = unary();
    skip_ws();
    if (!eat('^')) return base;
    return binary("^", std::move(base), power());
  }

  Expr unary() {
    skip_ws();
    size_t start = pos_;
    if (peek('+') || peek('-')) {
      Expr e;
      e.kind = Expr::Kind::UnaryOp;
      e.text = std::string(1, src_[pos_++]);
      Expr operand = unary();
      e.span = {start, operand.span.end};
      e.args.push_back(std::move(operand));
      return e;
    }
    Expr e = primary();
    for (;;) {
      skip_ws();
      if (!peek('%')) return e;
      ++pos_;
      Expr pct;
      pct.kind = Expr::Kind::UnaryOp;
      pct.text = "%";
      pct.span = {e.span.begin, pos_};
      pct.args.push_back(std::move(e));
      e = std::move(pct);
    }
  }

  Expr primary() {
    skip_ws();
    if (pos_ >= src_.size()) {
      fail({"number", "string", "reference", "function call", "'('"});
    }
    char c = src_[pos_];
    size_t start = pos_;
    if (c == '(') {
      ++pos_;
      Expr inner = comparison();
      skip_ws();
      if (!eat(')')) fail({"')'"});
      Expr e;
      e.kind = Expr::Kind::Paren;
      e.span = {start, pos_};
      e.args.push_back(std::move(inner));
      return e;
    }
    if (c == '"') return string_literal();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number_literal();
    if (c == '\'') {
      RefQualifier q = quoted_qualifier();
      return reference(q, start);
    }
    if (c == '[') {
      RefQualifier q;
      q.workbook = bracket_workbook();
      size_t sheet_begin = pos_;
      while (pos_ < src_.size() && is_plain_sheet_char(src_[pos_])) ++pos_;
      if (pos_ == sheet_begin) fail({"sheet name"});
      q.sheet = std::string(src_.substr(sheet_begin, pos_ - sheet_begin));
      if (!eat('!')) fail({"'!'"});
      return reference(q, start);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      size_t word_begin = pos_;
      while (pos_ < src_.size() && is_word_char(src_[pos_])) ++pos_;
      std::string_view word = src_.substr(word_begin, pos_ - word_begin);
      bool has_dollar = word.find('$') != std::string_view::npos;
      if (peek('!') && !has_dollar) {
        ++pos_;
        RefQualifier q;
        q.sheet = std::string(word);
        return reference(q, start);
      }
      if (peek('(') && !has_dollar) return call(word, start);
      if (auto corner = match_corner(word)) return finish_reference({}, *corner, start);
      if (iequals(word, "TRUE") || iequals(word, "FALSE")) {
        Expr e;
        e.kind = Expr::Kind::NumberLit;
        e.text = upper(word);
        e.number = iequals(word, "TRUE") ? 1.0 : 0.0;
        e.span = {start, pos_};
        return e;
      }
      pos_ = word_begin;
      fail({"reference", "function call"});
    }
    fail({"number", "string", "reference", "function call", "'('"});
  }

  Expr string_literal() {
    size_t start = pos_;
    ++pos_;
    std::string value;
    for (;;) {
      if (pos_ >= src_.size()) fail({"'\"'"});
      char c = src_[pos_++];
      if (c == '"') {
        if (peek('"')) {
          value += '"';
          ++pos_;
          continue;
        }
        break;
      }
      value += c;
    }
    Expr e;
    e.kind = Expr::Kind::StringLit;
    e.text = std::move(value);
    e.span = {start, pos_};
    return e;
  }

  Expr number_literal() {
    size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (peek('.')) {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    if (pos_ - start == 1 && src_[start] == '.') {
      pos_ = start;
      fail({"number"});
    }
    if (peek('e') || peek('E')) {
      size_t save = pos_;
      ++pos_;
      if (peek('+') || peek('-')) ++pos_;
      size_t digits = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (pos_ == digits) pos_ = save;
    }
    Expr e;
    e.kind = Expr::Kind::NumberLit;
    e.text = std::string(src_.substr(start, pos_ - start));
    e.number = std::strtod(e.text.c_str(), nullptr);
    e.span = {start, pos_};
    return e;
  }

  std::string bracket_workbook() {
    ++pos_;  // '['
    size_t begin = pos_;
    while (pos_ < src_.size() && src_[pos_] != ']') ++pos_;
    if (pos_ >= src_.size() || pos_ == begin) fail({"']'"});
    std::string wb(src_.substr(begin, pos_ - begin));
    ++pos_;
    return wb;
  }

  RefQualifier quoted_qualifier() {
    ++pos_;  // opening quote
    std::string name;
    for (;;) {
      if (pos_ >= src_.size()) fail({"'"});
      char c = src_[pos_++];
      if (c == '\'') {
        if (peek('\'')) {
          name += '\'';
          ++pos_;
          continue;
        }
        break;
      }
      name += c;
    }
    if (!eat('!')) fail({"'!'"});
    RefQualifier q;
    if (!name.empty() && name[0] == '[') {
      auto close = name.find(']');
      if (close == std::string::npos || close == 1) fail({"']'"});
      q.workbook = name.substr(1, close - 1);
      name = name.substr(close + 1);
    }
    if (name.empty()) fail({"sheet name"});
    q.sheet = std::move(name);
    return q;
  }

  RefCorner corner() {
    size_t begin = pos_;
    while (pos_ < src_.size() && is_word_char(src_[pos_]) && src_[pos_] != '.') ++pos_;
    auto c = match_corner(src_.substr(begin, pos_ - begin));
    if (!c) {
      pos_ = begin;
      fail({"cell reference"});
    }
    return *c;
  }

  Expr reference(RefQualifier q, size_t start) { return finish_reference(std::move(q), corner(), start); }

  Expr finish_reference(RefQualifier q, RefCorner first, size_t start) {
    Expr e;
    e.qualifier = std::move(q);
    e.from = first;
    if (peek(':')) {
      ++pos_;
      e.kind = Expr::Kind::RangeRef;
      e.to = corner();
    } else {
      e.kind = Expr::Kind::CellRef;
    }
    e.span = {start, pos_};
    return e;
  }

  Expr call(std::string_view name, size_t start) {
    Expr e;
    e.kind = Expr::Kind::FunctionCall;
    e.text = upper(name);
    ++pos_;  // '('
    skip_ws();
    if (!eat(')')) {
      for (;;) {
        e.args.push_back(comparison());
        skip_ws();
        if (eat(',')) continue;
        if (eat(')')) break;
        fail({"','", "')'"});
      }
    }
    e.span = {start, pos_};
    return e;
  }

  std::string_view src_;
  size_t pos_ = 0;
};

bool needs_quotes(const std::string& sheet) {
  if (sheet.empty() || std::isdigit(static_cast<unsigned char>(sheet[0]))) return true;
  return !std::all_of(sheet.begin(), sheet.end(), is_plain_sheet_char);
}

std::string quote(const std::string& s, char q) {
  std::string out(1, q);
  for (char c : s) {
    out += c;
    if (c == q) out += q;
  }
  out += q;
  return out;
}

std::string corner_text(const RefCorner& c) {
  return (c.col_absolute ? "$" : "") + column_name(c.col) + (c.row_absolute ? "$" : "") +
         std::to_string(c.row);
}

std::string qualifier_text(const RefQualifier& q) {
  if (!q.sheet) return "";
  if (q.workbook) {
    if (needs_quotes(*q.sheet)) return quote("[" + *q.workbook + "]" + *q.sheet, '\'') + "!";
    return "[" + *q.workbook + "]" + *q.sheet + "!";
  }
  return (needs_quotes(*q.sheet) ? quote(*q.sheet, '\'') : *q.sheet) + "!";
}

void print(const Expr& e, std::string& out) {
  switch (e.kind) {
    case Expr::Kind::FunctionCall:
      out += e.text;
      out += '(';
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ',';
        print(e.args[i], out);
      }
      out += ')';
      break;
    case Expr::Kind::BinaryOp:
      print(e.args[0], out);
      out += e.text;
      print(e.args[1], out);
      break;
    case Expr::Kind::UnaryOp:
      if (e.text == "%") {
        print(e.args[0], out);
        out += '%';
      } else {
        out += e.text;
        print(e.args[0], out);
      }
      break;
    case Expr::Kind::NumberLit:
      out += e.text;
      break;
    case Expr::Kind::StringLit:
      out += quote(e.text, '"');
      break;
    case Expr::Kind::CellRef:
      out += qualifier_text(e.qualifier) + corner_text(e.from);
      break;
    case Expr::Kind::RangeRef:
      out += qualifier_text(e.qualifier) + corner_text(e.from) + ":" + corner_text(e.to);
      break;
    case Expr::Kind::Paren:
      out += '(';
      print(e.args[0], out);
      out += ')';
      break;
  }
}

void collect_refs(const Expr& e, std::int64_t max_cells, std::vector<RawReference>& out) {
  auto make = [&](int col, bool ca, int row, bool ra) {
    return RawReference{col, ca, row, ra, e.qualifier.sheet, e.qualifier.workbook};
  };
  switch (e.kind) {
    case Expr::Kind::CellRef:
      out.push_back(make(e.from.col, e.from.col_absolute, e.from.row, e.from.row_absolute));
      return;
    case Expr::Kind::RangeRef: {
      int c0 = std::min(e.from.col, e.to.col), c1 = std::max(e.from.col, e.to.col);
      int r0 = std::min(e.from.row, e.to.row), r1 = std::max(e.from.row, e.to.row);
      std::int64_t cells = std::int64_t{c1 - c0 + 1} * (r1 - r0 + 1);
      if (cells > max_cells) {
        throw RangeTooLarge("range expands to " + std::to_string(cells) + " cells (limit " +
                            std::to_string(max_cells) + ")");
      }
      // A component is absolute for the expanded cells only when both corners agree.
      bool col_abs = e.from.col_absolute && e.to.col_absolute;
      bool row_abs = e.from.row_absolute && e.to.row_absolute;
      for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) out.push_back(make(c, col_abs, r, row_abs));
      }
      return;
    }
    default:
      for (const auto& a : e.args) collect_refs(a, max_cells, out);
  }
}

void count_constants(const Expr& e, ConstantCount& cc) {
  if (e.kind == Expr::Kind::NumberLit) ++cc.numbers;
  if (e.kind == Expr::Kind::StringLit) ++cc.strings;
  for (const auto& a : e.args) count_constants(a, cc);
}

}  // namespace

ParseError::ParseError(size_t position, std::vector<std::string> expected)
    : Error("parse error at " + std::to_string(position) + ": expected " + join(expected)),
      position_(position),
      expected_(std::move(expected)) {}

bool same_structure(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.text != b.text || a.qualifier != b.qualifier) return false;
  if (a.kind == Expr::Kind::NumberLit && a.number != b.number) return false;
  if ((a.kind == Expr::Kind::CellRef || a.kind == Expr::Kind::RangeRef) && a.from != b.from) return false;
  if (a.kind == Expr::Kind::RangeRef && a.to != b.to) return false;
  if (a.args.size() != b.args.size()) return false;
  for (size_t i = 0; i < a.args.size(); ++i) {
    if (!same_structure(a.args[i], b.args[i])) return false;
  }
  return true;
}

FormulaAst parse_formula(std::string_view text) { return Parser(text).parse(); }

std::string to_formula_string(const FormulaAst& ast) {
  std::string out = "=";
  print(ast.root, out);
  return out;
}

std::vector<RawReference> references(const FormulaAst& ast, std::int64_t max_range_cells) {
  std::vector<RawReference> out;
  collect_refs(ast.root, max_range_cells, out);
  return out;
}

ConstantCount constant_count(const FormulaAst& ast) {
  ConstantCount cc;
  count_constants(ast.root, cc);
  return cc;
}

}  // namespace gridlint
