#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridlint/errors.hpp"

namespace gridlint {

/// One corner of an A1-style reference, as written.
struct RefCorner {
  int col = 1;
  bool col_absolute = false;
  int row = 1;
  bool row_absolute = false;

  bool operator==(const RefCorner&) const = default;
};

struct RefQualifier {
  std::optional<std::string> workbook;
  std::optional<std::string> sheet;

  bool operator==(const RefQualifier&) const = default;
};

struct SourceSpan {
  size_t begin = 0;
  size_t end = 0;
};

struct Expr {
  enum class Kind { FunctionCall, BinaryOp, UnaryOp, NumberLit, StringLit, CellRef, RangeRef, Paren };

  Kind kind = Kind::NumberLit;
  // FunctionCall: upper-cased name. BinaryOp/UnaryOp: operator ("%" is the postfix
  // percent). NumberLit: literal source text. StringLit: unescaped value.
  std::string text;
  double number = 0.0;
  RefQualifier qualifier;
  RefCorner from;  // CellRef, RangeRef
  RefCorner to;    // RangeRef
  std::vector<Expr> args;
  SourceSpan span;
};

/// Structural equality, ignoring source spans.
bool same_structure(const Expr& a, const Expr& b);

struct FormulaAst {
  Expr root;
};

/// A single referenced cell after range expansion. Relative components hold the
/// coordinate as written; resolution against the formula position happens later.
struct RawReference {
  int col = 1;
  bool col_absolute = false;
  int row = 1;
  bool row_absolute = false;
  std::optional<std::string> sheet;
  std::optional<std::string> workbook;

  bool operator==(const RawReference&) const = default;
};

class ParseError : public Error {
 public:
  ParseError(size_t position, std::vector<std::string> expected);
  size_t position() const { return position_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  size_t position_;
  std::vector<std::string> expected_;
};

FormulaAst parse_formula(std::string_view text);

/// Prints an AST back to formula text (with leading '=').
std::string to_formula_string(const FormulaAst& ast);

inline constexpr std::int64_t kDefaultMaxRangeCells = std::int64_t{1} << 20;

/// Every referenced cell in source order, ranges expanded row-major, duplicates kept.
std::vector<RawReference> references(const FormulaAst& ast,
                                     std::int64_t max_range_cells = kDefaultMaxRangeCells);

struct ConstantCount {
  int numbers = 0;
  int strings = 0;
  bool operator==(const ConstantCount&) const = default;
};

ConstantCount constant_count(const FormulaAst& ast);

}  // namespace gridlint
