#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gridlint {

/// Column/row pair, both 1-based.
struct Position {
  int col = 1;
  int row = 1;

  auto operator<=>(const Position&) const = default;
};

/// Row-major ordering (top row first, then leftmost column).
inline bool row_major_less(Position a, Position b) {
  return a.row != b.row ? a.row < b.row : a.col < b.col;
}

/// Fully qualified cell address.
struct CellAddress {
  int col = 1;
  int row = 1;
  std::string sheet;
  std::string workbook;

  Position position() const { return {col, row}; }
  auto operator<=>(const CellAddress&) const = default;
};

/// Inclusive rectangle in sheet coordinates.
struct Rect {
  int left = 1;
  int top = 1;
  int right = 1;
  int bottom = 1;

  int width() const { return right - left + 1; }
  int height() const { return bottom - top + 1; }
  std::int64_t area() const { return static_cast<std::int64_t>(width()) * height(); }
  bool contains(Position p) const {
    return p.col >= left && p.col <= right && p.row >= top && p.row <= bottom;
  }
  bool contains(const Rect& r) const {
    return r.left >= left && r.right <= right && r.top >= top && r.bottom <= bottom;
  }
  bool valid() const { return left >= 1 && top >= 1 && left <= right && top <= bottom; }

  auto operator<=>(const Rect&) const = default;
};

/// Smallest rectangle covering both.
Rect bounding_union(const Rect& a, const Rect& b);

struct EmptyCell {
  bool operator==(const EmptyCell&) const = default;
};
struct NumberCell {
  double value = 0.0;
  bool operator==(const NumberCell&) const = default;
};
struct TextCell {
  std::string value;
  bool operator==(const TextCell&) const = default;
};
struct FormulaCell {
  std::string text;  // begins with '='
  bool operator==(const FormulaCell&) const = default;
};

using CellContent = std::variant<EmptyCell, NumberCell, TextCell, FormulaCell>;

enum class CellKind { Empty, Number, Text, Formula };

CellKind kind_of(const CellContent& c);
const char* to_string(CellKind k);

class Worksheet {
 public:
  explicit Worksheet(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }

  /// Stores a cell. Empty content is not stored. Throws DuplicateCell.
  void put(Position p, CellContent content);

  const std::map<Position, CellContent>& cells() const { return cells_; }
  bool empty() const { return cells_.empty(); }

  /// Stored content, or EmptyCell for unstored addresses.
  const CellContent& at(Position p) const;

  /// Bounding rectangle of stored (non-empty) cells. Throws EmptySheet.
  Rect used_range() const;

  int width() const { return empty() ? 0 : used_range().width(); }
  int height() const { return empty() ? 0 : used_range().height(); }

  bool operator==(const Worksheet&) const = default;

 private:
  std::string name_;
  std::map<Position, CellContent> cells_;
  std::optional<Rect> bounds_;
};

class Workbook {
 public:
  explicit Workbook(std::string name = {}) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  std::vector<Worksheet>& sheets() { return sheets_; }
  const std::vector<Worksheet>& sheets() const { return sheets_; }

  Worksheet& add_sheet(std::string name);

  /// Case-insensitive lookup, as spreadsheet sheet names are.
  const Worksheet* find_sheet(std::string_view name) const;

  bool operator==(const Workbook&) const = default;

 private:
  std::string name_;
  std::vector<Worksheet> sheets_;
};

Rect used_range(const Worksheet& sheet);

/// Kind at an address inside the used range. Throws OutOfRange.
CellKind cell_kind(const Worksheet& sheet, Position p);

// A1-style address helpers. Columns are bijective base-26.
std::string column_name(int col);
std::optional<int> parse_column(std::string_view letters);
std::optional<Position> parse_a1(std::string_view text);
std::string format_a1(Position p);
/// "F7:F11", or "F6" for a single cell.
std::string format_rect(const Rect& r);
std::optional<Rect> parse_rect(std::string_view text);

bool iequals(std::string_view a, std::string_view b);

// Canonical workbook format (JSON).
Workbook parse_workbook(std::string_view json_text);
Workbook load_workbook(const std::filesystem::path& path);
std::string serialize_workbook(const Workbook& wb);

}  // namespace gridlint
