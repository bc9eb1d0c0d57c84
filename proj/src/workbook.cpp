#include "gridlint/workbook.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "gridlint/errors.hpp"
#include "json.hpp"

namespace gridlint {

using nlohmann::json;

Rect bounding_union(const Rect& a, const Rect& b) {
  return {std::min(a.left, b.left), std::min(a.top, b.top), std::max(a.right, b.right),
          std::max(a.bottom, b.bottom)};
}

CellKind kind_of(const CellContent& c) {
  return static_cast<CellKind>(c.index());
}

const char* to_string(CellKind k) {
  switch (k) {
    case CellKind::Empty: return "empty";
    case CellKind::Number: return "number";
    case CellKind::Text: return "text";
    case CellKind::Formula: return "formula";
  }
  return "?";
}

void Worksheet::put(Position p, CellContent content) {
  if (p.col < 1 || p.row < 1) throw OutOfRange("cell address out of range: " + format_a1(p));
  if (std::holds_alternative<EmptyCell>(content)) return;
  if (auto* f = std::get_if<FormulaCell>(&content); f && (f->text.empty() || f->text[0] != '=')) {
    throw FormatError("formula must begin with '=': " + format_a1(p));
  }
  auto [it, inserted] = cells_.emplace(p, std::move(content));
  if (!inserted) throw DuplicateCell(name_ + "!" + format_a1(p));
  Rect cell{p.col, p.row, p.col, p.row};
  bounds_ = bounds_ ? bounding_union(*bounds_, cell) : cell;
}

const CellContent& Worksheet::at(Position p) const {
  static const CellContent kEmpty = EmptyCell{};
  auto it = cells_.find(p);
  return it == cells_.end() ? kEmpty : it->second;
}

Rect Worksheet::used_range() const {
  if (!bounds_) throw EmptySheet(name_);
  return *bounds_;
}

Worksheet& Workbook::add_sheet(std::string name) {
  if (find_sheet(name)) throw FormatError("duplicate sheet name: " + name);
  return sheets_.emplace_back(std::move(name));
}

const Worksheet* Workbook::find_sheet(std::string_view name) const {
  for (const auto& s : sheets_) {
    if (iequals(s.name(), name)) return &s;
  }
  return nullptr;
}

Rect used_range(const Worksheet& sheet) { return sheet.used_range(); }

CellKind cell_kind(const Worksheet& sheet, Position p) {
  if (sheet.empty() || !sheet.used_range().contains(p)) {
    throw OutOfRange("address outside used range: " + format_a1(p));
  }
  return kind_of(sheet.at(p));
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
           return std::toupper(x) == std::toupper(y);
         });
}

std::string column_name(int col) {
  std::string out;
  while (col > 0) {
    int rem = (col - 1) % 26;
    out.insert(out.begin(), static_cast<char>('A' + rem));
    col = (col - 1) / 26;
  }
  return out;
}

std::optional<int> parse_column(std::string_view letters) {
  if (letters.empty()) return std::nullopt;
  std::int64_t col = 0;
  for (char ch : letters) {
    if (!std::isalpha(static_cast<unsigned char>(ch))) return std::nullopt;
    col = col * 26 + (std::toupper(static_cast<unsigned char>(ch)) - 'A' + 1);
    if (col > 1'000'000'000) return std::nullopt;
  }
  return static_cast<int>(col);
}

std::optional<Position> parse_a1(std::string_view text) {
  size_t i = 0;
  while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]))) ++i;
  if (i == 0 || i == text.size()) return std::nullopt;
  auto col = parse_column(text.substr(0, i));
  if (!col) return std::nullopt;
  std::int64_t row = 0;
  for (size_t j = i; j < text.size(); ++j) {
    if (!std::isdigit(static_cast<unsigned char>(text[j]))) return std::nullopt;
    row = row * 10 + (text[j] - '0');
    if (row > 1'000'000'000) return std::nullopt;
  }
  if (row < 1) return std::nullopt;
  return Position{*col, static_cast<int>(row)};
}

std::string format_a1(Position p) { return column_name(p.col) + std::to_string(p.row); }

std::string format_rect(const Rect& r) {
  std::string a = format_a1({r.left, r.top});
  if (r.left == r.right && r.top == r.bottom) return a;
  return a + ":" + format_a1({r.right, r.bottom});
}

std::optional<Rect> parse_rect(std::string_view text) {
  auto colon = text.find(':');
  auto a = parse_a1(text.substr(0, colon));
  if (!a) return std::nullopt;
  Position b = *a;
  if (colon != std::string_view::npos) {
    auto pb = parse_a1(text.substr(colon + 1));
    if (!pb) return std::nullopt;
    b = *pb;
  }
  return Rect{std::min(a->col, b.col), std::min(a->row, b.row), std::max(a->col, b.col),
              std::max(a->row, b.row)};
}

namespace {

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

// Rejects duplicate object keys, which nlohmann would otherwise silently collapse.
// Keys inside a "cells" object raise DuplicateCell; anywhere else FormatError.
json parse_strict(std::string_view text) {
  std::vector<std::set<std::string>> keys;
  std::vector<bool> is_cells;
  std::string last_key;
  json::parser_callback_t cb = [&](int, json::parse_event_t ev, json& parsed) {
    switch (ev) {
      case json::parse_event_t::object_start:
        keys.emplace_back();
        is_cells.push_back(last_key == "cells");
        last_key.clear();
        break;
      case json::parse_event_t::object_end:
        keys.pop_back();
        is_cells.pop_back();
        break;
      case json::parse_event_t::array_start:
        last_key.clear();
        break;
      case json::parse_event_t::key: {
        auto k = parsed.get<std::string>();
        if (!keys.back().insert(k).second) {
          if (is_cells.back()) throw DuplicateCell(k);
          throw FormatError("duplicate key \"" + k + "\"");
        }
        last_key = k;
        break;
      }
      default:
        break;
    }
    return true;
  };
  try {
    return json::parse(text.begin(), text.end(), cb);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what());
  }
}

CellContent parse_cell(const json& j, const std::string& where) {
  if (!j.is_object() || j.size() != 1) {
    throw FormatError(where + ": expected an object with exactly one of f/n/s");
  }
  const auto& [key, value] = *j.items().begin();
  if (key == "f") {
    if (!value.is_string()) throw FormatError(where + ".f: expected string");
    auto text = value.get<std::string>();
    if (text.empty() || text[0] != '=') throw FormatError(where + ".f: formula must begin with '='");
    return FormulaCell{std::move(text)};
  }
  if (key == "n") {
    if (value.is_boolean()) return NumberCell{value.get<bool>() ? 1.0 : 0.0};
    if (value.is_number()) return NumberCell{value.get<double>()};
    throw FormatError(where + ".n: expected number");
  }
  if (key == "s") {
    if (!value.is_string()) throw FormatError(where + ".s: expected string");
    auto text = value.get<std::string>();
    if (is_blank(text)) return EmptyCell{};
    return TextCell{std::move(text)};
  }
  throw FormatError(where + ": unknown key \"" + key + "\"");
}

}  // namespace

Workbook parse_workbook(std::string_view json_text) {
  json root = parse_strict(json_text);
  if (!root.is_object()) throw FormatError("top level: expected object");
  if (!root.contains("workbook") || !root["workbook"].is_string()) {
    throw FormatError("workbook: expected string");
  }
  if (!root.contains("sheets") || !root["sheets"].is_array()) {
    throw FormatError("sheets: expected array");
  }
  Workbook wb(root["workbook"].get<std::string>());
  const auto& sheets = root["sheets"];
  for (size_t si = 0; si < sheets.size(); ++si) {
    const auto& js = sheets[si];
    std::string where = "sheets[" + std::to_string(si) + "]";
    if (!js.is_object() || !js.contains("name") || !js["name"].is_string()) {
      throw FormatError(where + ".name: expected string");
    }
    Worksheet& ws = wb.add_sheet(js["name"].get<std::string>());
    if (!js.contains("cells")) continue;
    if (!js["cells"].is_object()) throw FormatError(where + ".cells: expected object");
    for (const auto& [addr, cell] : js["cells"].items()) {
      auto pos = parse_a1(addr);
      if (!pos) throw FormatError(where + ".cells: bad address \"" + addr + "\"");
      std::string cell_where = where + ".cells." + addr;
      CellContent content = parse_cell(cell, cell_where);
      if (ws.cells().count(*pos)) throw DuplicateCell(ws.name() + "!" + format_a1(*pos));
      ws.put(*pos, std::move(content));
    }
  }
  return wb;
}

Workbook load_workbook(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound(path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_workbook(buf.str());
}

std::string serialize_workbook(const Workbook& wb) {
  nlohmann::ordered_json root;
  root["workbook"] = wb.name();
  root["sheets"] = nlohmann::ordered_json::array();
  for (const auto& ws : wb.sheets()) {
    nlohmann::ordered_json js;
    js["name"] = ws.name();
    js["cells"] = nlohmann::ordered_json::object();
    std::vector<Position> order;
    for (const auto& [p, _] : ws.cells()) order.push_back(p);
    std::sort(order.begin(), order.end(), row_major_less);
    for (Position p : order) {
      const auto& c = ws.at(p);
      nlohmann::ordered_json jc;
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, NumberCell>) jc["n"] = v.value;
            if constexpr (std::is_same_v<T, TextCell>) jc["s"] = v.value;
            if constexpr (std::is_same_v<T, FormulaCell>) jc["f"] = v.text;
          },
          c);
      js["cells"][format_a1(p)] = std::move(jc);
    }
    root["sheets"].push_back(std::move(js));
  }
  return root.dump(1) + "\n";
}

}  // namespace gridlint
