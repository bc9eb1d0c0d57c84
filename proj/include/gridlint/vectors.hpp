#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridlint/formula.hpp"
#include "gridlint/workbook.hpp"

namespace gridlint {

/// Offset from a formula to one referent: (dx, dy, dz, dc).
struct ReferenceVector {
  int dx = 0;
  int dy = 0;
  int dz = 0;
  int dc = 0;

  auto operator<=>(const ReferenceVector&) const = default;
};

/// Componentwise sum of a cell's reference vectors.
struct Fingerprint {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t z = 0;
  std::int64_t c = 0;

  auto operator<=>(const Fingerprint&) const = default;
};

inline constexpr Fingerprint kNumberFingerprint{0, 0, 0, 1};
inline constexpr Fingerprint kTextFingerprint{0, 0, 0, -1};
inline constexpr Fingerprint kEmptyFingerprint{0, 0, 0, 0};

std::string to_string(const Fingerprint& f);

struct FingerprintHash {
  size_t operator()(const Fingerprint& f) const noexcept {
    size_t h = std::hash<std::int64_t>{}(f.x);
    for (auto v : {f.y, f.z, f.c}) h = h * 1000003u ^ std::hash<std::int64_t>{}(v);
    return h;
  }
};

/// Sum of absolute referent coordinates (column, row, off-sheet flag).
struct LocFingerprint {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t z = 0;

  auto operator<=>(const LocFingerprint&) const = default;
};

/// Kind used by the analysis. Formulas that fail to parse degrade to Text.
using EffectiveKind = CellKind;

/// A referent resolved to an absolute location.
struct Referent {
  int col = 1;
  int row = 1;
  bool off_sheet = false;
  std::string sheet;     // resolved sheet name (own sheet when unqualified)
  std::string workbook;  // resolved workbook name

  auto operator<=>(const Referent&) const = default;
};

struct CellIR {
  Position pos;
  EffectiveKind kind = EffectiveKind::Empty;
  std::vector<RawReference> refs;         // as extracted, duplicates kept
  std::vector<ReferenceVector> vectors;   // sorted, unique
  Fingerprint fingerprint;
  LocFingerprint location;
  int numeric_literals = 0;
};

struct Diagnostic {
  std::string sheet;
  Position pos;
  std::string message;
};

/// Vector IR of one worksheet, one entry per used-range cell in row-major order.
struct SheetIR {
  std::string workbook;
  std::string sheet;
  Rect used;
  std::vector<CellIR> cells;
  std::vector<Diagnostic> diagnostics;

  const CellIR& at(Position p) const {
    return cells[static_cast<size_t>(p.row - used.top) * used.width() + (p.col - used.left)];
  }
  std::int64_t cell_count() const { return static_cast<std::int64_t>(cells.size()); }
};

struct SheetContext {
  std::string workbook;
  std::string sheet;
};

/// Whether a raw reference leaves the formula's own sheet.
bool is_off_sheet(const RawReference& ref, const SheetContext& ctx);

/// Vectors for references made from `at`, as a sorted set.
std::vector<ReferenceVector> vectors_for(const std::vector<RawReference>& refs, Position at,
                                         const SheetContext& ctx);

/// Null vector set for a non-formula cell.
std::vector<ReferenceVector> null_vectors(CellKind kind);

Fingerprint sum_vectors(const std::vector<ReferenceVector>& vs, CellKind kind, int numeric_literals);

/// Resolved, de-duplicated referent set.
std::vector<Referent> resolve_referents(const std::vector<RawReference>& refs, const SheetContext& ctx);

LocFingerprint location_of(const std::vector<RawReference>& refs, const SheetContext& ctx);

/// Relative components shift by (to - from); absolute components stay put.
std::vector<RawReference> translate(const std::vector<RawReference>& refs, Position from, Position to);

/// Full IR for one cell. Parse failures become Text with a diagnostic appended.
CellIR analyze_cell(const Worksheet& sheet, Position p, const SheetContext& ctx,
                    std::vector<Diagnostic>* diagnostics = nullptr);

struct IrTimings {
  double parse_seconds = 0.0;
  double vector_seconds = 0.0;
};

SheetIR build_sheet_ir(const Workbook& wb, const Worksheet& sheet, int jobs = 1,
                       IrTimings* timings = nullptr);

// Workbook-level entry points.
std::vector<ReferenceVector> reference_vectors(const CellAddress& cell, const Workbook& wb);
Fingerprint fingerprint(const CellAddress& cell, const Workbook& wb);
LocFingerprint location_fingerprint(const CellAddress& cell, const Workbook& wb);

struct DependenceGraph {
  std::vector<CellAddress> vertices;
  std::vector<bool> boundary;  // referents outside every used range or workbook
  std::vector<std::pair<size_t, size_t>> edges;  // formula -> referent, sorted, unique
  std::vector<std::vector<CellAddress>> cycles;  // each sorted; empty when acyclic
  std::map<CellAddress, size_t> index;

  std::optional<size_t> index_of(const CellAddress& a) const;
  std::vector<size_t> successors(size_t v) const;
  bool acyclic() const { return cycles.empty(); }
};

DependenceGraph build_dependence_graph(const Workbook& wb);

}  // namespace gridlint
