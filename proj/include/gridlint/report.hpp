#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gridlint/entropy.hpp"
#include "gridlint/fixes.hpp"
#include "gridlint/grid.hpp"

namespace gridlint {

/// One vertex per fingerprint on the sheet; cells need not be contiguous.
struct Cluster {
  FingerprintId fingerprint = 0;
  std::int64_t size = 0;
  Position anchor;  // first cell in row-major order
  bool colorable = true;  // false for text and empty clusters
};

struct AdjacencyGraph {
  std::vector<Cluster> clusters;
  std::vector<std::set<size_t>> adjacent;

  size_t degree(size_t v) const { return adjacent[v].size(); }
};

AdjacencyGraph build_adjacency_graph(const FingerprintGrid& grid);

struct Hsl {
  double hue = 0.0;
  double saturation = 1.0;
  double luminosity = 0.5;
  bool operator==(const Hsl&) const = default;
};

/// Inclusive hue window on the circle; may wrap through 0.
struct HueInterval {
  double from = 345.0;
  double to = 15.0;
  bool contains(double hue) const;
};

inline constexpr HueInterval kBrightRed{345.0, 15.0};

/// First call (no used hues) returns 180. Afterwards candidates are the points of the
/// halving lattice on the hue circle, coarsest spacing first; at the first spacing that
/// offers a free, non-excluded hue, the one farthest from every used hue wins (smallest
/// degree on ties). Throws PaletteExhausted below 1 degree spacing.
double next_hue(const std::vector<double>& used, const std::optional<HueInterval>& excluded = kBrightRed);

struct ColorAssignment {
  std::vector<std::optional<Hsl>> colors;  // per cluster; nullopt = uncolored
  std::vector<int> color_index;            // -1 when uncolored
  std::vector<double> palette;             // hue per color index
};

/// Greedy coloring in largest-degree order (ties: larger cluster, then top-left anchor).
ColorAssignment assign_colors(const AdjacencyGraph& graph,
                              const std::optional<HueInterval>& excluded = kBrightRed);

std::string css_color(const Hsl& c);

struct SheetView {
  std::string workbook;
  std::string sheet;
  const FingerprintGrid* grid = nullptr;  // null for an empty sheet
  const RegionSet* regions = nullptr;
};

/// Self-contained HTML page with an inline SVG of the sheet's colored clusters.
std::string render_global_view(const SheetView& view, const AdjacencyGraph& graph, const ColorAssignment& colors);

/// Audit report for one sheet in the JSON schema, as a string.
struct SheetAudit {
  std::string sheet;
  double threshold = kDefaultThreshold;
  std::int64_t cells = 0;
  std::vector<ProposedFix> fixes;
};

inline constexpr const char* kNoErrorsMessage = "no errors found";

std::string render_audit_json(const std::string& workbook, const std::vector<SheetAudit>& sheets);
std::string render_audit_text(const std::string& workbook, const std::vector<SheetAudit>& sheets);

/// Writes `content` to `path`. Throws WriteError.
void write_file(const std::string& path, const std::string& content);

}  // namespace gridlint
