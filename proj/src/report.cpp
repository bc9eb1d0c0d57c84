#include "gridlint/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "gridlint/errors.hpp"

namespace gridlint {

AdjacencyGraph build_adjacency_graph(const FingerprintGrid& grid) {
  AdjacencyGraph g;
  const size_t k = grid.fingerprint_count();
  g.clusters.resize(k);
  g.adjacent.resize(k);
  for (FingerprintId id = 0; id < k; ++id) {
    Cluster& c = g.clusters[id];
    c.fingerprint = id;
    const Fingerprint& f = grid.fingerprint(id);
    c.colorable = f != kTextFingerprint && f != kEmptyFingerprint;
  }
  const Rect ext = grid.extent();
  // ids are assigned by first row-major appearance, so the first hit is the anchor
  for (int y = ext.top; y <= ext.bottom; ++y) {
    for (int x = ext.left; x <= ext.right; ++x) {
      FingerprintId a = grid.id_at({x, y});
      if (g.clusters[a].size++ == 0) g.clusters[a].anchor = {x, y};
      if (x < ext.right) {
        FingerprintId b = grid.id_at({x + 1, y});
        if (a != b) g.adjacent[a].insert(b), g.adjacent[b].insert(a);
      }
      if (y < ext.bottom) {
        FingerprintId b = grid.id_at({x, y + 1});
        if (a != b) g.adjacent[a].insert(b), g.adjacent[b].insert(a);
      }
    }
  }
  return g;
}

bool HueInterval::contains(double hue) const {
  if (from <= to) return hue >= from && hue <= to;
  return hue >= from || hue <= to;
}

namespace {

double circular_distance(double a, double b) {
  double d = std::fmod(std::fabs(a - b), 360.0);
  return std::min(d, 360.0 - d);
}

}  // namespace

double next_hue(const std::vector<double>& used, const std::optional<HueInterval>& excluded) {
  auto blocked = [&](double h) { return excluded && excluded->contains(h); };
  if (used.empty() && !blocked(180.0)) return 180.0;
  for (int level = 1;; ++level) {
    const double step = 360.0 / static_cast<double>(1 << level);
    if (step < 1.0) break;
    double best = -1.0, best_dist = -1.0;
    for (int k = 0; k < (1 << level); ++k) {
      const double h = step * k;
      if (blocked(h)) continue;
      double dist = std::numeric_limits<double>::infinity();
      for (double u : used) dist = std::min(dist, circular_distance(h, u));
      if (dist < 1e-9) continue;
      if (dist > best_dist + 1e-9) best = h, best_dist = dist;
    }
    if (best >= 0.0) return best;
  }
  throw PaletteExhausted("no hue left at 1 degree spacing after " + std::to_string(used.size()) + " colors");
}

ColorAssignment assign_colors(const AdjacencyGraph& graph, const std::optional<HueInterval>& excluded) {
  const size_t n = graph.clusters.size();
  ColorAssignment out;
  out.colors.assign(n, std::nullopt);
  out.color_index.assign(n, -1);

  std::vector<size_t> order;
  for (size_t v = 0; v < n; ++v) {
    if (graph.clusters[v].colorable) order.push_back(v);
  }
  auto colorable_degree = [&](size_t v) {
    return std::count_if(graph.adjacent[v].begin(), graph.adjacent[v].end(),
                         [&](size_t u) { return graph.clusters[u].colorable; });
  };
  std::vector<std::ptrdiff_t> degree(n, 0);
  for (size_t v : order) degree[v] = colorable_degree(v);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (degree[a] != degree[b]) return degree[a] > degree[b];
    if (graph.clusters[a].size != graph.clusters[b].size) return graph.clusters[a].size > graph.clusters[b].size;
    return row_major_less(graph.clusters[a].anchor, graph.clusters[b].anchor);
  });

  for (size_t v : order) {
    std::vector<bool> taken;
    for (size_t u : graph.adjacent[v]) {
      int c = out.color_index[u];
      if (c < 0) continue;
      if (taken.size() <= static_cast<size_t>(c)) taken.resize(c + 1, false);
      taken[c] = true;
    }
    int c = 0;
    while (static_cast<size_t>(c) < taken.size() && taken[c]) ++c;
    while (out.palette.size() <= static_cast<size_t>(c)) out.palette.push_back(next_hue(out.palette, excluded));
    out.color_index[v] = c;
    out.colors[v] = Hsl{out.palette[c], 1.0, 0.5};
  }
  return out;
}

std::string css_color(const Hsl& c) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "hsl(%g, %g%%, %g%%)", c.hue, c.saturation * 100.0, c.luminosity * 100.0);
  return buf;
}

namespace {

std::string html_escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

constexpr int kCellW = 64;
constexpr int kCellH = 20;
constexpr int kHeader = 24;

}  // namespace

std::string render_global_view(const SheetView& view, const AdjacencyGraph& graph, const ColorAssignment& colors) {
  std::ostringstream os;
  const std::string title = html_escape(view.workbook) + " / " + html_escape(view.sheet);
  os << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>" << title << "</title>\n"
     << "<style>body{font-family:sans-serif}table{border-collapse:collapse}"
     << "td{border:1px solid #999;padding:2px 6px}.swatch{width:2em}</style>\n</head>\n<body>\n"
     << "<h1>" << title << "</h1>\n";
  if (view.grid == nullptr || view.grid->cell_count() == 0) {
    os << "<p>no regions</p>\n</body>\n</html>\n";
    return os.str();
  }
  const FingerprintGrid& g = *view.grid;
  const Rect ext = g.extent();
  const int w = kHeader + g.width() * kCellW;
  const int h = kHeader + g.height() * kCellH;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" font-size=\"11\">\n";
  for (int x = ext.left; x <= ext.right; ++x) {
    os << "<text x=\"" << kHeader + (x - ext.left) * kCellW + kCellW / 2 << "\" y=\"16\" text-anchor=\"middle\">"
       << column_name(x) << "</text>\n";
  }
  for (int y = ext.top; y <= ext.bottom; ++y) {
    os << "<text x=\"" << kHeader - 4 << "\" y=\"" << kHeader + (y - ext.top) * kCellH + 14
       << "\" text-anchor=\"end\">" << y << "</text>\n";
  }
  for (int y = ext.top; y <= ext.bottom; ++y) {
    for (int x = ext.left; x <= ext.right; ++x) {
      FingerprintId id = g.id_at({x, y});
      const auto& c = colors.colors[id];
      os << "<rect data-cell=\"" << format_a1({x, y}) << "\" x=\"" << kHeader + (x - ext.left) * kCellW
         << "\" y=\"" << kHeader + (y - ext.top) * kCellH << "\" width=\"" << kCellW << "\" height=\"" << kCellH
         << "\" fill=\"" << (c ? css_color(*c) : std::string("white")) << "\" stroke=\"#999\"/>\n";
    }
  }
  if (view.regions != nullptr) {
    for (const Region& r : *view.regions) {
      os << "<rect class=\"region\" x=\"" << kHeader + (r.rect.left - ext.left) * kCellW << "\" y=\""
         << kHeader + (r.rect.top - ext.top) * kCellH << "\" width=\"" << r.rect.width() * kCellW
         << "\" height=\"" << r.rect.height() * kCellH << "\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n";
    }
  }
  os << "</svg>\n<h2>Legend</h2>\n<table>\n<tr><th></th><th>fingerprint</th><th>cells</th><th>first cell</th></tr>\n";
  for (size_t v = 0; v < graph.clusters.size(); ++v) {
    const Cluster& cl = graph.clusters[v];
    const auto& c = colors.colors[v];
    os << "<tr><td class=\"swatch\" style=\"background:" << (c ? css_color(*c) : std::string("white"))
       << "\"></td><td>" << html_escape(to_string(g.fingerprint(cl.fingerprint))) << "</td><td>" << cl.size
       << "</td><td>" << format_a1(cl.anchor) << "</td></tr>\n";
  }
  os << "</table>\n</body>\n</html>\n";
  return os.str();
}

std::string render_audit_json(const std::string& workbook, const std::vector<SheetAudit>& sheets) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["workbook"] = workbook;
  doc["sheets"] = ordered_json::array();
  for (const SheetAudit& s : sheets) {
    ordered_json js;
    js["sheet"] = s.sheet;
    js["threshold"] = s.threshold;
    js["cells"] = s.cells;
    js["fixes"] = ordered_json::array();
    int rank = 1;
    for (const ProposedFix& f : s.fixes) {
      ordered_json jf;
      jf["rank"] = rank++;
      jf["score"] = f.score;
      jf["delta_entropy"] = f.delta_entropy;
      jf["distance"] = f.distance;
      ordered_json src = ordered_json::array();
      for (Position p : f.source) src.push_back(format_a1(p));
      jf["source"] = std::move(src);
      jf["target"] = format_rect(f.target);
      js["fixes"].push_back(std::move(jf));
    }
    if (s.fixes.empty()) {
      js["message"] = kNoErrorsMessage;
    } else {
      js["message"] = std::to_string(s.fixes.size()) + (s.fixes.size() == 1 ? " proposed fix" : " proposed fixes");
    }
    doc["sheets"].push_back(std::move(js));
  }
  return doc.dump(2) + "\n";
}

std::string render_audit_text(const std::string& workbook, const std::vector<SheetAudit>& sheets) {
  std::ostringstream os;
  os << "workbook " << workbook << "\n";
  for (const SheetAudit& s : sheets) {
    os << "\nsheet " << s.sheet << " (" << s.cells << " cells, threshold " << s.threshold << ")\n";
    if (s.fixes.empty()) {
      os << "  " << kNoErrorsMessage << "\n";
      continue;
    }
    int rank = 1;
    for (const ProposedFix& f : s.fixes) {
      os << "  " << rank++ << ". suspect ";
      for (size_t i = 0; i < f.source.size(); ++i) os << (i ? "," : "") << format_a1(f.source[i]);
      char buf[128];
      std::snprintf(buf, sizeof buf, "  score %.6g  delta %.6g  distance %.6g", f.score, f.delta_entropy,
                    f.distance);
      os << " -> match " << format_rect(f.target) << buf << "\n";
    }
  }
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw WriteError("cannot open for writing: " + path);
  out << content;
  out.flush();
  if (!out) throw WriteError("write failed: " + path);
}

}  // namespace gridlint
