#pragma once

// Generators and brute-force oracles shared by the unit tests, the acceptance
// runner and the benchmarks. Nothing here calls the bitvector kernels.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gridlint/entropy.hpp"
#include "gridlint/grid.hpp"
#include "gridlint/workbook.hpp"

namespace gridlint::testing {

using Rng = std::mt19937_64;

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

/// k distinct formula-like fingerprints; index 0 is the number fingerprint.
inline std::vector<Fingerprint> palette(int k) {
  std::vector<Fingerprint> out{kNumberFingerprint};
  for (int i = 1; i < k; ++i) out.push_back({-i, 0, 0, 0});
  return out;
}

inline FingerprintGrid make_grid(Rect extent, const std::vector<int>& labels, const std::vector<Fingerprint>& pal) {
  std::vector<Fingerprint> fps;
  for (int l : labels) fps.push_back(pal[l]);
  return FingerprintGrid(extent, fps);
}

/// Uniformly random labels, or blocky labels (rectangles painted over a base) when
/// `blocky` is set; blocky grids exercise coalescing much more.
inline FingerprintGrid random_grid(Rng& rng, int w, int h, int k, bool blocky) {
  std::vector<int> labels(static_cast<size_t>(w * h));
  if (!blocky) {
    for (int& l : labels) l = uniform(rng, 0, k - 1);
  } else {
    int base = uniform(rng, 0, k - 1);
    for (int& l : labels) l = base;
    int rects = uniform(rng, 1, 4);
    for (int r = 0; r < rects; ++r) {
      int x0 = uniform(rng, 0, w - 1), x1 = uniform(rng, x0, w - 1);
      int y0 = uniform(rng, 0, h - 1), y1 = uniform(rng, y0, h - 1);
      int lab = uniform(rng, 0, k - 1);
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) labels[y * w + x] = lab;
      }
    }
  }
  Rect ext{1, 1, w, h};
  return make_grid(ext, labels, palette(k));
}

/// Brute-force region homogeneity checks.
inline bool tiles_exactly(const std::vector<Rect>& rects, const Rect& extent) {
  std::map<Position, int> cover;
  for (const Rect& r : rects) {
    if (!r.valid() || !extent.contains(r)) return false;
    for (int y = r.top; y <= r.bottom; ++y) {
      for (int x = r.left; x <= r.right; ++x) ++cover[{x, y}];
    }
  }
  if (static_cast<std::int64_t>(cover.size()) != extent.area()) return false;
  for (const auto& [p, n] : cover) {
    if (n != 1) return false;
  }
  return true;
}

inline bool pure(const FingerprintGrid& g, const Region& r) {
  for (int y = r.rect.top; y <= r.rect.bottom; ++y) {
    for (int x = r.rect.left; x <= r.rect.right; ++x) {
      if (g.id_at({x, y}) != r.fingerprint) return false;
    }
  }
  return true;
}

/// -sum p log p / log n straight from the definition, over a per-cell label scan.
inline double oracle_entropy(const FingerprintGrid& g, const Rect& r) {
  std::map<FingerprintId, double> counts;
  for (int y = r.top; y <= r.bottom; ++y) {
    for (int x = r.left; x <= r.right; ++x) counts[g.id_at({x, y})] += 1;
  }
  double n = static_cast<double>(r.area());
  if (n <= 1 || counts.size() <= 1) return 0.0;
  double h = 0;
  for (auto [id, c] : counts) h -= c / n * std::log(c / n);
  return h / std::log(n);
}

inline double oracle_split(const FingerprintGrid& g, const Rect& r, int i, bool vertical) {
  Rect a = r, b = r;
  if (vertical) a.right = i, b.left = i + 1;
  else a.bottom = i, b.top = i + 1;
  return oracle_entropy(g, a) + oracle_entropy(g, b);
}

/// Smallest split entropy over every possible cut of `r`.
inline double oracle_min_split(const FingerprintGrid& g, const Rect& r) {
  double best = kInfiniteEntropy;
  for (int i = r.left; i < r.right; ++i) best = std::min(best, oracle_split(g, r, i, true));
  for (int i = r.top; i < r.bottom; ++i) best = std::min(best, oracle_split(g, r, i, false));
  return best;
}

/// One table: header row of text, label column of text, numeric block, a row-total
/// formula column and a column-total formula row. `inject` plants one inconsistency.
struct TableSpec {
  int data_cols = 3;
  int data_rows = 4;
  bool inject = false;
};

inline void put_table(Worksheet& ws, Rng& rng, int left, int top, const TableSpec& t) {
  const int first = left + 1, last = left + t.data_cols;
  const int total_col = last + 1;
  const int body_top = top + 1, body_bottom = top + t.data_rows;
  ws.put({left, top}, TextCell{"label"});
  for (int x = first; x <= total_col; ++x) ws.put({x, top}, TextCell{"h" + column_name(x)});
  for (int y = body_top; y <= body_bottom; ++y) {
    ws.put({left, y}, TextCell{"r" + std::to_string(y)});
    for (int x = first; x <= last; ++x) ws.put({x, y}, NumberCell{static_cast<double>(uniform(rng, 1, 99))});
  }
  int bad_row = t.inject ? uniform(rng, body_top, body_bottom) : -1;
  for (int y = body_top; y <= body_bottom; ++y) {
    int end = y == bad_row ? last - 1 : last;
    if (end < first) end = first;
    std::string f = "=SUM(" + format_a1({first, y}) + ":" + format_a1({end, y}) + ")";
    ws.put({total_col, y}, FormulaCell{f});
  }
  ws.put({left, body_bottom + 1}, TextCell{"total"});
  for (int x = first; x <= total_col; ++x) {
    std::string f = "=SUM(" + format_a1({x, body_top}) + ":" + format_a1({x, body_bottom}) + ")";
    ws.put({x, body_bottom + 1}, FormulaCell{f});
  }
}

/// Width and height a table occupies.
inline int table_width(const TableSpec& t) { return t.data_cols + 2; }
inline int table_height(const TableSpec& t) { return t.data_rows + 2; }

/// Tables laid out on a rows x cols grid with blank separator rows and columns, so
/// every separator is a full-width or full-height delimiter.
inline Workbook table_workbook(Rng& rng, int table_rows, int table_cols, int max_data = 6, double inject = 0.5,
                               const std::string& name = "synthetic") {
  Workbook wb(name);
  Worksheet& ws = wb.add_sheet("Sheet1");
  std::vector<int> widths(table_cols), heights(table_rows);
  for (int& w : widths) w = uniform(rng, 1, max_data);
  for (int& h : heights) h = uniform(rng, 2, max_data);
  int top = 1;
  for (int r = 0; r < table_rows; ++r) {
    int left = 1;
    for (int c = 0; c < table_cols; ++c) {
      TableSpec t{widths[c], heights[r], chance(rng, inject)};
      put_table(ws, rng, left, top, t);
      left += table_width(t) + uniform(rng, 1, 2);
    }
    top += heights[r] + 2 + uniform(rng, 1, 2);
  }
  return wb;
}

/// Random label grid cut by full-length delimiter rows and columns.
inline FingerprintGrid delimiter_grid(Rng& rng, int w, int h, int k) {
  std::vector<int> labels(static_cast<size_t>(w * h));
  for (int& l : labels) l = uniform(rng, 0, k - 1);
  // blocky content so trees have structure worth comparing
  int rects = uniform(rng, 2, 6);
  for (int r = 0; r < rects; ++r) {
    int x0 = uniform(rng, 0, w - 1), x1 = uniform(rng, x0, w - 1);
    int y0 = uniform(rng, 0, h - 1), y1 = uniform(rng, y0, h - 1);
    int lab = uniform(rng, 0, k - 1);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) labels[y * w + x] = lab;
    }
  }
  const int delim = k;  // distinct separator fingerprint
  int cols = uniform(rng, 1, 2), rows = uniform(rng, 0, 2);
  for (int i = 0; i < cols; ++i) {
    int x = uniform(rng, 0, w - 1);
    for (int y = 0; y < h; ++y) labels[y * w + x] = delim;
  }
  for (int i = 0; i < rows; ++i) {
    int y = uniform(rng, 0, h - 1);
    for (int x = 0; x < w; ++x) labels[y * w + x] = delim;
  }
  auto pal = palette(k);
  pal.push_back(kEmptyFingerprint);
  return make_grid({1, 1, w, h}, labels, pal);
}

}  // namespace gridlint::testing
