#include "gridlint/vectors.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include <omp.h>

namespace gridlint {

std::string to_string(const Fingerprint& f) {
  return "(" + std::to_string(f.x) + "," + std::to_string(f.y) + "," + std::to_string(f.z) + "," +
         std::to_string(f.c) + ")";
}

bool is_off_sheet(const RawReference& ref, const SheetContext& ctx) {
  if (ref.workbook && !iequals(*ref.workbook, ctx.workbook)) return true;
  if (ref.sheet && !iequals(*ref.sheet, ctx.sheet)) return true;
  return false;
}

std::vector<ReferenceVector> vectors_for(const std::vector<RawReference>& refs, Position at,
                                         const SheetContext& ctx) {
  std::vector<ReferenceVector> out;
  out.reserve(refs.size());
  for (const auto& r : refs) {
    ReferenceVector v;
    if (is_off_sheet(r, ctx)) {
      // The other sheet's geometry is unrelated to ours: offsets from its origin.
      v.dx = r.col - 1;
      v.dy = r.row - 1;
      v.dz = 1;
    } else {
      v.dx = r.col_absolute ? r.col - 1 : r.col - at.col;
      v.dy = r.row_absolute ? r.row - 1 : r.row - at.row;
    }
    out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<ReferenceVector> null_vectors(CellKind kind) {
  switch (kind) {
    case CellKind::Number: return {{0, 0, 0, 1}};
    case CellKind::Text: return {{0, 0, 0, -1}};
    default: return {{0, 0, 0, 0}};
  }
}

Fingerprint sum_vectors(const std::vector<ReferenceVector>& vs, CellKind kind, int numeric_literals) {
  Fingerprint f;
  for (const auto& v : vs) {
    f.x += v.dx;
    f.y += v.dy;
    f.z += v.dz;
    f.c += v.dc;
  }
  if (kind == CellKind::Formula && numeric_literals > 0) f.c = 1;
  if (kind == CellKind::Text) f.c = -1;
  return f;
}

std::vector<Referent> resolve_referents(const std::vector<RawReference>& refs, const SheetContext& ctx) {
  std::vector<Referent> out;
  out.reserve(refs.size());
  for (const auto& r : refs) {
    Referent t;
    t.col = r.col;
    t.row = r.row;
    t.off_sheet = is_off_sheet(r, ctx);
    t.workbook = r.workbook && !iequals(*r.workbook, ctx.workbook) ? *r.workbook : ctx.workbook;
    t.sheet = r.sheet && !iequals(*r.sheet, ctx.sheet) ? *r.sheet : ctx.sheet;
    out.push_back(std::move(t));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

LocFingerprint location_of(const std::vector<RawReference>& refs, const SheetContext& ctx) {
  LocFingerprint loc;
  for (const auto& t : resolve_referents(refs, ctx)) {
    loc.x += t.col;
    loc.y += t.row;
    loc.z += t.off_sheet ? 1 : 0;
  }
  return loc;
}

std::vector<RawReference> translate(const std::vector<RawReference>& refs, Position from, Position to) {
  std::vector<RawReference> out = refs;
  for (auto& r : out) {
    if (!r.col_absolute) r.col += to.col - from.col;
    if (!r.row_absolute) r.row += to.row - from.row;
  }
  return out;
}

namespace {

struct Parsed {
  CellKind kind = CellKind::Empty;
  std::vector<RawReference> refs;
  int numeric_literals = 0;
  std::string error;
};

Parsed parse_cell(const CellContent& content) {
  Parsed p;
  p.kind = kind_of(content);
  if (p.kind != CellKind::Formula) return p;
  try {
    auto ast = parse_formula(std::get<FormulaCell>(content).text);
    p.refs = references(ast);
    p.numeric_literals = constant_count(ast).numbers;
  } catch (const Error& e) {
    p.kind = CellKind::Text;
    p.refs.clear();
    p.error = e.what();
  }
  return p;
}

CellIR finish_cell(Position pos, Parsed&& parsed, const SheetContext& ctx) {
  CellIR ir;
  ir.pos = pos;
  ir.kind = parsed.kind;
  ir.numeric_literals = parsed.numeric_literals;
  if (ir.kind == CellKind::Formula) {
    ir.vectors = vectors_for(parsed.refs, pos, ctx);
    ir.location = location_of(parsed.refs, ctx);
  } else {
    ir.vectors = null_vectors(ir.kind);
  }
  ir.fingerprint = sum_vectors(ir.vectors, ir.kind, ir.numeric_literals);
  ir.refs = std::move(parsed.refs);
  return ir;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

CellIR analyze_cell(const Worksheet& sheet, Position p, const SheetContext& ctx,
                    std::vector<Diagnostic>* diagnostics) {
  Parsed parsed = parse_cell(sheet.at(p));
  if (!parsed.error.empty() && diagnostics) {
    diagnostics->push_back({ctx.sheet, p, "formula treated as text: " + parsed.error});
  }
  return finish_cell(p, std::move(parsed), ctx);
}

SheetIR build_sheet_ir(const Workbook& wb, const Worksheet& sheet, int jobs, IrTimings* timings) {
  SheetIR ir;
  ir.workbook = wb.name();
  ir.sheet = sheet.name();
  ir.used = sheet.used_range();
  SheetContext ctx{wb.name(), sheet.name()};
  const Rect u = ir.used;
  const std::int64_t n = u.area();
  const int w = u.width();
  auto pos_of = [&](std::int64_t i) {
    return Position{u.left + static_cast<int>(i % w), u.top + static_cast<int>(i / w)};
  };

  auto t0 = std::chrono::steady_clock::now();
  std::vector<Parsed> parsed(static_cast<size_t>(n));
#pragma omp parallel for schedule(dynamic, 256) num_threads(std::max(1, jobs))
  for (std::int64_t i = 0; i < n; ++i) parsed[i] = parse_cell(sheet.at(pos_of(i)));
  if (timings) timings->parse_seconds = seconds_since(t0);

  for (std::int64_t i = 0; i < n; ++i) {
    if (!parsed[i].error.empty()) {
      ir.diagnostics.push_back({sheet.name(), pos_of(i), "formula treated as text: " + parsed[i].error});
    }
  }

  t0 = std::chrono::steady_clock::now();
  ir.cells.resize(static_cast<size_t>(n));
#pragma omp parallel for schedule(dynamic, 256) num_threads(std::max(1, jobs))
  for (std::int64_t i = 0; i < n; ++i) ir.cells[i] = finish_cell(pos_of(i), std::move(parsed[i]), ctx);
  if (timings) timings->vector_seconds = seconds_since(t0);
  return ir;
}

namespace {

CellIR cell_ir(const CellAddress& cell, const Workbook& wb) {
  const Worksheet* ws = wb.find_sheet(cell.sheet);
  if (!ws) throw OutOfRange("no such sheet: " + cell.sheet);
  Position p = cell.position();
  if (ws->empty() || !ws->used_range().contains(p)) {
    throw OutOfRange("address outside used range: " + format_a1(p));
  }
  return analyze_cell(*ws, p, SheetContext{wb.name(), ws->name()});
}

}  // namespace

std::vector<ReferenceVector> reference_vectors(const CellAddress& cell, const Workbook& wb) {
  return cell_ir(cell, wb).vectors;
}

Fingerprint fingerprint(const CellAddress& cell, const Workbook& wb) { return cell_ir(cell, wb).fingerprint; }

LocFingerprint location_fingerprint(const CellAddress& cell, const Workbook& wb) {
  return cell_ir(cell, wb).location;
}

std::optional<size_t> DependenceGraph::index_of(const CellAddress& a) const {
  auto it = index.find(a);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::vector<size_t> DependenceGraph::successors(size_t v) const {
  std::vector<size_t> out;
  auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(v, size_t{0}));
  for (; it != edges.end() && it->first == v; ++it) out.push_back(it->second);
  return out;
}

namespace {

// Iterative Tarjan SCC restricted to `active` vertices.
std::vector<std::vector<size_t>> strongly_connected(const std::vector<std::vector<size_t>>& adj,
                                                    const std::vector<bool>& active) {
  const size_t n = adj.size();
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<size_t> stack;
  std::vector<std::vector<size_t>> out;
  int counter = 0;
  for (size_t root = 0; root < n; ++root) {
    if (!active[root] || index[root] >= 0) continue;
    std::vector<std::pair<size_t, size_t>> work{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!work.empty()) {
      auto& [v, next] = work.back();
      if (next < adj[v].size()) {
        size_t w = adj[v][next++];
        if (!active[w]) continue;
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          work.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      size_t done = v;
      work.pop_back();
      if (!work.empty()) low[work.back().first] = std::min(low[work.back().first], low[done]);
      if (low[done] == index[done]) {
        std::vector<size_t> comp;
        size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != done);
        bool self_loop = std::find(adj[done].begin(), adj[done].end(), done) != adj[done].end();
        if (comp.size() > 1 || self_loop) out.push_back(std::move(comp));
      }
    }
  }
  return out;
}

}  // namespace

DependenceGraph build_dependence_graph(const Workbook& wb) {
  DependenceGraph g;
  auto add_vertex = [&](const CellAddress& a, bool boundary) {
    auto [it, inserted] = g.index.emplace(a, g.vertices.size());
    if (inserted) {
      g.vertices.push_back(a);
      g.boundary.push_back(boundary);
    }
    return it->second;
  };

  std::vector<SheetIR> irs;
  for (const auto& ws : wb.sheets()) {
    if (ws.empty()) continue;
    irs.push_back(build_sheet_ir(wb, ws));
    for (const auto& c : irs.back().cells) {
      add_vertex({c.pos.col, c.pos.row, ws.name(), wb.name()}, false);
    }
  }
  std::vector<bool> is_formula(g.vertices.size(), false);
  std::set<std::pair<size_t, size_t>> edges;
  for (const auto& ir : irs) {
    SheetContext ctx{ir.workbook, ir.sheet};
    for (const auto& c : ir.cells) {
      if (c.kind != CellKind::Formula) continue;
      size_t from = *g.index_of({c.pos.col, c.pos.row, ir.sheet, ir.workbook});
      is_formula[from] = true;
      for (const auto& t : resolve_referents(c.refs, ctx)) {
        CellAddress target{t.col, t.row, t.sheet, t.workbook};
        bool inside = false;
        if (iequals(t.workbook, wb.name())) {
          if (const Worksheet* ws = wb.find_sheet(t.sheet); ws && !ws->empty() &&
                                                           ws->used_range().contains(Position{t.col, t.row})) {
            target.sheet = ws->name();
            target.workbook = wb.name();
            inside = true;
          }
        }
        edges.emplace(from, inside ? *g.index_of(target) : add_vertex(target, true));
      }
    }
  }
  g.edges.assign(edges.begin(), edges.end());
  is_formula.resize(g.vertices.size(), false);

  std::vector<std::vector<size_t>> adj(g.vertices.size());
  for (auto [a, b] : g.edges) adj[a].push_back(b);
  for (auto& comp : strongly_connected(adj, is_formula)) {
    std::vector<CellAddress> cells;
    for (size_t v : comp) cells.push_back(g.vertices[v]);
    std::sort(cells.begin(), cells.end());
    g.cycles.push_back(std::move(cells));
  }
  std::sort(g.cycles.begin(), g.cycles.end());
  return g;
}

}  // namespace gridlint
