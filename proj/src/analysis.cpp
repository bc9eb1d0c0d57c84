#include "gridlint/analysis.hpp"

#include <chrono>

#include "gridlint/errors.hpp"

namespace gridlint {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

void validate(const AnalysisConfig& config) {
  if (!(config.threshold > 0.0 && config.threshold <= 1.0)) {
    throw DomainError("threshold must be in (0, 1], got " + std::to_string(config.threshold));
  }
  if (config.jobs < 1) throw DomainError("jobs must be at least 1");
}

PhaseTimings& PhaseTimings::operator+=(const PhaseTimings& o) {
  parse += o.parse;
  vectors += o.vectors;
  decomposition += o.decomposition;
  ranking += o.ranking;
  return *this;
}

std::vector<SheetAudit> WorkbookAnalysis::audits() const {
  std::vector<SheetAudit> out;
  for (const SheetAnalysis& s : sheets) out.push_back({s.sheet, config.threshold, s.cells(), s.fixes});
  return out;
}

SheetAnalysis analyze_sheet(const Workbook& wb, const Worksheet& sheet, const AnalysisConfig& config) {
  SheetAnalysis s;
  s.sheet = sheet.name();
  s.ir.workbook = wb.name();
  s.ir.sheet = sheet.name();
  if (sheet.empty()) return s;

  IrTimings irt;
  s.ir = build_sheet_ir(wb, sheet, config.jobs, &irt);
  s.timings.parse = irt.parse_seconds;
  s.timings.vectors = irt.vector_seconds;

  auto t0 = std::chrono::steady_clock::now();
  s.grid.emplace(FingerprintGrid::from_ir(s.ir));
  s.regions = decompose(*s.grid, {config.preprocess, config.jobs});
  s.timings.decomposition = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  FixContext ctx(s.ir, *s.grid, s.regions);
  s.fixes = propose_fixes(ctx, config.threshold, config.jobs);
  s.timings.ranking = seconds_since(t0);
  return s;
}

WorkbookAnalysis analyze(const Workbook& wb, const AnalysisConfig& config) {
  validate(config);
  WorkbookAnalysis a;
  a.workbook = wb.name();
  a.config = config;
  for (const Worksheet& ws : wb.sheets()) {
    a.sheets.push_back(analyze_sheet(wb, ws, config));
    a.timings += a.sheets.back().timings;
    const auto& d = a.sheets.back().ir.diagnostics;
    a.diagnostics.insert(a.diagnostics.end(), d.begin(), d.end());
  }
  DependenceGraph g = build_dependence_graph(wb);
  for (const auto& cycle : g.cycles) {
    std::string members;
    for (const CellAddress& c : cycle) {
      if (!members.empty()) members += ", ";
      members += c.sheet + "!" + format_a1(c.position());
    }
    a.diagnostics.push_back({cycle.front().sheet, cycle.front().position(), "reference cycle: " + members});
  }
  return a;
}

std::string render_report(const WorkbookAnalysis& a) {
  if (a.config.format == OutputFormat::Text) return render_audit_text(a.workbook, a.audits());
  return render_audit_json(a.workbook, a.audits());
}

std::string render_sheet_view(const std::string& workbook, const SheetAnalysis& s) {
  SheetView view{workbook, s.sheet, s.grid ? &*s.grid : nullptr, &s.regions};
  if (!s.grid) return render_global_view(view, {}, {});
  AdjacencyGraph graph = build_adjacency_graph(*s.grid);
  return render_global_view(view, graph, assign_colors(graph));
}

}  // namespace gridlint
