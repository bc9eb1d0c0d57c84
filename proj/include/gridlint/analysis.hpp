#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gridlint/entropy.hpp"
#include "gridlint/fixes.hpp"
#include "gridlint/grid.hpp"
#include "gridlint/report.hpp"
#include "gridlint/vectors.hpp"
#include "gridlint/workbook.hpp"

namespace gridlint {

enum class OutputFormat { Json, Text };

struct AnalysisConfig {
  double threshold = kDefaultThreshold;
  bool preprocess = true;
  int jobs = 1;
  OutputFormat format = OutputFormat::Json;
};

/// Throws DomainError unless 0 < threshold <= 1 and jobs >= 1.
void validate(const AnalysisConfig& config);

struct PhaseTimings {
  double parse = 0.0;
  double vectors = 0.0;
  double decomposition = 0.0;
  double ranking = 0.0;

  PhaseTimings& operator+=(const PhaseTimings& o);
};

struct SheetAnalysis {
  std::string sheet;
  SheetIR ir;
  std::optional<FingerprintGrid> grid;  // absent for a sheet without cells
  RegionSet regions;
  std::vector<ProposedFix> fixes;
  PhaseTimings timings;

  std::int64_t cells() const { return grid ? grid->cell_count() : 0; }
};

struct WorkbookAnalysis {
  std::string workbook;
  AnalysisConfig config;
  std::vector<SheetAnalysis> sheets;
  std::vector<Diagnostic> diagnostics;  // parse failures and reference cycles
  PhaseTimings timings;

  std::vector<SheetAudit> audits() const;
};

SheetAnalysis analyze_sheet(const Workbook& wb, const Worksheet& sheet, const AnalysisConfig& config);

/// Full pipeline over every sheet. Sheets run one after another; `config.jobs`
/// applies inside each phase.
WorkbookAnalysis analyze(const Workbook& wb, const AnalysisConfig& config);

/// Audit report for the analysis in the configured format.
std::string render_report(const WorkbookAnalysis& a);

/// Global-view HTML for one analyzed sheet.
std::string render_sheet_view(const std::string& workbook, const SheetAnalysis& s);

}  // namespace gridlint
