#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gridlint/vectors.hpp"
#include "gridlint/workbook.hpp"

namespace gridlint {

/// Two mutually inconsistent formula sets; which one is wrong is unknowable.
struct BugDual {
  std::set<Position> c1;
  std::set<Position> c2;
};

/// Annotations for one sheet.
struct GroundTruth {
  std::set<Position> errors;
  std::vector<BugDual> duals;
  std::set<Position> not_bugs;

  /// Error cells outside every dual count once; each dual counts min(|c1|, |c2|).
  std::int64_t error_count() const;
};

struct Annotations {
  std::string workbook;
  std::map<std::string, GroundTruth> sheets;  // keyed by sheet name as written
  const GroundTruth* find(std::string_view sheet) const;
};

/// Parses the annotation JSON. Cells may be "F6" or ranges such as "F7:F11".
/// Throws FormatError (including when a dual breaks its invariants).
Annotations parse_annotations(std::string_view json_text);
Annotations load_annotations(const std::filesystem::path& path);

/// Flagged cells read back from an audit report.
struct FlaggedSheet {
  std::string sheet;
  std::int64_t cells = 0;
  std::set<Position> flagged;
};

struct AuditSummary {
  std::string workbook;
  std::vector<FlaggedSheet> sheets;
};

AuditSummary parse_audit_report(std::string_view json_text);
AuditSummary load_audit_report(const std::filesystem::path& path);

/// Dual-free error flags count 1; a dual credits min(flags in c1 or c2, smaller side).
std::int64_t count_true_positives(const std::set<Position>& flagged, const GroundTruth& truth);

struct PrecisionRecall {
  double precision = 1.0;
  double recall = 1.0;
};

/// Precision is 1 when nothing is flagged and 0 when flags land on a sheet with no
/// errors; recall is 1 when there is nothing to find.
PrecisionRecall precision_recall(std::int64_t tp, std::int64_t fp, std::int64_t fn, std::int64_t flagged,
                                 std::int64_t truth_error_count);

/// Mean of the hypergeometric distribution: n * r / m. Throws DomainError.
double expected_random_tp(std::int64_t m, std::int64_t r, std::int64_t n);

/// (tp - expected) / flagged, clamped to [0, 1]; 1 when nothing is flagged.
double adjusted_precision(std::int64_t tp, std::int64_t fp, std::int64_t flagged, double expected);

struct EvalResult {
  std::string workbook;
  std::int64_t cells = 0;
  std::int64_t flagged = 0;
  std::int64_t truth_errors = 0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  double precision = 1.0;
  double recall = 1.0;
  double expected_random_tp = 0.0;
  double adjusted_precision = 1.0;
};

/// Scores one audit report against the annotations of the same workbook.
/// Throws FormatError when the workbook names differ.
EvalResult evaluate(const AuditSummary& report, const Annotations& truth);

std::string eval_result_json(const EvalResult& r);

struct RectangularityStats {
  std::int64_t clusters = 0;  // numeric data and formula clusters
  std::int64_t rectangular = 0;
  std::int64_t formula_clusters = 0;
  std::int64_t formula_rectangular = 0;

  double fraction() const;
  /// Absent when there are no formula clusters.
  std::optional<double> formula_fraction() const;
};

/// Clusters are maximal edge-connected sets of one fingerprint; a cluster is
/// rectangular when its size equals its bounding-box area. Empty and text
/// clusters are not counted.
RectangularityStats rectangularity_stats(const std::vector<SheetIR>& sheets);

/// Fraction of formula pairs in the workbook sharing a fingerprint while having
/// different reference-vector sets. Zero with fewer than two formulas.
double collision_rate(const std::vector<SheetIR>& sheets);

}  // namespace gridlint
