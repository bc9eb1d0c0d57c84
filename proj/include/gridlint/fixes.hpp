#pragma once

#include <cstdint>
#include <vector>

#include "gridlint/entropy.hpp"
#include "gridlint/grid.hpp"
#include "gridlint/vectors.hpp"

namespace gridlint {

/// Replace the fingerprints of `source` cells with the fingerprint of `target`.
struct ProposedFix {
  std::vector<Position> source;  // row-major
  size_t source_region = 0;      // region the source cells currently belong to
  size_t target_region = 0;
  Rect target;
  std::int64_t target_size = 0;
  double delta_entropy = 0.0;
  double distance = 0.0;
  double score = 0.0;
  bool borrowed = false;  // single cell carved from a larger region
};

enum class Rejection {
  None,
  NotRectangular,     // C1
  NotFormula,         // C2
  AggregateOfTarget,  // C3
};

const char* to_string(Rejection r);

struct Admissibility {
  bool ok = false;
  Rejection reason = Rejection::None;
};

/// Read-only view of one analyzed sheet that the fix engine works against.
class FixContext {
 public:
  FixContext(const SheetIR& ir, const FingerprintGrid& grid, const RegionSet& regions);

  const SheetIR& ir() const { return ir_; }
  const FingerprintGrid& grid() const { return grid_; }
  const RegionSet& regions() const { return regions_; }
  std::int64_t total_cells() const { return grid_.cell_count(); }

  size_t region_of(Position p) const { return region_of_[grid_.bit_index(p)]; }
  /// Regions sharing an edge with region r, ascending.
  const std::vector<size_t>& neighbors(size_t r) const { return neighbors_[r]; }
  bool all_formula(size_t r) const { return all_formula_[r]; }
  double baseline_entropy() const { return baseline_; }

 private:
  const SheetIR& ir_;
  const FingerprintGrid& grid_;
  const RegionSet& regions_;
  std::vector<size_t> region_of_;
  std::vector<std::vector<size_t>> neighbors_;
  std::vector<bool> all_formula_;
  double baseline_ = 0.0;
};

/// All (adjacent region, target) pairs plus single boundary cells borrowed toward each
/// adjacent target. Pairs whose fingerprints already match are skipped.
std::vector<ProposedFix> candidate_fixes(const FixContext& ctx);

/// Checks C1 (rectangular result), C3 (aggregate over its own inputs), C2 (formulas
/// on both sides), reporting the first failure in that order.
Admissibility admissible(const ProposedFix& fix, const FixContext& ctx);

/// eta(after) - eta(before) over the region-size multiset of the sheet. Regions touched
/// by the fix are re-coalesced together with their immediate neighbours.
double entropy_delta(const ProposedFix& fix, const FixContext& ctx);

/// Sum over source cells of the Euclidean distance between the cell's location
/// fingerprint and the one it would have carrying the target's references, translated
/// from the target's top-left cell.
double fix_distance(const ProposedFix& fix, const FixContext& ctx);

/// n_t / (-delta * max(d, 1)). Throws NonNegativeDelta when delta >= 0.
double impact_score(const ProposedFix& fix);
double impact_score(std::int64_t target_size, double delta_entropy, double distance);

inline constexpr double kDefaultThreshold = 0.05;

/// Cells a user is asked to inspect: ceil(threshold * cells).
std::int64_t inspection_budget(double threshold, std::int64_t cells);

/// Sorts by score (descending), keeps the best fix per source region, then emits fixes
/// while the cumulative flagged-cell count stays within the budget.
std::vector<ProposedFix> rank_and_cut(std::vector<ProposedFix> fixes, double threshold, std::int64_t sheet_cells);

/// Candidates, admissibility, scoring (fixes with delta < 0 only), ranking.
std::vector<ProposedFix> propose_fixes(const FixContext& ctx, double threshold, int jobs = 1);

}  // namespace gridlint
