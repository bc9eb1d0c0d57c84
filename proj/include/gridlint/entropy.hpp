#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "gridlint/grid.hpp"

namespace gridlint {

/// Value of normalized entropy for the empty set.
inline constexpr double kInfiniteEntropy = std::numeric_limits<double>::infinity();

/// Entropy values closer than this are treated as ties.
inline constexpr double kTieEpsilon = 1e-12;

/// eta = -sum p_i log p_i / log n, with p_i = counts_i / n. Zero for n <= 1 or a single
/// nonzero category; +inf for the empty set. Throws NegativeCount, and Error when the
/// counts do not sum to n.
double normalized_entropy(std::span<const std::int64_t> counts, std::int64_t n, double log_base = 2.0);

double normalized_entropy(std::span<const FingerprintCount> counts);

/// Sum of the normalized entropies of the two halves of `region` split after line `i`
/// (column when `vertical`, else row). Throws InvalidSplit.
double split_entropy(const FingerprintGrid& grid, const Rect& region, int i, bool vertical);

struct EntropyTree {
  struct Node {
    Rect rect;
    int left = -1;
    int right = -1;
    bool leaf() const { return left < 0; }
  };
  std::vector<Node> nodes;
  int root = -1;

  /// Leaf rectangles, left subtree first.
  std::vector<Rect> leaves() const;
};

struct SplitChoice {
  bool vertical = true;
  int index = 0;
  double entropy = kInfiniteEntropy;
};

/// Best split of an impure region: lowest entropy, smallest index on ties, vertical
/// over horizontal on ties. Split lines are scored in parallel when jobs > 1.
SplitChoice best_split(const FingerprintGrid& grid, const Rect& region, int jobs = 1);

EntropyTree entropy_tree(const FingerprintGrid& grid, const Rect& region, int jobs = 1);

struct Region {
  Rect rect;
  FingerprintId fingerprint = 0;
  auto operator<=>(const Region&) const = default;
};

/// Rectangles in row-major order of their top-left corners.
using RegionSet = std::vector<Region>;

/// Merge equal-fingerprint regions whose union is a rectangle until none remain.
/// The first mergeable pair in top-left order is merged at each step.
RegionSet coalesce(RegionSet regions);

struct Piece {
  Rect rect;
  bool delimiter = false;
  bool operator==(const Piece&) const = default;
};

/// Cuts the grid at every full-height column and full-width row whose cells share a
/// single fingerprint. Delimiter runs of one fingerprint become one strip piece.
std::vector<Piece> delimiter_splits(const FingerprintGrid& grid);

struct DecomposeOptions {
  bool preprocess = true;
  int jobs = 1;
};

/// Leaves of the entropy tree(s) as regions, before coalescing.
RegionSet leaf_regions(const FingerprintGrid& grid, const DecomposeOptions& options = {});

/// Full decomposition: optional delimiter preprocessing, entropy trees, coalescing.
RegionSet decompose(const FingerprintGrid& grid, const DecomposeOptions& options = {});

/// Normalized entropy of a layout, with regions as categories.
double layout_entropy(const RegionSet& regions, std::int64_t total_cells);

}  // namespace gridlint
