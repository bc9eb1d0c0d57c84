#pragma once

// Serial, allocation-heavy reference kernels. They share no counting code with the
// bitvector backend and exist so tests and benchmarks can compare against them.

#include <vector>

#include "gridlint/entropy.hpp"

namespace gridlint::reference {

/// Per-cell scan of the id grid; same contract as masked_fingerprint_counts.
std::vector<FingerprintCount> naive_fingerprint_counts(const FingerprintGrid& grid, const Rect& mask);

/// Split entropy from naive counts.
double naive_split_entropy(const FingerprintGrid& grid, const Rect& region, int i, bool vertical);

/// Entropy tree using naive counts and a single thread.
EntropyTree entropy_tree(const FingerprintGrid& grid, const Rect& region);

/// Whole-grid tree (no preprocessing) followed by coalescing.
RegionSet decompose(const FingerprintGrid& grid);

}  // namespace gridlint::reference
