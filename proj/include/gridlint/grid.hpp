#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "gridlint/vectors.hpp"
#include "gridlint/workbook.hpp"

namespace gridlint {

class Bitvector {
 public:
  Bitvector() = default;
  explicit Bitvector(size_t bits) : bits_(bits), words_((bits + 63) / 64, 0) {}

  size_t size() const { return bits_; }
  void set(size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  bool test(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }

  /// Popcount of the whole vector.
  std::int64_t count() const;
  /// Popcount of bits [begin, begin + len).
  std::int64_t count_range(size_t begin, size_t len) const;

  friend Bitvector operator&(const Bitvector& a, const Bitvector& b);
  std::span<const std::uint64_t> words() const { return words_; }

 private:
  size_t bits_ = 0;
  std::vector<std::uint64_t> words_;
};

using FingerprintId = std::uint32_t;

struct FingerprintCount {
  FingerprintId id = 0;
  std::int64_t count = 0;
  bool operator==(const FingerprintCount&) const = default;
};

/// One bitvector per distinct fingerprint over a sheet's used range. Bit index of
/// sheet cell (x, y) is (y - top) * width + (x - left), i.e. (y-1)*w + x-1 in
/// used-range-local 1-based coordinates.
class FingerprintGrid {
 public:
  /// `row_major` holds one fingerprint per cell of `extent`.
  FingerprintGrid(Rect extent, std::span<const Fingerprint> row_major);

  static FingerprintGrid from_ir(const SheetIR& ir);

  const Rect& extent() const { return extent_; }
  int width() const { return extent_.width(); }
  int height() const { return extent_.height(); }
  std::int64_t cell_count() const { return extent_.area(); }

  size_t fingerprint_count() const { return table_.size(); }
  const Fingerprint& fingerprint(FingerprintId id) const { return table_[id]; }
  const Bitvector& bits(FingerprintId id) const { return bits_[id]; }

  size_t bit_index(Position p) const {
    return static_cast<size_t>(p.row - extent_.top) * width() + (p.col - extent_.left);
  }
  FingerprintId id_at(Position p) const { return ids_[bit_index(p)]; }
  const std::vector<FingerprintId>& ids() const { return ids_; }

  /// Id for a fingerprint, if present on the sheet.
  std::optional<FingerprintId> find(const Fingerprint& f) const;

 private:
  Rect extent_;
  std::vector<Fingerprint> table_;  // ids in order of first row-major appearance
  std::unordered_map<Fingerprint, FingerprintId, FingerprintHash> lookup_;
  std::vector<Bitvector> bits_;
  std::vector<FingerprintId> ids_;
};

/// popcount(bits(id) AND mask) for one fingerprint. No bounds check.
std::int64_t masked_count(const FingerprintGrid& grid, FingerprintId id, const Rect& mask);

/// Bitvector with ones exactly inside `mask`.
Bitvector rect_mask(const FingerprintGrid& grid, const Rect& mask);

/// popcount(bits AND mask) per fingerprint, zero counts omitted, ascending id.
/// The AND is applied row span by row span, so no mask is materialized.
std::vector<FingerprintCount> masked_fingerprint_counts(const FingerprintGrid& grid, const Rect& mask);

/// Same, restricted to the listed fingerprint ids (which must be ascending).
std::vector<FingerprintCount> masked_fingerprint_counts(const FingerprintGrid& grid, const Rect& mask,
                                                        std::span<const FingerprintId> candidates);

}  // namespace gridlint
