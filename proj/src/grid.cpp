#include "gridlint/grid.hpp"

#include <bit>

#include "gridlint/errors.hpp"

namespace gridlint {

std::int64_t Bitvector::count() const {
  std::int64_t n = 0;
  for (auto w : words_) n += std::popcount(w);
  return n;
}

std::int64_t Bitvector::count_range(size_t begin, size_t len) const {
  if (len == 0) return 0;
  size_t end = begin + len;  // exclusive
  size_t w0 = begin >> 6, w1 = (end - 1) >> 6;
  std::uint64_t first = ~std::uint64_t{0} << (begin & 63);
  std::uint64_t last = ~std::uint64_t{0} >> (63 - ((end - 1) & 63));
  if (w0 == w1) return std::popcount(words_[w0] & first & last);
  std::int64_t n = std::popcount(words_[w0] & first) + std::popcount(words_[w1] & last);
  for (size_t w = w0 + 1; w < w1; ++w) n += std::popcount(words_[w]);
  return n;
}

Bitvector operator&(const Bitvector& a, const Bitvector& b) {
  Bitvector out(a.bits_);
  for (size_t i = 0; i < out.words_.size(); ++i) out.words_[i] = a.words_[i] & b.words_[i];
  return out;
}

FingerprintGrid::FingerprintGrid(Rect extent, std::span<const Fingerprint> row_major) : extent_(extent) {
  const auto n = static_cast<size_t>(extent.area());
  if (row_major.size() != n) throw Error("fingerprint grid: cell count mismatch");
  ids_.resize(n);
  for (size_t i = 0; i < n; ++i) {
    auto [it, inserted] = lookup_.emplace(row_major[i], static_cast<FingerprintId>(table_.size()));
    if (inserted) {
      table_.push_back(row_major[i]);
      bits_.emplace_back(n);
    }
    ids_[i] = it->second;
    bits_[it->second].set(i);
  }
}

FingerprintGrid FingerprintGrid::from_ir(const SheetIR& ir) {
  std::vector<Fingerprint> fps;
  fps.reserve(ir.cells.size());
  for (const auto& c : ir.cells) fps.push_back(c.fingerprint);
  return FingerprintGrid(ir.used, fps);
}

std::optional<FingerprintId> FingerprintGrid::find(const Fingerprint& f) const {
  auto it = lookup_.find(f);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

Bitvector rect_mask(const FingerprintGrid& grid, const Rect& mask) {
  Bitvector bv(static_cast<size_t>(grid.cell_count()));
  for (int y = mask.top; y <= mask.bottom; ++y) {
    for (int x = mask.left; x <= mask.right; ++x) bv.set(grid.bit_index({x, y}));
  }
  return bv;
}

std::int64_t masked_count(const FingerprintGrid& grid, FingerprintId id, const Rect& mask) {
  const Bitvector& bv = grid.bits(id);
  std::int64_t n = 0;
  const size_t len = static_cast<size_t>(mask.width());
  for (int y = mask.top; y <= mask.bottom; ++y) n += bv.count_range(grid.bit_index({mask.left, y}), len);
  return n;
}

namespace {

void check_mask(const FingerprintGrid& grid, const Rect& mask) {
  if (!mask.valid() || !grid.extent().contains(mask)) throw OutOfRange("mask outside grid: " + format_rect(mask));
}

}  // namespace

std::vector<FingerprintCount> masked_fingerprint_counts(const FingerprintGrid& grid, const Rect& mask) {
  check_mask(grid, mask);
  std::vector<FingerprintCount> out;
  for (FingerprintId id = 0; id < grid.fingerprint_count(); ++id) {
    if (auto n = masked_count(grid, id, mask)) out.push_back({id, n});
  }
  return out;
}

std::vector<FingerprintCount> masked_fingerprint_counts(const FingerprintGrid& grid, const Rect& mask,
                                                        std::span<const FingerprintId> candidates) {
  check_mask(grid, mask);
  std::vector<FingerprintCount> out;
  for (FingerprintId id : candidates) {
    if (auto n = masked_count(grid, id, mask)) out.push_back({id, n});
  }
  return out;
}

}  // namespace gridlint
