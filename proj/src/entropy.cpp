#include "gridlint/entropy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>

#include <omp.h>

#include "gridlint/errors.hpp"

namespace gridlint {

double normalized_entropy(std::span<const std::int64_t> counts, std::int64_t n, double log_base) {
  std::int64_t sum = 0;
  int distinct = 0;
  for (auto c : counts) {
    if (c < 0) throw NegativeCount("negative count " + std::to_string(c));
    sum += c;
    if (c > 0) ++distinct;
  }
  if (sum != n) throw Error("counts sum to " + std::to_string(sum) + ", expected " + std::to_string(n));
  if (n == 0) return kInfiniteEntropy;
  if (n == 1 || distinct <= 1) return 0.0;
  const double total = static_cast<double>(n);
  const double log_b = std::log(log_base);
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / total;
    h -= p * (std::log(p) / log_b);
  }
  return h / (std::log(total) / log_b);
}

double normalized_entropy(std::span<const FingerprintCount> counts) {
  std::vector<std::int64_t> raw;
  raw.reserve(counts.size());
  std::int64_t n = 0;
  for (const auto& c : counts) {
    raw.push_back(c.count);
    n += c.count;
  }
  return normalized_entropy(raw, n);
}

namespace {

// Same value as normalized_entropy(counts, n) in base 2, without the validation pass.
double entropy_base2(std::span<const std::int64_t> counts, std::int64_t n) {
  if (n == 0) return kInfiniteEntropy;
  int distinct = 0;
  for (auto c : counts) distinct += c > 0;
  if (n == 1 || distinct <= 1) return 0.0;
  const double total = static_cast<double>(n);
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return h / std::log2(total);
}

struct RegionCounts {
  std::vector<FingerprintId> ids;
  std::vector<std::int64_t> counts;
  std::int64_t n = 0;
};

RegionCounts count_region(const FingerprintGrid& grid, const Rect& rect, std::span<const FingerprintId> candidates) {
  RegionCounts rc;
  for (FingerprintId id : candidates) {
    if (auto c = masked_count(grid, id, rect)) {
      rc.ids.push_back(id);
      rc.counts.push_back(c);
      rc.n += c;
    }
  }
  return rc;
}

std::vector<FingerprintId> all_ids(const FingerprintGrid& grid) {
  std::vector<FingerprintId> ids(grid.fingerprint_count());
  for (size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<FingerprintId>(i);
  return ids;
}

std::pair<Rect, Rect> halves(const Rect& r, int i, bool vertical) {
  if (vertical) return {{r.left, r.top, i, r.bottom}, {i + 1, r.top, r.right, r.bottom}};
  return {{r.left, r.top, r.right, i}, {r.left, i + 1, r.right, r.bottom}};
}

// Entropy of one split given the region totals: the near half is counted from the
// bitvectors, the far half is the complement.
double split_score(const FingerprintGrid& grid, const Rect& region, const RegionCounts& total, int i,
                   bool vertical) {
  auto [p1, p2] = halves(region, i, vertical);
  std::vector<std::int64_t> a(total.ids.size()), b(total.ids.size());
  for (size_t k = 0; k < total.ids.size(); ++k) {
    a[k] = masked_count(grid, total.ids[k], p1);
    b[k] = total.counts[k] - a[k];
  }
  return entropy_base2(a, p1.area()) + entropy_base2(b, p2.area());
}

SplitChoice choose_split(const FingerprintGrid& grid, const Rect& region, const RegionCounts& total, int jobs) {
  const int nv = region.width() - 1;
  const int nh = region.height() - 1;
  const int lines = nv + nh;
  std::vector<double> scores(static_cast<size_t>(std::max(lines, 0)));
  const bool parallel = jobs > 1 && !omp_in_parallel() &&
                        static_cast<std::int64_t>(lines) * region.area() * std::max<size_t>(1, total.ids.size()) >
                            (1 << 16);
#pragma omp parallel for schedule(static) num_threads(jobs) if (parallel)
  for (int k = 0; k < lines; ++k) {
    bool vertical = k < nv;
    int i = vertical ? region.left + k : region.top + (k - nv);
    scores[k] = split_score(grid, region, total, i, vertical);
  }
  SplitChoice best_v{true, 0, kInfiniteEntropy};
  for (int k = 0; k < nv; ++k) {
    if (scores[k] < best_v.entropy - kTieEpsilon) best_v = {true, region.left + k, scores[k]};
  }
  SplitChoice best_h{false, 0, kInfiniteEntropy};
  for (int k = nv; k < lines; ++k) {
    if (scores[k] < best_h.entropy - kTieEpsilon) best_h = {false, region.top + (k - nv), scores[k]};
  }
  if (nv > 0 && best_v.entropy <= best_h.entropy + kTieEpsilon) return best_v;
  return best_h;
}

std::vector<FingerprintId> distinct_ids(const FingerprintGrid& grid, const Rect& r, std::span<const FingerprintId> ids) {
  std::vector<FingerprintId> out;
  for (auto id : ids) {
    if (masked_count(grid, id, r) > 0) out.push_back(id);
  }
  return out;
}

int build_tree(const FingerprintGrid& grid, const Rect& rect, std::span<const FingerprintId> candidates, int jobs,
               EntropyTree& tree) {
  int me = static_cast<int>(tree.nodes.size());
  tree.nodes.push_back({rect, -1, -1});
  RegionCounts total = count_region(grid, rect, candidates);
  if (rect.area() == 1 || total.ids.size() <= 1) return me;
  SplitChoice s = choose_split(grid, rect, total, jobs);
  auto [p1, p2] = halves(rect, s.index, s.vertical);
  if (s.entropy <= kTieEpsilon && distinct_ids(grid, p1, total.ids) == distinct_ids(grid, p2, total.ids)) {
    return me;
  }
  int l = build_tree(grid, p1, total.ids, jobs, tree);
  int r = build_tree(grid, p2, total.ids, jobs, tree);
  tree.nodes[me].left = l;
  tree.nodes[me].right = r;
  return me;
}

void collect_leaves(const EntropyTree& t, int node, std::vector<Rect>& out) {
  const auto& n = t.nodes[node];
  if (n.leaf()) {
    out.push_back(n.rect);
    return;
  }
  collect_leaves(t, n.left, out);
  collect_leaves(t, n.right, out);
}

void check_region(const FingerprintGrid& grid, const Rect& region) {
  if (!region.valid() || !grid.extent().contains(region)) {
    throw OutOfRange("region outside grid: " + format_rect(region));
  }
}

}  // namespace

double split_entropy(const FingerprintGrid& grid, const Rect& region, int i, bool vertical) {
  check_region(grid, region);
  bool ok = vertical ? (region.left <= i && i < region.right) : (region.top <= i && i < region.bottom);
  if (!ok) {
    throw InvalidSplit("invalid " + std::string(vertical ? "vertical" : "horizontal") + " split " +
                       std::to_string(i) + " of " + format_rect(region));
  }
  auto [p1, p2] = halves(region, i, vertical);
  return normalized_entropy(masked_fingerprint_counts(grid, p1)) +
         normalized_entropy(masked_fingerprint_counts(grid, p2));
}

std::vector<Rect> EntropyTree::leaves() const {
  std::vector<Rect> out;
  if (root >= 0) collect_leaves(*this, root, out);
  return out;
}

SplitChoice best_split(const FingerprintGrid& grid, const Rect& region, int jobs) {
  check_region(grid, region);
  auto ids = all_ids(grid);
  return choose_split(grid, region, count_region(grid, region, ids), jobs);
}

EntropyTree entropy_tree(const FingerprintGrid& grid, const Rect& region, int jobs) {
  check_region(grid, region);
  EntropyTree tree;
  auto ids = all_ids(grid);
  tree.root = build_tree(grid, region, ids, std::max(1, jobs), tree);
  return tree;
}

namespace {

using Key = std::array<int, 3>;

class CoalesceIndex {
 public:
  explicit CoalesceIndex(const RegionSet& rs) {
    for (size_t i = 0; i < rs.size(); ++i) add(rs[i].rect, i);
  }
  void add(const Rect& r, size_t i) {
    by_left_[{r.top, r.bottom, r.left}] = i;
    by_right_[{r.top, r.bottom, r.right}] = i;
    by_top_[{r.left, r.right, r.top}] = i;
    by_bottom_[{r.left, r.right, r.bottom}] = i;
  }
  void remove(const Rect& r) {
    by_left_.erase({r.top, r.bottom, r.left});
    by_right_.erase({r.top, r.bottom, r.right});
    by_top_.erase({r.left, r.right, r.top});
    by_bottom_.erase({r.left, r.right, r.bottom});
  }
  std::optional<size_t> right_of(const Rect& r) const { return get(by_left_, {r.top, r.bottom, r.right + 1}); }
  std::optional<size_t> below(const Rect& r) const { return get(by_top_, {r.left, r.right, r.bottom + 1}); }
  std::optional<size_t> left_of(const Rect& r) const { return get(by_right_, {r.top, r.bottom, r.left - 1}); }
  std::optional<size_t> above(const Rect& r) const { return get(by_bottom_, {r.left, r.right, r.top - 1}); }

 private:
  static std::optional<size_t> get(const std::map<Key, size_t>& m, const Key& k) {
    auto it = m.find(k);
    if (it == m.end()) return std::nullopt;
    return it->second;
  }
  std::map<Key, size_t> by_left_, by_right_, by_top_, by_bottom_;
};

bool top_left_less(const Region& a, const Region& b) {
  if (a.rect.top != b.rect.top) return a.rect.top < b.rect.top;
  if (a.rect.left != b.rect.left) return a.rect.left < b.rect.left;
  return a < b;
}

}  // namespace

RegionSet coalesce(RegionSet regions) {
  std::sort(regions.begin(), regions.end(), top_left_less);
  std::vector<bool> alive(regions.size(), true);
  CoalesceIndex index(regions);
  // Pending regions ordered by top-left corner. A region absent from the queue has no
  // merge partner; only a reshaped neighbour can give it one.
  using Entry = std::pair<std::pair<int, int>, size_t>;
  std::set<Entry> queue;
  auto enqueue = [&](size_t i) { queue.insert({{regions[i].rect.top, regions[i].rect.left}, i}); };
  for (size_t i = 0; i < regions.size(); ++i) enqueue(i);

  while (!queue.empty()) {
    size_t i = queue.begin()->second;
    queue.erase(queue.begin());
    if (!alive[i]) continue;
    Region& a = regions[i];
    std::optional<size_t> partner;
    if (auto j = index.right_of(a.rect); j && regions[*j].fingerprint == a.fingerprint) partner = j;
    else if (auto k = index.below(a.rect); k && regions[*k].fingerprint == a.fingerprint) partner = k;
    if (!partner) continue;
    size_t j = *partner;
    index.remove(a.rect);
    index.remove(regions[j].rect);
    queue.erase({{regions[j].rect.top, regions[j].rect.left}, j});
    alive[j] = false;
    a.rect = bounding_union(a.rect, regions[j].rect);
    index.add(a.rect, i);
    enqueue(i);
    if (auto l = index.left_of(a.rect)) enqueue(*l);
    if (auto u = index.above(a.rect)) enqueue(*u);
  }

  RegionSet out;
  for (size_t i = 0; i < regions.size(); ++i) {
    if (alive[i]) out.push_back(regions[i]);
  }
  std::sort(out.begin(), out.end(), top_left_less);
  return out;
}

std::vector<Piece> delimiter_splits(const FingerprintGrid& grid) {
  const Rect ext = grid.extent();
  // Fingerprint of each uniform through-column / through-row, if any.
  auto uniform = [&](const Rect& line) -> std::optional<FingerprintId> {
    FingerprintId id = grid.id_at({line.left, line.top});
    if (masked_count(grid, id, line) == line.area()) return id;
    return std::nullopt;
  };
  std::vector<std::optional<FingerprintId>> col(ext.width()), row(ext.height());
  for (int x = ext.left; x <= ext.right; ++x) col[x - ext.left] = uniform({x, ext.top, x, ext.bottom});
  for (int y = ext.top; y <= ext.bottom; ++y) row[y - ext.top] = uniform({ext.left, y, ext.right, y});

  // Runs of equal classification along one axis: delimiter runs share a fingerprint.
  struct Band {
    int begin, end;
    bool delimiter;
  };
  auto bands = [](const std::vector<std::optional<FingerprintId>>& lines, int origin) {
    std::vector<Band> out;
    for (int k = 0; k < static_cast<int>(lines.size()); ++k) {
      bool delim = lines[k].has_value();
      if (!out.empty() && out.back().delimiter == delim &&
          (!delim || lines[out.back().end - origin] == lines[k])) {
        out.back().end = origin + k;
      } else {
        out.push_back({origin + k, origin + k, delim});
      }
    }
    return out;
  };

  std::vector<Piece> pieces;
  auto row_bands = bands(row, ext.top);
  for (const auto& cb : bands(col, ext.left)) {
    if (cb.delimiter) {
      pieces.push_back({{cb.begin, ext.top, cb.end, ext.bottom}, true});
      continue;
    }
    for (const auto& rb : row_bands) pieces.push_back({{cb.begin, rb.begin, cb.end, rb.end}, rb.delimiter});
  }
  std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) {
    return a.rect.top != b.rect.top ? a.rect.top < b.rect.top : a.rect.left < b.rect.left;
  });
  return pieces;
}

RegionSet leaf_regions(const FingerprintGrid& grid, const DecomposeOptions& options) {
  const int jobs = std::max(1, options.jobs);
  std::vector<Piece> pieces =
      options.preprocess ? delimiter_splits(grid) : std::vector<Piece>{{grid.extent(), false}};
  std::vector<RegionSet> parts(pieces.size());
  const auto n = static_cast<std::int64_t>(pieces.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs) if (n > 1 && jobs > 1)
  for (std::int64_t k = 0; k < n; ++k) {
    const Piece& p = pieces[k];
    if (p.delimiter) {
      parts[k].push_back({p.rect, grid.id_at({p.rect.left, p.rect.top})});
      continue;
    }
    EntropyTree t = entropy_tree(grid, p.rect, jobs);
    for (const Rect& leaf : t.leaves()) parts[k].push_back({leaf, grid.id_at({leaf.left, leaf.top})});
  }
  RegionSet out;
  for (auto& part : parts) out.insert(out.end(), part.begin(), part.end());
  return out;
}

RegionSet decompose(const FingerprintGrid& grid, const DecomposeOptions& options) {
  return coalesce(leaf_regions(grid, options));
}

double layout_entropy(const RegionSet& regions, std::int64_t total_cells) {
  std::vector<std::int64_t> sizes;
  sizes.reserve(regions.size());
  for (const auto& r : regions) sizes.push_back(r.rect.area());
  return normalized_entropy(sizes, total_cells);
}

}  // namespace gridlint
