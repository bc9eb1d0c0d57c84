#include "gridlint/reference.hpp"

#include <map>
#include <set>

namespace gridlint::reference {

std::vector<FingerprintCount> naive_fingerprint_counts(const FingerprintGrid& grid, const Rect& mask) {
  std::map<FingerprintId, std::int64_t> counts;
  for (int y = mask.top; y <= mask.bottom; ++y) {
    for (int x = mask.left; x <= mask.right; ++x) ++counts[grid.id_at({x, y})];
  }
  std::vector<FingerprintCount> out;
  for (auto [id, n] : counts) out.push_back({id, n});
  return out;
}

namespace {

std::pair<Rect, Rect> halves(const Rect& r, int i, bool vertical) {
  if (vertical) return {{r.left, r.top, i, r.bottom}, {i + 1, r.top, r.right, r.bottom}};
  return {{r.left, r.top, r.right, i}, {r.left, i + 1, r.right, r.bottom}};
}

std::set<FingerprintId> values(const FingerprintGrid& grid, const Rect& r) {
  std::set<FingerprintId> out;
  for (const auto& c : naive_fingerprint_counts(grid, r)) out.insert(c.id);
  return out;
}

int build(const FingerprintGrid& grid, const Rect& rect, EntropyTree& tree) {
  int me = static_cast<int>(tree.nodes.size());
  tree.nodes.push_back({rect, -1, -1});
  if (rect.area() == 1 || values(grid, rect).size() == 1) return me;

  double ev = kInfiniteEntropy, eh = kInfiniteEntropy;
  int x = 0, y = 0;
  for (int i = rect.left; i < rect.right; ++i) {
    double e = naive_split_entropy(grid, rect, i, true);
    if (e < ev - kTieEpsilon) {
      ev = e;
      x = i;
    }
  }
  for (int i = rect.top; i < rect.bottom; ++i) {
    double e = naive_split_entropy(grid, rect, i, false);
    if (e < eh - kTieEpsilon) {
      eh = e;
      y = i;
    }
  }
  bool vertical = rect.width() > 1 && ev <= eh + kTieEpsilon;
  double e = vertical ? ev : eh;
  auto [p1, p2] = halves(rect, vertical ? x : y, vertical);
  if (e <= kTieEpsilon && values(grid, p1) == values(grid, p2)) return me;
  int l = build(grid, p1, tree);
  int r = build(grid, p2, tree);
  tree.nodes[me].left = l;
  tree.nodes[me].right = r;
  return me;
}

}  // namespace

double naive_split_entropy(const FingerprintGrid& grid, const Rect& region, int i, bool vertical) {
  auto [p1, p2] = halves(region, i, vertical);
  return normalized_entropy(naive_fingerprint_counts(grid, p1)) +
         normalized_entropy(naive_fingerprint_counts(grid, p2));
}

EntropyTree entropy_tree(const FingerprintGrid& grid, const Rect& region) {
  EntropyTree tree;
  tree.root = build(grid, region, tree);
  return tree;
}

RegionSet decompose(const FingerprintGrid& grid) {
  EntropyTree t = reference::entropy_tree(grid, grid.extent());
  RegionSet rs;
  for (const Rect& leaf : t.leaves()) rs.push_back({leaf, grid.id_at({leaf.left, leaf.top})});
  return coalesce(std::move(rs));
}

}  // namespace gridlint::reference
