#include "gridlint/fixes.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <set>

#include "gridlint/errors.hpp"

namespace gridlint {

const char* to_string(Rejection r) {
  switch (r) {
    case Rejection::None: return "none";
    case Rejection::NotRectangular: return "C1";
    case Rejection::NotFormula: return "C2";
    case Rejection::AggregateOfTarget: return "C3";
  }
  return "?";
}

FixContext::FixContext(const SheetIR& ir, const FingerprintGrid& grid, const RegionSet& regions)
    : ir_(ir), grid_(grid), regions_(regions) {
  region_of_.assign(static_cast<size_t>(grid.cell_count()), 0);
  all_formula_.assign(regions.size(), true);
  for (size_t r = 0; r < regions.size(); ++r) {
    const Rect& rc = regions[r].rect;
    for (int y = rc.top; y <= rc.bottom; ++y) {
      for (int x = rc.left; x <= rc.right; ++x) {
        region_of_[grid.bit_index({x, y})] = r;
        if (ir.at({x, y}).kind != CellKind::Formula) all_formula_[r] = false;
      }
    }
  }
  std::vector<std::set<size_t>> adj(regions.size());
  const Rect ext = grid.extent();
  for (int y = ext.top; y <= ext.bottom; ++y) {
    for (int x = ext.left; x <= ext.right; ++x) {
      size_t a = region_of({x, y});
      if (x < ext.right) {
        size_t b = region_of({x + 1, y});
        if (a != b) adj[a].insert(b), adj[b].insert(a);
      }
      if (y < ext.bottom) {
        size_t b = region_of({x, y + 1});
        if (a != b) adj[a].insert(b), adj[b].insert(a);
      }
    }
  }
  neighbors_.resize(regions.size());
  for (size_t r = 0; r < regions.size(); ++r) neighbors_[r].assign(adj[r].begin(), adj[r].end());
  baseline_ = layout_entropy(regions, grid.cell_count());
}

namespace {

std::vector<Position> cells_of(const Rect& r) {
  std::vector<Position> out;
  out.reserve(static_cast<size_t>(r.area()));
  for (int y = r.top; y <= r.bottom; ++y) {
    for (int x = r.left; x <= r.right; ++x) out.push_back({x, y});
  }
  return out;
}

Rect cell_rect(Position p) { return {p.col, p.row, p.col, p.row}; }

// Bounding box of source and target; the union is rectangular iff its area matches.
Rect union_box(const ProposedFix& fix) {
  Rect box = fix.target;
  for (Position p : fix.source) box = bounding_union(box, cell_rect(p));
  return box;
}

// Pieces of `r` left after removing cell `c`, as at most four rectangles.
std::vector<Rect> carve(const Rect& r, Position c) {
  std::vector<Rect> out;
  if (c.row > r.top) out.push_back({r.left, r.top, r.right, c.row - 1});
  if (c.col > r.left) out.push_back({r.left, c.row, c.col - 1, c.row});
  if (c.col < r.right) out.push_back({c.col + 1, c.row, r.right, c.row});
  if (c.row < r.bottom) out.push_back({r.left, c.row + 1, r.right, r.bottom});
  return out;
}

double plogp_term(std::int64_t size, double n) {
  double p = static_cast<double>(size) / n;
  return -p * std::log2(p);
}

}  // namespace

std::vector<ProposedFix> candidate_fixes(const FixContext& ctx) {
  const RegionSet& rs = ctx.regions();
  std::vector<ProposedFix> out;
  for (size_t s = 0; s < rs.size(); ++s) {
    for (size_t t : ctx.neighbors(s)) {
      if (rs[s].fingerprint == rs[t].fingerprint) continue;
      ProposedFix f;
      f.source = cells_of(rs[s].rect);
      f.source_region = s;
      f.target_region = t;
      f.target = rs[t].rect;
      f.target_size = rs[t].rect.area();
      out.push_back(std::move(f));
    }
  }
  // Borrowed single cells: boundary cells of a multi-cell region that touch another region.
  for (size_t t = 0; t < rs.size(); ++t) {
    const Rect& tr = rs[t].rect;
    std::set<Position> seen;
    auto consider = [&](Position p) {
      const Rect ext = ctx.grid().extent();
      if (!ext.contains(p)) return;
      size_t s = ctx.region_of(p);
      if (s == t || rs[s].rect.area() == 1 || rs[s].fingerprint == rs[t].fingerprint) return;
      if (!seen.insert(p).second) return;
      ProposedFix f;
      f.source = {p};
      f.source_region = s;
      f.target_region = t;
      f.target = tr;
      f.target_size = tr.area();
      f.borrowed = true;
      out.push_back(std::move(f));
    };
    std::vector<Position> ring;
    for (int x = tr.left; x <= tr.right; ++x) ring.push_back({x, tr.top - 1});
    for (int y = tr.top; y <= tr.bottom; ++y) ring.push_back({tr.left - 1, y}), ring.push_back({tr.right + 1, y});
    for (int x = tr.left; x <= tr.right; ++x) ring.push_back({x, tr.bottom + 1});
    std::sort(ring.begin(), ring.end(), row_major_less);
    for (Position p : ring) consider(p);
  }
  return out;
}

Admissibility admissible(const ProposedFix& fix, const FixContext& ctx) {
  const std::int64_t cells = fix.target.area() + static_cast<std::int64_t>(fix.source.size());
  if (union_box(fix).area() != cells) return {false, Rejection::NotRectangular};

  SheetContext sctx{ctx.ir().workbook, ctx.ir().sheet};
  bool aggregate = true;
  for (Position p : fix.source) {
    const CellIR& c = ctx.ir().at(p);
    auto referents = resolve_referents(c.refs, sctx);
    bool inside = c.kind == CellKind::Formula && !referents.empty() &&
                  std::all_of(referents.begin(), referents.end(), [&](const Referent& r) {
                    return !r.off_sheet && fix.target.contains(Position{r.col, r.row});
                  });
    if (!inside) {
      aggregate = false;
      break;
    }
  }
  if (aggregate) return {false, Rejection::AggregateOfTarget};

  for (Position p : fix.source) {
    if (ctx.ir().at(p).kind != CellKind::Formula) return {false, Rejection::NotFormula};
  }
  if (!ctx.all_formula(fix.target_region)) return {false, Rejection::NotFormula};
  return {true, Rejection::None};
}

double entropy_delta(const ProposedFix& fix, const FixContext& ctx) {
  const RegionSet& rs = ctx.regions();
  const std::int64_t n = ctx.total_cells();
  if (n <= 1) return 0.0;
  const double total = static_cast<double>(n);

  std::set<size_t> pool{fix.source_region, fix.target_region};
  for (size_t r : ctx.neighbors(fix.target_region)) pool.insert(r);
  for (size_t r : ctx.neighbors(fix.source_region)) pool.insert(r);

  RegionSet before, after;
  for (size_t r : pool) {
    before.push_back(rs[r]);
    if (r != fix.source_region && r != fix.target_region) after.push_back(rs[r]);
  }
  after.push_back({union_box(fix), rs[fix.target_region].fingerprint});
  if (fix.borrowed) {
    for (const Rect& piece : carve(rs[fix.source_region].rect, fix.source.front())) {
      after.push_back({piece, rs[fix.source_region].fingerprint});
    }
  }
  after = coalesce(std::move(after));
  std::sort(before.begin(), before.end());
  std::sort(after.begin(), after.end());

  // Regions the fix leaves alone cancel exactly; summing only the changed sizes in a
  // fixed order keeps the delta independent of how the rest of the sheet was cut.
  std::vector<std::int64_t> removed, added;
  auto area = [](const Region& r) { return r.rect.area(); };
  RegionSet only;
  std::set_difference(before.begin(), before.end(), after.begin(), after.end(), std::back_inserter(only));
  std::transform(only.begin(), only.end(), std::back_inserter(removed), area);
  only.clear();
  std::set_difference(after.begin(), after.end(), before.begin(), before.end(), std::back_inserter(only));
  std::transform(only.begin(), only.end(), std::back_inserter(added), area);
  std::sort(removed.begin(), removed.end());
  std::sort(added.begin(), added.end());

  double sum = 0.0;
  for (auto s : added) sum += plogp_term(s, total);
  for (auto s : removed) sum -= plogp_term(s, total);
  return sum / std::log2(total);
}

double fix_distance(const ProposedFix& fix, const FixContext& ctx) {
  SheetContext sctx{ctx.ir().workbook, ctx.ir().sheet};
  const Position proto_pos{fix.target.left, fix.target.top};
  const CellIR& proto = ctx.ir().at(proto_pos);
  double d = 0.0;
  for (Position p : fix.source) {
    LocFingerprint now = ctx.ir().at(p).location;
    LocFingerprint fixed = location_of(translate(proto.refs, proto_pos, p), sctx);
    double dx = static_cast<double>(now.x - fixed.x);
    double dy = static_cast<double>(now.y - fixed.y);
    double dz = static_cast<double>(now.z - fixed.z);
    d += std::sqrt(dx * dx + dy * dy + dz * dz);
  }
  return d;
}

double impact_score(std::int64_t target_size, double delta_entropy, double distance) {
  if (!(delta_entropy < 0.0)) {
    throw NonNegativeDelta("impact score needs a negative entropy delta, got " + std::to_string(delta_entropy));
  }
  return static_cast<double>(target_size) / (-delta_entropy * std::max(distance, 1.0));
}

double impact_score(const ProposedFix& fix) {
  return impact_score(fix.target_size, fix.delta_entropy, fix.distance);
}

std::int64_t inspection_budget(double threshold, std::int64_t cells) {
  // 0.05 * 100 is 5.000000000000001 in binary floating point.
  return static_cast<std::int64_t>(std::ceil(threshold * static_cast<double>(cells) - 1e-9));
}

std::vector<ProposedFix> rank_and_cut(std::vector<ProposedFix> fixes, double threshold, std::int64_t sheet_cells) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw DomainError("threshold must be in (0, 1]");
  std::sort(fixes.begin(), fixes.end(), [](const ProposedFix& a, const ProposedFix& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.source.size() != b.source.size()) return a.source.size() < b.source.size();
    if (a.source.front() != b.source.front()) return row_major_less(a.source.front(), b.source.front());
    if (a.target.top != b.target.top) return a.target.top < b.target.top;
    if (a.target.left != b.target.left) return a.target.left < b.target.left;
    return a.target_region < b.target_region;
  });
  std::set<size_t> used_sources;
  std::vector<ProposedFix> out;
  const std::int64_t budget = inspection_budget(threshold, sheet_cells);
  std::int64_t flagged = 0;
  for (auto& f : fixes) {
    if (!used_sources.insert(f.source_region).second) continue;
    flagged += static_cast<std::int64_t>(f.source.size());
    if (flagged > budget) break;
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<ProposedFix> propose_fixes(const FixContext& ctx, double threshold, int jobs) {
  std::vector<ProposedFix> cands = candidate_fixes(ctx);
  std::vector<char> keep(cands.size(), 0);
  const auto n = static_cast<std::int64_t>(cands.size());
#pragma omp parallel for schedule(dynamic, 16) num_threads(std::max(1, jobs)) if (jobs > 1)
  for (std::int64_t i = 0; i < n; ++i) {
    ProposedFix& f = cands[i];
    if (!admissible(f, ctx).ok) continue;
    f.delta_entropy = entropy_delta(f, ctx);
    if (!(f.delta_entropy < -kTieEpsilon)) continue;
    f.distance = fix_distance(f, ctx);
    f.score = impact_score(f);
    keep[i] = 1;
  }
  std::vector<ProposedFix> scored;
  for (std::int64_t i = 0; i < n; ++i) {
    if (keep[i]) scored.push_back(std::move(cands[i]));
  }
  return rank_and_cut(std::move(scored), threshold, ctx.total_cells());
}

}  // namespace gridlint
