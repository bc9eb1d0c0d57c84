#include "gridlint/eval.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "gridlint/errors.hpp"
#include "gridlint/grid.hpp"

namespace gridlint {

using nlohmann::json;

std::int64_t GroundTruth::error_count() const {
  std::set<Position> in_dual;
  std::int64_t n = 0;
  for (const BugDual& d : duals) {
    in_dual.insert(d.c1.begin(), d.c1.end());
    in_dual.insert(d.c2.begin(), d.c2.end());
    n += static_cast<std::int64_t>(std::min(d.c1.size(), d.c2.size()));
  }
  for (Position p : errors) {
    if (!in_dual.count(p)) ++n;
  }
  return n;
}

const GroundTruth* Annotations::find(std::string_view sheet) const {
  for (const auto& [name, gt] : sheets) {
    if (iequals(name, sheet)) return &gt;
  }
  return nullptr;
}

namespace {

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound(path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::set<Position> cell_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw FormatError(where + ": expected array of cell addresses");
  std::set<Position> out;
  for (size_t i = 0; i < j.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    if (!j[i].is_string()) throw FormatError(at + ": expected string");
    auto text = j[i].get<std::string>();
    auto rect = parse_rect(text);
    if (!rect) throw FormatError(at + ": bad address \"" + text + "\"");
    for (int y = rect->top; y <= rect->bottom; ++y) {
      for (int x = rect->left; x <= rect->right; ++x) out.insert({x, y});
    }
  }
  return out;
}

}  // namespace

Annotations parse_annotations(std::string_view json_text) {
  json root = parse_json(json_text);
  if (!root.is_object()) throw FormatError("top level: expected object");
  if (!root.contains("workbook") || !root["workbook"].is_string()) throw FormatError("workbook: expected string");
  Annotations out;
  out.workbook = root["workbook"].get<std::string>();
  if (!root.contains("sheets")) return out;
  if (!root["sheets"].is_object()) throw FormatError("sheets: expected object");
  for (const auto& [name, js] : root["sheets"].items()) {
    const std::string where = "sheets." + name;
    if (!js.is_object()) throw FormatError(where + ": expected object");
    GroundTruth gt;
    if (js.contains("errors")) gt.errors = cell_list(js["errors"], where + ".errors");
    if (js.contains("not_bugs")) gt.not_bugs = cell_list(js["not_bugs"], where + ".not_bugs");
    if (js.contains("duals")) {
      const json& jd = js["duals"];
      if (!jd.is_array()) throw FormatError(where + ".duals: expected array");
      for (size_t i = 0; i < jd.size(); ++i) {
        const std::string at = where + ".duals[" + std::to_string(i) + "]";
        if (!jd[i].is_object() || !jd[i].contains("c1") || !jd[i].contains("c2")) {
          throw FormatError(at + ": expected {\"c1\": [...], \"c2\": [...]}");
        }
        BugDual d{cell_list(jd[i]["c1"], at + ".c1"), cell_list(jd[i]["c2"], at + ".c2")};
        if (d.c1.empty() || d.c2.empty()) throw FormatError(at + ": dual sides must be nonempty");
        for (Position p : d.c1) {
          if (d.c2.count(p)) throw FormatError(at + ": " + format_a1(p) + " is on both sides");
        }
        for (const auto* side : {&d.c1, &d.c2}) {
          for (Position p : *side) {
            if (!gt.errors.count(p)) throw FormatError(at + ": " + format_a1(p) + " is not listed in errors");
          }
        }
        gt.duals.push_back(std::move(d));
      }
    }
    if (out.find(name)) throw FormatError(where + ": sheet annotated twice");
    out.sheets.emplace(name, std::move(gt));
  }
  return out;
}

Annotations load_annotations(const std::filesystem::path& path) { return parse_annotations(read_file(path)); }

AuditSummary parse_audit_report(std::string_view json_text) {
  json root = parse_json(json_text);
  if (!root.is_object() || !root.contains("workbook") || !root["workbook"].is_string()) {
    throw FormatError("workbook: expected string");
  }
  if (!root.contains("sheets") || !root["sheets"].is_array()) throw FormatError("sheets: expected array");
  AuditSummary out;
  out.workbook = root["workbook"].get<std::string>();
  const json& sheets = root["sheets"];
  for (size_t i = 0; i < sheets.size(); ++i) {
    const std::string where = "sheets[" + std::to_string(i) + "]";
    const json& js = sheets[i];
    if (!js.is_object() || !js.contains("sheet") || !js["sheet"].is_string()) {
      throw FormatError(where + ".sheet: expected string");
    }
    FlaggedSheet fs;
    fs.sheet = js["sheet"].get<std::string>();
    if (!js.contains("cells") || !js["cells"].is_number_integer() || js["cells"].get<std::int64_t>() < 0) {
      throw FormatError(where + ".cells: expected nonnegative integer");
    }
    fs.cells = js["cells"].get<std::int64_t>();
    if (!js.contains("fixes") || !js["fixes"].is_array()) throw FormatError(where + ".fixes: expected array");
    for (size_t k = 0; k < js["fixes"].size(); ++k) {
      const json& jf = js["fixes"][k];
      const std::string at = where + ".fixes[" + std::to_string(k) + "]";
      if (!jf.is_object() || !jf.contains("source")) throw FormatError(at + ".source: missing");
      auto cells = cell_list(jf["source"], at + ".source");
      fs.flagged.insert(cells.begin(), cells.end());
    }
    out.sheets.push_back(std::move(fs));
  }
  return out;
}

AuditSummary load_audit_report(const std::filesystem::path& path) { return parse_audit_report(read_file(path)); }

std::int64_t count_true_positives(const std::set<Position>& flagged, const GroundTruth& truth) {
  std::set<Position> in_dual;
  std::int64_t tp = 0;
  for (const BugDual& d : truth.duals) {
    std::int64_t hits = 0;
    for (const auto* side : {&d.c1, &d.c2}) {
      for (Position p : *side) {
        in_dual.insert(p);
        hits += flagged.count(p);
      }
    }
    tp += std::min<std::int64_t>(hits, static_cast<std::int64_t>(std::min(d.c1.size(), d.c2.size())));
  }
  for (Position p : flagged) {
    if (truth.errors.count(p) && !in_dual.count(p)) ++tp;
  }
  return tp;
}

PrecisionRecall precision_recall(std::int64_t tp, std::int64_t fp, std::int64_t fn, std::int64_t flagged,
                                 std::int64_t truth_error_count) {
  PrecisionRecall pr;
  if (flagged == 0) {
    pr.precision = 1.0;
  } else if (truth_error_count == 0) {
    pr.precision = 0.0;
  } else {
    pr.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  pr.recall = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  return pr;
}

double expected_random_tp(std::int64_t m, std::int64_t r, std::int64_t n) {
  if (m < 1) throw DomainError("population must be at least 1");
  if (r < 0 || n < 0) throw DomainError("counts must be nonnegative");
  if (n > m || r > m) throw DomainError("counts cannot exceed the population");
  return static_cast<double>(n) * static_cast<double>(r) / static_cast<double>(m);
}

double adjusted_precision(std::int64_t tp, std::int64_t /*fp*/, std::int64_t flagged, double expected) {
  if (flagged == 0) return 1.0;
  // FP_a = flagged - TP_a, so TP_a / (TP_a + FP_a) = TP_a / flagged.
  double tpa = static_cast<double>(tp) - expected;
  return std::clamp(tpa / static_cast<double>(flagged), 0.0, 1.0);
}

EvalResult evaluate(const AuditSummary& report, const Annotations& truth) {
  if (report.workbook != truth.workbook) {
    throw FormatError("workbook mismatch: report is for \"" + report.workbook + "\", annotations for \"" +
                      truth.workbook + "\"");
  }
  EvalResult r;
  r.workbook = report.workbook;
  static const GroundTruth kClean;
  std::set<std::string> seen;
  for (const FlaggedSheet& s : report.sheets) {
    const GroundTruth* gt = truth.find(s.sheet);
    if (gt == nullptr) gt = &kClean;
    else seen.insert(s.sheet);
    r.cells += s.cells;
    r.flagged += static_cast<std::int64_t>(s.flagged.size());
    r.tp += count_true_positives(s.flagged, *gt);
    r.truth_errors += gt->error_count();
  }
  // Annotated sheets missing from the report contribute only misses.
  for (const auto& [name, gt] : truth.sheets) {
    bool covered = std::any_of(seen.begin(), seen.end(), [&](const std::string& s) { return iequals(s, name); });
    if (!covered) r.truth_errors += gt.error_count();
  }
  r.fp = r.flagged - r.tp;
  r.fn = r.truth_errors - r.tp;
  PrecisionRecall pr = precision_recall(r.tp, r.fp, r.fn, r.flagged, r.truth_errors);
  r.precision = pr.precision;
  r.recall = pr.recall;
  if (r.cells > 0 && r.truth_errors <= r.cells) {
    r.expected_random_tp = expected_random_tp(r.cells, r.truth_errors, r.flagged);
  }
  r.adjusted_precision = adjusted_precision(r.tp, r.fp, r.flagged, r.expected_random_tp);
  return r;
}

std::string eval_result_json(const EvalResult& r) {
  nlohmann::ordered_json j;
  j["workbook"] = r.workbook;
  j["cells"] = r.cells;
  j["flagged"] = r.flagged;
  j["truth_errors"] = r.truth_errors;
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["fn"] = r.fn;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["expected_random_tp"] = r.expected_random_tp;
  j["adjusted_precision"] = r.adjusted_precision;
  return j.dump(2) + "\n";
}

double RectangularityStats::fraction() const {
  return clusters == 0 ? 1.0 : static_cast<double>(rectangular) / static_cast<double>(clusters);
}

std::optional<double> RectangularityStats::formula_fraction() const {
  if (formula_clusters == 0) return std::nullopt;
  return static_cast<double>(formula_rectangular) / static_cast<double>(formula_clusters);
}

RectangularityStats rectangularity_stats(const std::vector<SheetIR>& sheets) {
  RectangularityStats st;
  for (const SheetIR& ir : sheets) {
    if (ir.cells.empty()) continue;
    FingerprintGrid grid = FingerprintGrid::from_ir(ir);
    const Rect ext = grid.extent();
    std::vector<char> seen(ir.cells.size(), 0);
    std::vector<Position> stack;
    for (int y = ext.top; y <= ext.bottom; ++y) {
      for (int x = ext.left; x <= ext.right; ++x) {
        const Position start{x, y};
        const CellIR& c0 = ir.at(start);
        if (seen[grid.bit_index(start)] || c0.kind == CellKind::Empty || c0.kind == CellKind::Text) continue;
        const FingerprintId id = grid.id_at(start);
        std::int64_t size = 0;
        bool formula = true;
        Rect box{x, y, x, y};
        stack.assign(1, start);
        seen[grid.bit_index(start)] = 1;
        while (!stack.empty()) {
          Position p = stack.back();
          stack.pop_back();
          ++size;
          formula = formula && ir.at(p).kind == CellKind::Formula;
          box = bounding_union(box, Rect{p.col, p.row, p.col, p.row});
          const Position next[] = {{p.col + 1, p.row}, {p.col - 1, p.row}, {p.col, p.row + 1}, {p.col, p.row - 1}};
          for (Position q : next) {
            if (!ext.contains(q) || seen[grid.bit_index(q)] || grid.id_at(q) != id) continue;
            // a formula fingerprint can coincide with the data fingerprint; keep kinds apart
            if ((ir.at(q).kind == CellKind::Formula) != (c0.kind == CellKind::Formula)) continue;
            seen[grid.bit_index(q)] = 1;
            stack.push_back(q);
          }
        }
        const bool rect = size == box.area();
        ++st.clusters;
        st.rectangular += rect;
        if (formula) {
          ++st.formula_clusters;
          st.formula_rectangular += rect;
        }
      }
    }
  }
  return st;
}

double collision_rate(const std::vector<SheetIR>& sheets) {
  std::map<Fingerprint, std::map<std::vector<ReferenceVector>, std::int64_t>> groups;
  std::int64_t formulas = 0;
  for (const SheetIR& ir : sheets) {
    for (const CellIR& c : ir.cells) {
      if (c.kind != CellKind::Formula) continue;
      ++formulas;
      ++groups[c.fingerprint][c.vectors];
    }
  }
  if (formulas < 2) return 0.0;
  auto pairs = [](std::int64_t k) { return k * (k - 1) / 2; };
  std::int64_t colliding = 0;
  for (const auto& [fp, by_vectors] : groups) {
    std::int64_t total = 0, same = 0;
    for (const auto& [vs, k] : by_vectors) {
      total += k;
      same += pairs(k);
    }
    colliding += pairs(total) - same;
  }
  return static_cast<double>(colliding) / static_cast<double>(pairs(formulas));
}

}  // namespace gridlint
