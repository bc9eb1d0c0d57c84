#include "doctest.h"

#include <filesystem>
#include <functional>

#include "json.hpp"

#include "gridlint/errors.hpp"
#include "gridlint/eval.hpp"
#include "support.hpp"

using namespace gridlint;

namespace {

std::set<Position> cells(std::initializer_list<const char*> names) {
  std::set<Position> out;
  for (const char* n : names) out.insert(*parse_a1(n));
  return out;
}

GroundTruth dual_truth() {
  GroundTruth t;
  t.errors = cells({"A1", "A2", "A3", "B1", "B2", "B3", "B4", "B5", "Z9"});
  t.duals.push_back({cells({"A1", "A2", "A3"}), cells({"B1", "B2", "B3", "B4", "B5"})});
  return t;
}

std::string report_json(const std::string& workbook, const std::string& sheet, std::int64_t n,
                        std::initializer_list<const char*> flagged) {
  nlohmann::json fixes = nlohmann::json::array();
  for (const char* f : flagged) fixes.push_back({{"source", {f}}, {"target", "A1"}});
  nlohmann::json doc{{"workbook", workbook}, {"sheets", {{{"sheet", sheet}, {"cells", n}, {"fixes", fixes}}}}};
  return doc.dump();
}

Workbook sheet_of(std::initializer_list<std::pair<const char*, CellContent>> cs) {
  Workbook wb("w");
  Worksheet& ws = wb.add_sheet("S");
  for (const auto& [a, c] : cs) ws.put(*parse_a1(a), c);
  return wb;
}

RectangularityStats stats(const Workbook& wb) { return rectangularity_stats({build_sheet_ir(wb, wb.sheets()[0])}); }

}  // namespace

TEST_CASE("bug duals count the smaller side") {
  GroundTruth t = dual_truth();
  CHECK(t.error_count() == 4);
  CHECK(count_true_positives(cells({"A1", "A2", "A3"}), t) == 3);
  CHECK(count_true_positives(cells({"A1", "A2", "A3", "B1", "B2", "B3", "B4", "B5"}), t) == 3);
  CHECK(count_true_positives(cells({"B1"}), t) == 1);
  CHECK(count_true_positives(cells({"Z9", "Q1"}), t) == 1);
}

TEST_CASE("not-bug cells are never true positives") {
  GroundTruth t;
  t.errors = cells({"C3"});
  t.not_bugs = cells({"D4"});
  CHECK(count_true_positives(cells({"D4"}), t) == 0);
  CHECK(count_true_positives(cells({"C3", "D4"}), t) == 1);
}

TEST_CASE("swapping the sides of a dual changes nothing") {
  testing::Rng rng(19);
  for (int trial = 0; trial < 300; ++trial) {
    GroundTruth a;
    std::set<Position> pool;
    int n1 = testing::uniform(rng, 1, 5), n2 = testing::uniform(rng, 1, 5);
    BugDual d;
    for (int i = 0; i < n1; ++i) d.c1.insert({1, i + 1});
    for (int i = 0; i < n2; ++i) d.c2.insert({2, i + 1});
    a.errors.insert(d.c1.begin(), d.c1.end());
    a.errors.insert(d.c2.begin(), d.c2.end());
    a.errors.insert({9, 9});
    a.duals.push_back(d);
    GroundTruth b = a;
    std::swap(b.duals[0].c1, b.duals[0].c2);
    std::set<Position> flagged;
    for (int y = 1; y <= 5; ++y) {
      for (int x = 1; x <= 3; ++x) {
        if (testing::chance(rng, 0.4)) flagged.insert({x, y});
      }
    }
    if (testing::chance(rng, 0.5)) flagged.insert({9, 9});
    REQUIRE(count_true_positives(flagged, a) == count_true_positives(flagged, b));
    REQUIRE(a.error_count() == b.error_count());
    REQUIRE(count_true_positives(flagged, a) <= a.error_count());
  }
}

TEST_CASE("precision and recall") {
  auto pr = precision_recall(2, 2, 2, 4, 4);
  CHECK(pr.precision == 0.5);
  CHECK(pr.recall == 0.5);
  auto none = precision_recall(0, 0, 3, 0, 3);
  CHECK(none.precision == 1.0);
  CHECK(none.recall == 0.0);
  auto clean = precision_recall(0, 2, 0, 2, 0);
  CHECK(clean.precision == 0.0);
  CHECK(clean.recall == 1.0);
  auto nothing = precision_recall(0, 0, 0, 0, 0);
  CHECK(nothing.precision == 1.0);
  CHECK(nothing.recall == 1.0);
}

TEST_CASE("expected random true positives") {
  CHECK(expected_random_tp(100, 5, 10) == doctest::Approx(0.5));
  CHECK(expected_random_tp(100, 0, 10) == 0.0);
  CHECK(expected_random_tp(1, 1, 1) == 1.0);
  CHECK_THROWS_AS(expected_random_tp(0, 0, 0), DomainError);
  CHECK_THROWS_AS(expected_random_tp(10, 11, 1), DomainError);
  CHECK_THROWS_AS(expected_random_tp(10, 1, 11), DomainError);
  CHECK_THROWS_AS(expected_random_tp(10, -1, 1), DomainError);
}

TEST_CASE("adjusted precision") {
  CHECK(adjusted_precision(5, 5, 10, 1.0) == doctest::Approx(0.4));
  CHECK(adjusted_precision(10, 0, 10, 1.0) == doctest::Approx(0.9));
  CHECK(adjusted_precision(0, 0, 0, 0.0) == 1.0);
  CHECK(adjusted_precision(0, 4, 4, 0.5) == 0.0);  // below chance clamps
  CHECK(adjusted_precision(4, 0, 4, 0.0) == 1.0);
}

TEST_CASE("annotation parsing") {
  auto a = parse_annotations(R"({"workbook": "w", "sheets": {"Data": {"errors": ["F7:F9", "A1"],
    "duals": [{"c1": ["F7"], "c2": ["F8", "F9"]}], "not_bugs": ["B2"]}}})");
  CHECK(a.workbook == "w");
  const GroundTruth* t = a.find("data");
  REQUIRE(t != nullptr);
  CHECK(t->errors.size() == 4);
  CHECK(t->duals.size() == 1);
  CHECK(t->error_count() == 2);
  CHECK(t->not_bugs == cells({"B2"}));
  CHECK(a.find("other") == nullptr);

  CHECK(parse_annotations(R"({"workbook": "w"})").sheets.empty());
  CHECK_THROWS_AS(parse_annotations("{"), FormatError);
  CHECK_THROWS_AS(parse_annotations(R"({"sheets": {}})"), FormatError);
  CHECK_THROWS_AS(parse_annotations(R"({"workbook": "w", "sheets": {"S": {"errors": ["F0"]}}})"), FormatError);
  CHECK_THROWS_AS(parse_annotations(R"({"workbook": "w", "sheets": {"S": {"errors": [3]}}})"), FormatError);
  // a dual side outside errors, an overlapping dual, and an empty side
  CHECK_THROWS_AS(parse_annotations(R"({"workbook": "w", "sheets": {"S": {"errors": ["A1"],
    "duals": [{"c1": ["A1"], "c2": ["A2"]}]}}})"), FormatError);
  CHECK_THROWS_AS(parse_annotations(R"({"workbook": "w", "sheets": {"S": {"errors": ["A1", "A2"],
    "duals": [{"c1": ["A1"], "c2": ["A1", "A2"]}]}}})"), FormatError);
  CHECK_THROWS_AS(parse_annotations(R"({"workbook": "w", "sheets": {"S": {"errors": ["A1"],
    "duals": [{"c1": ["A1"], "c2": []}]}}})"), FormatError);
  CHECK_THROWS_AS(parse_annotations(R"({"workbook": "w", "sheets": {"S": {}, "s": {}}})"), FormatError);
  CHECK_THROWS_AS(load_annotations("/nonexistent.json"), FileNotFound);
}

TEST_CASE("audit report parsing") {
  auto r = parse_audit_report(report_json("w", "S", 30, {"F6", "B2"}));
  CHECK(r.workbook == "w");
  REQUIRE(r.sheets.size() == 1);
  CHECK(r.sheets[0].cells == 30);
  CHECK(r.sheets[0].flagged == cells({"F6", "B2"}));
  CHECK_THROWS_AS(parse_audit_report(R"({"workbook": "w"})"), FormatError);
  CHECK_THROWS_AS(parse_audit_report(R"({"workbook": "w", "sheets": [{"sheet": "S", "cells": -1, "fixes": []}]})"),
                  FormatError);
}

TEST_CASE("evaluate") {
  auto truth = load_annotations(std::filesystem::path(GRIDLINT_FIXTURES) / "rowsums.annotations.json");
  auto hit = evaluate(parse_audit_report(report_json("rowsums", "Sheet1", 30, {"F6"})), truth);
  CHECK(hit.tp == 1);
  CHECK(hit.fp == 0);
  CHECK(hit.fn == 0);
  CHECK(hit.precision == 1.0);
  CHECK(hit.recall == 1.0);
  CHECK(hit.expected_random_tp == doctest::Approx(1.0 / 30));
  CHECK(hit.adjusted_precision == doctest::Approx(1 - 1.0 / 30));

  auto miss = evaluate(parse_audit_report(report_json("rowsums", "Sheet1", 30, {"F7"})), truth);
  CHECK(miss.tp == 0);
  CHECK(miss.fp == 1);
  CHECK(miss.fn == 1);
  CHECK(miss.precision == 0.0);

  // annotated sheet absent from the report still counts as missed errors
  auto absent = evaluate(parse_audit_report(report_json("rowsums", "Other", 10, {})), truth);
  CHECK(absent.truth_errors == 1);
  CHECK(absent.recall == 0.0);
  CHECK(absent.precision == 1.0);

  CHECK_THROWS_AS(evaluate(parse_audit_report(report_json("other", "Sheet1", 30, {})), truth), FormatError);
  auto j = nlohmann::json::parse(eval_result_json(hit));
  CHECK(j["tp"] == 1);
  CHECK(j["workbook"] == "rowsums");
}

TEST_CASE("rectangularity") {
  // numeric L plus three single-cell formula clusters
  auto ell = sheet_of({{"A1", NumberCell{1}}, {"A2", NumberCell{1}}, {"B2", NumberCell{1}},
                       {"B1", FormulaCell{"=$Z$1"}}, {"C1", FormulaCell{"=$Z$2"}}, {"C2", FormulaCell{"=$Z$3"}}});
  auto s = stats(ell);
  CHECK(s.clusters == 4);
  CHECK(s.rectangular == 3);
  CHECK(s.fraction() == doctest::Approx(0.75));
  CHECK(s.formula_fraction() == 1.0);

  auto numbers = sheet_of({{"A1", NumberCell{1}}, {"B1", NumberCell{1}}, {"D1", TextCell{"x"}}});
  auto n = stats(numbers);
  CHECK(n.clusters == 1);
  CHECK(n.fraction() == 1.0);
  CHECK_FALSE(n.formula_fraction());

  // two separate copies of one fingerprint are two clusters
  auto split = sheet_of({{"A1", FormulaCell{"=$Z$1"}}, {"C1", FormulaCell{"=$Z$1"}}, {"B1", NumberCell{1}}});
  CHECK(stats(split).formula_clusters == 2);
  CHECK(rectangularity_stats({}).fraction() == 1.0);
}

TEST_CASE("rectangularity agrees with a brute-force component count") {
  testing::Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    int w = testing::uniform(rng, 1, 7), h = testing::uniform(rng, 1, 7);
    Workbook wb("w");
    Worksheet& ws = wb.add_sheet("S");
    std::map<Position, int> label;
    for (int y = 1; y <= h; ++y) {
      for (int x = 1; x <= w; ++x) {
        int l = testing::uniform(rng, 0, 2);
        label[{x, y}] = l;
        if (l == 0) ws.put({x, y}, NumberCell{1});
        else ws.put({x, y}, FormulaCell{"=$Z$" + std::to_string(l)});
      }
    }
    // union-find over equal-label neighbours
    std::map<Position, Position> parent;
    std::function<Position(Position)> root = [&](Position p) {
      return parent[p] == p ? p : parent[p] = root(parent[p]);
    };
    for (auto& [p, l] : label) parent[p] = p;
    for (auto& [p, l] : label) {
      for (Position q : {Position{p.col + 1, p.row}, Position{p.col, p.row + 1}}) {
        if (label.count(q) && label[q] == l) parent[root(p)] = root(q);
      }
    }
    std::map<Position, std::pair<Rect, std::int64_t>> comps;
    for (auto& [p, l] : label) {
      Position r = root(p);
      Rect one{p.col, p.row, p.col, p.row};
      auto it = comps.find(r);
      if (it == comps.end()) comps[r] = {one, 1};
      else it->second = {bounding_union(it->second.first, one), it->second.second + 1};
    }
    std::int64_t rect = 0;
    for (auto& [r, c] : comps) rect += c.first.area() == c.second;
    auto s = stats(wb);
    REQUIRE(s.clusters == static_cast<std::int64_t>(comps.size()));
    REQUIRE(s.rectangular == rect);
  }
}
