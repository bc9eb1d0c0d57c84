#include "doctest.h"

#include <algorithm>

#include "gridlint/formula.hpp"
#include "support.hpp"

using namespace gridlint;
using Kind = Expr::Kind;

namespace {

std::vector<RawReference> refs_of(const std::string& f) { return references(parse_formula(f)); }

std::string addr(const RawReference& r) { return format_a1({r.col, r.row}); }

// Random well-formed formula text over a small grammar.
std::string random_expr(testing::Rng& rng, int depth) {
  using testing::uniform;
  auto cell = [&] {
    std::string s;
    if (testing::chance(rng, 0.3)) s += "$";
    s += column_name(uniform(rng, 1, 30));
    if (testing::chance(rng, 0.3)) s += "$";
    s += std::to_string(uniform(rng, 1, 40));
    return s;
  };
  int pick = depth <= 0 ? uniform(rng, 0, 3) : uniform(rng, 0, 8);
  switch (pick) {
    case 0: return std::to_string(uniform(rng, 0, 999));
    case 1: return cell();
    case 2: return cell() + ":" + cell();
    case 3: return testing::chance(rng, 0.5) ? "\"a\"\"b\"" : "Sheet2!" + cell();
    case 4: return "(" + random_expr(rng, depth - 1) + ")";
    case 5: return "-" + random_expr(rng, depth - 1);
    case 6: {
      static const char* ops[] = {"+", "-", "*", "/", "^", "&", "=", "<>", "<=", ">="};
      return random_expr(rng, depth - 1) + ops[uniform(rng, 0, 9)] + random_expr(rng, depth - 1);
    }
    case 7: return random_expr(rng, depth - 1) + "%";
    default: {
      static const char* fns[] = {"SUM", "IF", "ABS", "MAX"};
      std::string s = std::string(fns[uniform(rng, 0, 3)]) + "(";
      int n = uniform(rng, 0, 3);
      for (int i = 0; i < n; ++i) s += (i ? "," : "") + random_expr(rng, depth - 1);
      return s + ")";
    }
  }
}

}  // namespace

TEST_CASE("parse SUM over a range") {
  auto ast = parse_formula("=SUM(C5:C9)");
  REQUIRE(ast.root.kind == Kind::FunctionCall);
  CHECK(ast.root.text == "SUM");
  REQUIRE(ast.root.args.size() == 1);
  const Expr& r = ast.root.args[0];
  CHECK(r.kind == Kind::RangeRef);
  CHECK(r.from == RefCorner{3, false, 5, false});
  CHECK(r.to == RefCorner{3, false, 9, false});
  CHECK(r.span.begin == 5);
  CHECK(r.span.end == 10);
}

TEST_CASE("mixed addressing modes") {
  auto ast = parse_formula("=$A1+B$2");
  REQUIRE(ast.root.kind == Kind::BinaryOp);
  CHECK(ast.root.text == "+");
  CHECK(ast.root.args[0].from == RefCorner{1, true, 1, false});
  CHECK(ast.root.args[1].from == RefCorner{2, false, 2, true});
}

TEST_CASE("function names and columns are case-insensitive") {
  auto a = parse_formula("=sum(c5:c9)");
  auto b = parse_formula("=SUM(C5:C9)");
  CHECK(same_structure(a.root, b.root));
}

TEST_CASE("precedence") {
  auto ast = parse_formula("=1+2*3^-4^5");
  REQUIRE(ast.root.text == "+");
  const Expr& mul = ast.root.args[1];
  REQUIRE(mul.text == "*");
  const Expr& pow = mul.args[1];
  REQUIRE(pow.text == "^");
  CHECK(pow.args[0].kind == Kind::NumberLit);
  CHECK(pow.args[1].text == "^");  // right-associative
  CHECK(pow.args[1].args[0].kind == Kind::UnaryOp);

  auto cmp = parse_formula("=A1&B1=C1");
  CHECK(cmp.root.text == "=");
  CHECK(cmp.root.args[0].text == "&");
  auto pct = parse_formula("=-A1%");
  CHECK(pct.root.kind == Kind::UnaryOp);
  CHECK(pct.root.args[0].text == "%");
}

TEST_CASE("sheet and workbook qualifiers") {
  auto a = refs_of("=Sheet2!A1+'My Sheet'!B2:B3+[Book.xlsx]Other!C1");
  REQUIRE(a.size() == 4);
  CHECK(a[0].sheet == "Sheet2");
  CHECK_FALSE(a[0].workbook);
  CHECK(a[1].sheet == "My Sheet");
  CHECK(a[3].workbook == "Book.xlsx");
  CHECK(a[3].sheet == "Other");
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_formula("=SUM("), ParseError);
  try {
    parse_formula("=SUM(");
  } catch (const ParseError& e) {
    CHECK(e.position() == 5);
    CHECK_FALSE(e.expected().empty());
  }
  CHECK_THROWS_AS(parse_formula("SUM(A1)"), ParseError);
  CHECK_THROWS_AS(parse_formula("=1+"), ParseError);
  CHECK_THROWS_AS(parse_formula("=A1 B1"), ParseError);
  CHECK_THROWS_AS(parse_formula("=\"open"), ParseError);
  CHECK_THROWS_AS(parse_formula("=R1C1"), ParseError);
  CHECK_THROWS_AS(parse_formula("=A0"), ParseError);
}

TEST_CASE("references expand ranges row-major and keep duplicates") {
  auto r = refs_of("=SUM(C5:C9)");
  REQUIRE(r.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(addr(r[i]) == "C" + std::to_string(5 + i));
  auto d = refs_of("=A1+A1");
  CHECK(d.size() == 2);
  CHECK(d[0] == d[1]);
  CHECK(refs_of("=1+2").empty());
  auto block = refs_of("=SUM(B2:C3)");
  std::vector<std::string> names;
  for (auto& x : block) names.push_back(addr(x));
  CHECK(names == std::vector<std::string>{"B2", "C2", "B3", "C3"});
}

TEST_CASE("range absolute mode needs both corners absolute") {
  auto r = refs_of("=SUM($A$1:$A2)");
  REQUIRE(r.size() == 2);
  CHECK(r[0].col_absolute);
  CHECK_FALSE(r[0].row_absolute);
  auto s = refs_of("=SUM($A$1:$A$2)");
  CHECK(s[1].row_absolute);
}

TEST_CASE("range too large") {
  CHECK_THROWS_AS(references(parse_formula("=SUM(A1:Z100)"), 100), RangeTooLarge);
  CHECK(references(parse_formula("=SUM(A1:J10)"), 100).size() == 100);
}

TEST_CASE("constant counts") {
  CHECK(constant_count(parse_formula("=A1+1000")) == ConstantCount{1, 0});
  CHECK(constant_count(parse_formula("=SUM(B6:E6)")) == ConstantCount{0, 0});
  CHECK(constant_count(parse_formula("=IF(A1,\"y\",\"n\")")) == ConstantCount{0, 2});
}

TEST_CASE("range expansion matches a rectangle enumerator") {
  testing::Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    Position a{testing::uniform(rng, 1, 40), testing::uniform(rng, 1, 40)};
    Position b{testing::uniform(rng, 1, 40), testing::uniform(rng, 1, 40)};
    auto r = refs_of("=SUM(" + format_a1(a) + ":" + format_a1(b) + ")");
    std::set<Position> got, want;
    for (auto& x : r) got.insert({x.col, x.row});
    for (int c = std::min(a.col, b.col); c <= std::max(a.col, b.col); ++c) {
      for (int y = std::min(a.row, b.row); y <= std::max(a.row, b.row); ++y) want.insert({c, y});
    }
    REQUIRE(got == want);
    REQUIRE(r.size() == want.size());
    REQUIRE(std::is_sorted(r.begin(), r.end(), [](const RawReference& p, const RawReference& q) {
      return row_major_less({p.col, p.row}, {q.col, q.row});
    }));
  }
}

TEST_CASE("operand order does not change the reference multiset") {
  testing::Rng rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    std::string x = random_expr(rng, 2), y = random_expr(rng, 2);
    auto a = refs_of("=(" + x + ")+(" + y + ")");
    auto b = refs_of("=(" + y + ")+(" + x + ")");
    auto key = [](const RawReference& r) {
      return std::make_tuple(r.col, r.col_absolute, r.row, r.row_absolute, r.sheet, r.workbook);
    };
    auto less = [&](const RawReference& p, const RawReference& q) { return key(p) < key(q); };
    std::sort(a.begin(), a.end(), less);
    std::sort(b.begin(), b.end(), less);
    REQUIRE(a == b);
  }
}

TEST_CASE("print then reparse is structurally equal") {
  testing::Rng rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    std::string text = "=" + random_expr(rng, 4);
    FormulaAst ast = parse_formula(text);
    std::string printed = to_formula_string(ast);
    FormulaAst again = parse_formula(printed);
    INFO(text << " printed as " << printed);
    REQUIRE(same_structure(ast.root, again.root));
    REQUIRE(to_formula_string(again) == printed);
  }
}
