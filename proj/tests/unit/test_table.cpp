#include <fstream>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "treelearn/grammar.hpp"
#include "treelearn/table.hpp"

using namespace treelearn;

namespace {

Wcfg<Rational> fixture(const std::string& name) {
  std::ifstream in(std::string(TREELEARN_FIXTURES) + "/" + name);
  return read_wcfg<Rational>(in);
}

std::function<Rational(const Tree&)> series(const Wcfg<Rational>& g) {
  auto ev = std::make_shared<GrammarEvaluator<Rational>>(g);
  return [ev](const Tree& t) { return ev->weight(t); };
}

template <class Tbl>
bool basis_independent(Tbl& tbl) {
  const auto& b = tbl.basis();
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j)
      if (colinear_witness(tbl.row(b[i]), tbl.row(b[j]))) return false;
  return true;
}

}  // namespace

TEST_CASE("classification of rows") {
  RankedAlphabet al({"a", "b", "c"}, 2);
  // f(a) = 1, f(b) = 2, f(c) = 0 everywhere else 0: b is twice a.
  ObservationTable<Rational> tbl(al, [](const Tree& t) {
    if (t.str() == "a") return Rational(1);
    if (t.str() == "b") return Rational(2);
    if (t.str() == "(a a)") return Rational(5);
    return Rational(0);
  });
  tbl.add_rows(Tree::leaf("a"));
  tbl.close();
  CHECK(tbl.basis().size() == 1);
  auto cb = tbl.classify(Tree::leaf("b"));
  CHECK(cb.in_class());
  CHECK(cb.index == 0);
  CHECK(cb.coeff == 2);
  CHECK(tbl.classify(Tree::leaf("c")).is_zero());
  tbl.add_column(parse_context("(a <>)"));
  CHECK(tbl.classify(parse_tree("(a a)")).is_independent());
}

TEST_CASE("memoized queries count distinct trees") {
  RankedAlphabet al({"a"}, 1);
  std::size_t calls = 0;
  ObservationTable<Rational> tbl(al, [&](const Tree&) {
    ++calls;
    return Rational(1);
  });
  tbl.query(Tree::leaf("a"));
  tbl.query(Tree::leaf("a"));
  CHECK(calls == 1);
  CHECK(tbl.smq_count() == 1);
}

TEST_CASE("trivial target closes with one basis row") {
  auto g = fixture("trivial.wcfg");
  ObservationTable<Rational> tbl(g.alphabet(), series(g));
  tbl.complete({Tree::leaf("a")});
  CHECK(tbl.basis().size() == 1);
  CHECK(tbl.is_closed());
  CHECK(tbl.is_consistent());
  auto before = tbl.smq_count();
  tbl.complete({});
  CHECK(tbl.smq_count() == before);
}

TEST_CASE("exact fill of an unambiguous grammar is consistent") {
  auto g = fixture("supcfg3.wcfg");
  auto f = series(g);
  ObservationTable<Rational> tbl(g.alphabet(), f);
  for (const auto& t : oracle::all_trees(g.alphabet(), 3)) tbl.add_rows(t);
  for (const auto& c : oracle::all_contexts(g.alphabet(), 3)) tbl.add_column(c);
  CHECK_FALSE(tbl.check_zero_consistency().has_value());
  CHECK_FALSE(tbl.check_colinear_consistency().has_value());
}

TEST_CASE("a zero-consistency violation yields a separating context") {
  RankedAlphabet al({"a"}, 2);
  // Only (a (a a)) has a non-zero value, so the leaf row is zero over {<>}
  // but not under the one-level context (<> (a a)).
  ObservationTable<Rational> tbl(al, [](const Tree& t) { return t.str() == "(a (a a))" ? Rational(1) : Rational(0); });
  tbl.add_rows(parse_tree("(a a)"));
  auto c = tbl.check_zero_consistency();
  REQUIRE(c.has_value());
  CHECK(compose(*c, Tree::leaf("a")).str() == "(a (a a))");
}

TEST_CASE("a co-linear violation strictly increases the rank") {
  RankedAlphabet al({"a", "b"}, 2);
  // a and b agree on <> but differ under the context (a <>).
  auto f = [](const Tree& t) {
    if (t.str() == "a" || t.str() == "b") return Rational(1);
    if (t.str() == "(a a)") return Rational(3);
    return Rational(0);
  };
  ObservationTable<Rational> tbl(al, f);
  tbl.add_rows(Tree::leaf("a"));
  tbl.add_rows(Tree::leaf("b"));
  tbl.close();
  auto before = tbl.basis().size();
  CHECK(before == 1);
  auto c = tbl.check_colinear_consistency();
  REQUIRE(c.has_value());
  tbl.add_column(*c);
  CHECK(tbl.classify(Tree::leaf("b")).is_independent());
}

TEST_CASE("completion invariants on fixture grammars") {
  for (const char* name : {"trivial.wcfg", "nchain.wcfg", "supcfg3.wcfg", "acrab.wcfg"}) {
    CAPTURE(name);
    auto g = fixture(name);
    ObservationTable<Rational> tbl(g.alphabet(), series(g));
    std::vector<Tree> seeds;
    for (const auto& tok : g.alphabet().leaves) seeds.push_back(Tree::leaf(tok));
    tbl.complete(seeds);
    for (const auto& t : oracle::all_trees(RankedAlphabet(g.terminals(), 2), 3)) {
      tbl.complete({t});
      CHECK(tbl.is_closed());
      CHECK(tbl.is_consistent());
      CHECK(basis_independent(tbl));
      for (const auto& r : tbl.rows())
        for (const auto& child : r.children()) CHECK(tbl.has_row(child));
      if (tbl.basis().size() > 4) break;
    }
  }
}

TEST_CASE("independence survives column additions") {
  auto g = fixture("supcfg3.wcfg");
  ObservationTable<Rational> tbl(g.alphabet(), series(g));
  tbl.complete({Tree::leaf("a"), Tree::leaf("b"), parse_tree("(a b)")});
  std::vector<Tree> independent;
  for (const auto& t : tbl.extension())
    if (tbl.classify(t).is_independent()) independent.push_back(t);
  for (const auto& c : oracle::all_contexts(g.alphabet(), 2)) tbl.add_column(c);
  for (const auto& t : independent) CHECK(tbl.classify(t).is_independent());
}

TEST_CASE("coefficient product over children") {
  auto g = fixture("supcfg3.wcfg");
  ObservationTable<Rational> tbl(g.alphabet(), series(g));
  tbl.complete({parse_tree("(a (a b))"), parse_tree("((b a) a)")});
  const auto& basis = tbl.basis();
  for (const auto& t : tbl.extension()) {
    if (!t.is_node()) continue;
    Rational coeff = 1;
    std::vector<Tree> reps;
    bool zero = false;
    for (const auto& c : t.children()) {
      auto cls = tbl.classify(c);
      if (cls.is_zero()) {
        zero = true;
        break;
      }
      REQUIRE(cls.in_class());
      coeff *= cls.coeff;
      reps.push_back(basis[cls.index]);
    }
    if (zero) {
      CHECK(is_zero_vector(tbl.row(t)));
      continue;
    }
    CHECK(tbl.row(t) == scaled(tbl.row(Tree::node(reps)), coeff));
  }
}

TEST_CASE("debug dump lists every cell") {
  auto g = fixture("trivial.wcfg");
  ObservationTable<Rational> tbl(g.alphabet(), series(g));
  tbl.complete({Tree::leaf("a")});
  std::ostringstream os;
  tbl.dump(os);
  auto text = os.str();
  CHECK(text.rfind("row\tcolumn\tvalue\tin_basis\n", 0) == 0);
  CHECK(text.find("a\t<>\t1\t1\n") != std::string::npos);
}
