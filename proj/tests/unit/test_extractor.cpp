#include <fstream>

#include "doctest.h"
#include "oracles.hpp"
#include "treelearn/errors.hpp"
#include "treelearn/extractor.hpp"
#include "treelearn/grammar.hpp"

using namespace treelearn;

namespace {

Wcfg<Rational> fixture(const std::string& name) {
  std::ifstream in(std::string(TREELEARN_FIXTURES) + "/" + name);
  return read_wcfg<Rational>(in);
}

void check_agreement(ObservationTable<Rational>& tbl, const Mta<Rational>& a) {
  for (const auto& t : tbl.rows())
    for (std::size_t j = 0; j < tbl.columns().size(); ++j)
      CHECK(a.eval(compose(tbl.columns()[j], t)) == tbl.cell(t, j));
  for (std::size_t i = 0; i < tbl.basis().size(); ++i)
    CHECK(a.eval_vector(tbl.basis()[i]) == unit_vector<Rational>(tbl.basis().size(), i));
  for (const auto& t : tbl.rows()) {
    auto cls = tbl.classify(t);
    Vector<Rational> expect = zero_vector<Rational>(tbl.basis().size());
    if (cls.in_class()) expect[cls.index] = cls.coeff;
    CHECK(a.eval_vector(t) == expect);
  }
}

}  // namespace

TEST_CASE("trivial target extracts a one-dimensional automaton") {
  auto g = fixture("trivial.wcfg");
  GrammarEvaluator<Rational> ev(g);
  ObservationTable<Rational> tbl(g.alphabet(), [&](const Tree& t) { return ev.weight(t); });
  tbl.complete({Tree::leaf("a")});
  auto a = extract_cmta(tbl);
  CHECK(a.dim() == 1);
  CHECK(a.leaf("a") == Vector<Rational>{1});
  CHECK(a.output() == Vector<Rational>{1});
  CHECK(a.eval(parse_tree("a")) == 1);
  CHECK(a.eval(parse_tree("(a)")) == 0);
  CHECK(is_colinear_mta(a));
}

TEST_CASE("zero series extracts a zero-dimensional automaton") {
  RankedAlphabet al({"a", "b"}, 2);
  ObservationTable<Rational> tbl(al, [](const Tree&) { return Rational(0); });
  tbl.complete({Tree::leaf("a"), Tree::leaf("b")});
  auto a = extract_cmta(tbl);
  CHECK(a.dim() == 0);
  CHECK(a.eval(parse_tree("(a b)")) == 0);
}

TEST_CASE("unclosed tables are rejected") {
  RankedAlphabet al({"a"}, 1);
  ObservationTable<Rational> tbl(al, [](const Tree&) { return Rational(1); });
  tbl.add_rows(Tree::leaf("a"));
  CHECK_THROWS_AS(extract_cmta(tbl), PreconditionError);
}

TEST_CASE("extracted automata reproduce closed consistent tables") {
  for (const char* name : {"nchain.wcfg", "supcfg3.wcfg", "acrab.wcfg"}) {
    CAPTURE(name);
    auto g = fixture(name);
    GrammarEvaluator<Rational> ev(g);
    ObservationTable<Rational> tbl(g.alphabet(), [&](const Tree& t) { return ev.weight(t); });
    std::vector<Tree> seeds;
    for (const auto& tok : g.alphabet().leaves) seeds.push_back(Tree::leaf(tok));
    tbl.complete(seeds);
    std::size_t steps = 0;
    for (const auto& t : oracle::all_trees(g.alphabet(), 3)) {
      tbl.complete({t});
      auto a = extract_cmta(tbl);
      CHECK(is_colinear_mta(a));
      CHECK(is_positive(a));
      check_agreement(tbl, a);
      if (++steps > 20) break;
    }
  }
}

TEST_CASE("a basis node gets coefficient one at its own index") {
  auto g = fixture("supcfg3.wcfg");
  GrammarEvaluator<Rational> ev(g);
  ObservationTable<Rational> tbl(g.alphabet(), [&](const Tree& t) { return ev.weight(t); });
  tbl.complete({parse_tree("(a (a b))")});
  auto a = extract_cmta(tbl);
  const auto& basis = tbl.basis();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (!basis[i].is_node()) continue;
    std::vector<std::size_t> tuple;
    for (const auto& c : basis[i].children())
      for (std::size_t j = 0; j < basis.size(); ++j)
        if (basis[j] == c) tuple.push_back(j);
    if (tuple.size() != basis[i].arity()) continue;
    const auto& m = a.node(basis[i].arity());
    CHECK(m.at(i, m.column_index(tuple)) == 1);
  }
}
