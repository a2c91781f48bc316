#include <fstream>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "treelearn/errors.hpp"
#include "treelearn/teacher.hpp"

using namespace treelearn;

namespace {

Wcfg<Rational> fixture(const std::string& name) {
  std::ifstream in(std::string(TREELEARN_FIXTURES) + "/" + name);
  return read_wcfg<Rational>(in);
}

}  // namespace

TEST_CASE("exhaustive strings in length then lexicographic order") {
  RankedAlphabet al({"a", "b"}, 2);
  auto ss = exhaustive_strings(al, 2);
  REQUIRE(ss.size() == 6);
  CHECK(ss[0] == GeneString{"a"});
  CHECK(ss[2] == GeneString{"a", "a"});
  CHECK(ss[5] == GeneString{"b", "b"});
}

TEST_CASE("sampling is deterministic per seed") {
  RankedAlphabet al({"a", "b", "c"}, 2);
  auto x = sampled_strings(al, 20, 6, 42);
  auto y = sampled_strings(al, 20, 6, 42);
  auto z = sampled_strings(al, 20, 6, 43);
  CHECK(x == y);
  CHECK(x != z);
  for (const auto& s : x) CHECK((s.size() >= 1 && s.size() <= 6));
  RankedAlphabet big({"a", "b", "c", "d"}, 2);
  auto long_ones = sampled_strings(big, 5, 40, 1);
  CHECK(long_ones.size() == 5);
}

TEST_CASE("all parses are counted by Catalan numbers") {
  GeneString s{"a", "b", "c", "d", "e"};
  CHECK(all_parses(s, 2).size() == 14);
  // Schroeder-Hipparchus counts for arities 2..n.
  CHECK(all_parses({"a", "b", "c"}, 3).size() == 3);
  CHECK(all_parses({"a", "b", "c", "d"}, 4).size() == 11);
  for (const auto& t : all_parses(s, 2)) CHECK(yield(t) == s);
}

TEST_CASE("duplication candidates") {
  auto c = duplication_candidates({parse_tree("(a b)")}, 1);
  std::vector<std::string> got;
  for (const auto& t : c) got.push_back(t.str());
  CHECK(got == std::vector<std::string>{"(a b)", "(a (b b))", "((a a) b)", "((a a) (b b))"});
}

TEST_CASE("candidate sets are canonical and deduplicated") {
  RankedAlphabet al({"a", "b"}, 2);
  CandidateConfig cfg;
  cfg.strategy = Exhaustive{3};
  auto c = candidates(cfg, al);
  CHECK(std::is_sorted(c.begin(), c.end(), CanonicalLess{}));
  CHECK(c.size() == 2 + 4 + 8);
  cfg.parses = ParseMode::All;
  CHECK(candidates(cfg, al).size() == 2 + 4 + 16);
}

TEST_CASE("teacher answers and counterexamples") {
  auto g = fixture("acrab.wcfg");
  CandidateConfig cfg;
  cfg.strategy = Exhaustive{4};
  cfg.parses = ParseMode::All;
  SimulatedTeacher<Rational> t(grammar_target(g), candidates(cfg, g.alphabet()), Rational(0));
  CHECK(t.smq(parse_tree("(AcrR ((AcrA AcrB) TolC))")) == Rational(57, 125));
  CHECK(t.smq(parse_tree("(AcrR AcrR)")) == 0);
  Mta<Rational> zero(g.alphabet(), 1);
  auto cex = t.seq(zero);
  REQUIRE(cex.has_value());
  CHECK(cex->second > 0);
  CHECK(cex->second == t.smq(cex->first));
  auto exact = wcfg_to_pmta(g);
  CHECK_FALSE(t.seq(exact).has_value());
}

TEST_CASE("chain grammar teacher values") {
  auto g = fixture("chain.wcfg");
  SimulatedTeacher<Rational> t(grammar_target(g), {}, Rational(0));
  CHECK(t.smq(right_chain("a", 2)) == Rational(1, 6));
  CHECK(t.smq(right_chain("a", 3)) == Rational(1, 4));
  for (std::size_t n = 4; n <= 12; ++n)
    CHECK(t.smq(right_chain("a", n)) ==
          Rational(3, 4) * t.smq(right_chain("a", n - 1)) - Rational(1, 24) * t.smq(right_chain("a", n - 2)));
}

TEST_CASE("epsilon defaults") {
  CHECK(default_epsilon<Rational>(false) == 0);
  CHECK(default_epsilon<Rational>(true) == Rational(1, 1000000));
  CHECK(default_epsilon<double>(false) == doctest::Approx(1e-6));
}

TEST_CASE("corpus oracle with decay") {
  Tree chain = right_chain("a", 3);
  CorpusOracle<Rational> one({{chain, Rational(5)}}, Rational(1, 5), DistanceKind::Duplication);
  CHECK(one(chain) == 1);
  CHECK(one(right_chain("a", 4)) == Rational(1, 5));
  CHECK(one(right_chain("a", 5)) == Rational(1, 25));
  CHECK(one(parse_tree("(b b)")) == 0);

  CorpusOracle<Rational> mix({{parse_tree("(a b)"), Rational(3)}, {parse_tree("(b a)"), Rational(1)}}, Rational(1, 5),
                             DistanceKind::Swap);
  CHECK(mix(parse_tree("(a b)")) == Rational(3, 4) + Rational(1, 4) * Rational(1, 5));
  CHECK(mix.alphabet().leaves == std::vector<std::string>{"a", "b"});

  CHECK_THROWS_AS(CorpusOracle<Rational>({{chain, Rational(1)}}, Rational(1), DistanceKind::Swap), InputError);
  CHECK_THROWS_AS(CorpusOracle<Rational>({{chain, Rational(0)}}, Rational(1, 2), DistanceKind::Swap), InputError);

  std::istringstream in("# corpus\n2\t(a b)\n1\t(b a)\n");
  auto corpus = read_corpus<Rational>(in);
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[0].second == 2);
  std::istringstream bad("2 (a b)\n");
  CHECK_THROWS_AS(read_corpus<Rational>(bad), InputError);
}
