#include <fstream>

#include "doctest.h"
#include "oracles.hpp"
#include "treelearn/errors.hpp"
#include "treelearn/learner.hpp"
#include "treelearn/teacher.hpp"

using namespace treelearn;

namespace {

Wcfg<Rational> fixture(const std::string& name) {
  std::ifstream in(std::string(TREELEARN_FIXTURES) + "/" + name);
  return read_wcfg<Rational>(in);
}

SimulatedTeacher<Rational> teacher_for(const Wcfg<Rational>& g, std::size_t max_len) {
  CandidateConfig cfg;
  cfg.strategy = Exhaustive{max_len};
  cfg.parses = ParseMode::All;
  return SimulatedTeacher<Rational>(grammar_target(g), candidates(cfg, g.alphabet()), Rational(0));
}

}  // namespace

TEST_CASE("trivial target is learned with one query") {
  auto g = fixture("trivial.wcfg");
  auto teacher = teacher_for(g, 3);
  auto rep = learn<Rational>(teacher, g.alphabet());
  CHECK(rep.hypothesis.dim() == 1);
  CHECK(rep.seq_count == 1);
  CHECK(rep.basis_size == 1);
  CHECK(rep.hypothesis.eval(parse_tree("a")) == 1);
  CHECK(rep.hypothesis.eval(parse_tree("(a)")) == 0);
  CHECK(rep.hypothesis.eval(parse_tree("((a))")) == 0);
}

TEST_CASE("right-chain grammar is learned exactly") {
  auto g = fixture("nchain.wcfg");
  auto teacher = teacher_for(g, 5);
  auto rep = learn<Rational>(teacher, g.alphabet());
  for (std::size_t n = 2; n <= 8; ++n) {
    Tree chain = right_chain("a", n);
    Rational expect = Rational(4, 5);
    for (std::size_t i = 2; i < n; ++i) expect *= Rational(1, 5);
    CHECK(oracle::derivation_weight(g, chain) == expect);
    CHECK(rep.hypothesis.eval(chain) == expect);
  }
  CHECK(rep.hypothesis.eval(parse_tree("((a a) a)")) == 0);
}

TEST_CASE("basis grows between equivalence queries and bounds hold") {
  for (const char* name : {"supcfg3.wcfg", "acrab.wcfg", "nchain.wcfg"}) {
    CAPTURE(name);
    auto g = fixture(name);
    auto teacher = teacher_for(g, 4);
    std::vector<std::size_t> sizes;
    LearnOptions<Rational> opt;
    opt.on_hypothesis = [&](ObservationTable<Rational>& tbl, const Mta<Rational>&) {
      sizes.push_back(tbl.basis().size());
    };
    auto rep = learn<Rational>(teacher, g.alphabet(), opt);
    for (std::size_t i = 1; i < sizes.size(); ++i) CHECK(sizes[i] > sizes[i - 1]);
    CHECK(rep.seq_count <= rep.basis_size);
    CHECK(rep.column_count <= rep.basis_size);
    for (const auto& t : teacher.candidate_trees()) CHECK(rep.hypothesis.eval(t) == teacher.smq(t));
  }
}

TEST_CASE("an unbounded-rank target trips the iteration cap") {
  auto g = fixture("chain.wcfg");
  auto teacher = teacher_for(g, 10);
  LearnOptions<Rational> opt;
  opt.max_iterations = 12;
  CHECK_THROWS_AS(learn<Rational>(teacher, g.alphabet(), opt), CapExceeded);
}

TEST_CASE("float backend learns the same series") {
  auto g = convert_wcfg<double>(fixture("supcfg3.wcfg"));
  CandidateConfig cfg;
  cfg.strategy = Exhaustive{4};
  cfg.parses = ParseMode::All;
  SimulatedTeacher<double> teacher(grammar_target(g), candidates(cfg, g.alphabet()), 1e-9);
  auto rep = learn<double>(teacher, g.alphabet());
  for (const auto& t : teacher.candidate_trees()) CHECK(rep.hypothesis.eval(t) == doctest::Approx(teacher.smq(t)));
}
