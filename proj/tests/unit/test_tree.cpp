#include "doctest.h"
#include "treelearn/errors.hpp"
#include "treelearn/tree.hpp"

using namespace treelearn;

TEST_CASE("parse and print round trip") {
  RankedAlphabet al({"a", "b"}, 2);
  for (const char* text : {"a", "(a b)", "((a b) a)", "(a (b (a b)))", "(b)"}) {
    Tree t = parse_tree(text, al);
    CHECK(t.str() == text);
    CHECK(parse_tree(t.str(), al) == t);
  }
  CHECK(parse_tree("  ( a   ( b a ) ) ", al).str() == "(a (b a))");
}

TEST_CASE("parse rejects malformed input") {
  RankedAlphabet al({"a", "b"}, 2);
  CHECK_THROWS_AS(parse_tree("(a b", al), InputError);
  CHECK_THROWS_AS(parse_tree("a b", al), InputError);
  CHECK_THROWS_AS(parse_tree("()", al), InputError);
  CHECK_THROWS_AS(parse_tree("(a c)", al), InputError);
  CHECK_THROWS_AS(parse_tree("(a a a)", al), InputError);
  CHECK_THROWS_AS(parse_tree("(a <>)", al), InputError);
  CHECK_THROWS_AS(parse_tree("", al), InputError);
}

TEST_CASE("size, height and leaves") {
  Tree t = parse_tree("((a b) (a (a b)))");
  CHECK(t.size() == 9);
  CHECK(t.height() == 4);
  CHECK(t.leaf_count() == 5);
  CHECK(Tree::leaf("a").height() == 1);
  CHECK(yield(t) == std::vector<std::string>{"a", "b", "a", "a", "b"});
}

TEST_CASE("canonical order is size, then height, then text") {
  std::vector<Tree> ts{parse_tree("(a (a a))"), parse_tree("b"), parse_tree("(a a)"), parse_tree("a"),
                       parse_tree("((a a) a)"), parse_tree("((a))")};
  std::sort(ts.begin(), ts.end(), CanonicalLess{});
  std::vector<std::string> got;
  for (const auto& t : ts) got.push_back(t.str());
  CHECK(got == std::vector<std::string>{"a", "b", "(a a)", "((a))", "((a a) a)", "(a (a a))"});
}

TEST_CASE("contexts have exactly one hole and compose") {
  Context c = parse_context("(a <>)");
  CHECK(c.hole_depth() == 2);
  CHECK(Context().hole_depth() == 1);
  CHECK(compose(c, parse_tree("(b b)")).str() == "(a (b b))");
  Context d = parse_context("(<> b)");
  CHECK(compose(c, d).str() == "(a (<> b))");
  CHECK(compose(compose(c, d), parse_tree("a")) == compose(c, compose(d, parse_tree("a"))));
  CHECK(Context().str() == "<>");
  CHECK(compose(Context(), parse_tree("a")).str() == "a");
  CHECK_THROWS_AS(parse_context("(a b)"), InputError);
  CHECK_THROWS_AS(parse_context("(<> <>)"), InputError);
}

TEST_CASE("subtrees are distinct and canonical") {
  auto subs = subtrees(parse_tree("((a b) (a b))"));
  std::vector<std::string> got;
  for (const auto& t : subs) got.push_back(t.str());
  CHECK(got == std::vector<std::string>{"a", "b", "(a b)", "((a b) (a b))"});
}

TEST_CASE("one-step extension builds every node over the rows") {
  RankedAlphabet al({"a"}, 2);
  std::vector<Tree> rows{Tree::leaf("a"), parse_tree("(a a)")};
  auto ext = sigma_extension(rows, al);
  // The leaf a, two unary nodes and four binary nodes over the rows.
  CHECK(ext.size() == 7);
  CHECK(ext.front().str() == "a");
  CHECK(std::is_sorted(ext.begin(), ext.end(), CanonicalLess{}));
  auto ctx = sigma_contexts(rows, al);
  // rank 1: (<>), rank 2: hole in either slot with the other from 2 rows.
  CHECK(ctx.size() == 1 + 2 * 2);
}

TEST_CASE("right chains") {
  CHECK(right_chain("a", 1).str() == "a");
  CHECK(right_chain("a", 3).str() == "(a (a a))");
  CHECK(right_chain_label(parse_tree("(b (b b))")) == std::optional<std::string>("b"));
  CHECK_FALSE(right_chain_label(parse_tree("((b b) b)")).has_value());
  CHECK_FALSE(right_chain_label(parse_tree("(a (a b))")).has_value());
  CHECK(right_chain_label(parse_tree("a")) == std::optional<std::string>("a"));
}

TEST_CASE("alphabet validation") {
  CHECK_THROWS_AS(RankedAlphabet({}, 2), InputError);
  CHECK_THROWS_AS(RankedAlphabet({"a"}, 0), InputError);
  CHECK_THROWS_AS(RankedAlphabet({"a b"}, 1), InputError);
  RankedAlphabet al({"b", "a", "a"}, 1);
  CHECK(al.leaves == std::vector<std::string>{"a", "b"});
  CHECK(is_valid_token("a#3"));
  CHECK_FALSE(is_valid_token("<>"));
}
