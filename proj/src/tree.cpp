#include "treelearn/tree.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_set>

#include "treelearn/errors.hpp"

namespace treelearn {

RankedAlphabet::RankedAlphabet(std::vector<std::string> leaf_tokens, std::size_t rank)
    : leaves(std::move(leaf_tokens)), max_rank(rank) {
  std::sort(leaves.begin(), leaves.end());
  leaves.erase(std::unique(leaves.begin(), leaves.end()), leaves.end());
  if (leaves.empty()) throw InputError("alphabet has no leaf symbols");
  if (max_rank < 1) throw InputError("alphabet rank must be at least 1");
  for (const auto& tok : leaves)
    if (!is_valid_token(tok)) throw InputError("invalid leaf token '" + tok + "'");
}

bool RankedAlphabet::has_leaf(std::string_view token) const {
  return std::binary_search(leaves.begin(), leaves.end(), token);
}

bool is_valid_token(std::string_view token) {
  if (token.empty() || token == kHoleToken) return false;
  for (unsigned char ch : token)
    if (std::isspace(ch) || ch == '(' || ch == ')') return false;
  return true;
}

Tree Tree::leaf(std::string token) {
  if (!is_valid_token(token)) throw InputError("invalid leaf token '" + token + "'");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Leaf;
  n->leaves = 1;
  n->text = token;
  n->label = std::move(token);
  return Tree(std::move(n));
}

Tree Tree::hole() {
  static const Tree h = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Hole;
    n->holes = 1;
    n->text = std::string(kHoleToken);
    return Tree(std::move(n));
  }();
  return h;
}

Tree Tree::node(std::vector<Tree> children) {
  if (children.empty()) throw InputError("internal node without children");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Internal;
  std::size_t height = 0;
  std::size_t text_len = 1 + children.size();
  for (const auto& c : children) {
    n->size += c.size();
    n->leaves += c.leaf_count();
    n->holes += c.hole_count();
    height = std::max(height, c.height());
    text_len += c.str().size();
  }
  n->height = height + 1;
  n->text.reserve(text_len);
  n->text.push_back('(');
  for (std::size_t i = 0; i < children.size(); ++i) {
    if (i) n->text.push_back(' ');
    n->text += children[i].str();
  }
  n->text.push_back(')');
  n->children = std::move(children);
  return Tree(std::move(n));
}

bool CanonicalLess::operator()(const Tree& a, const Tree& b) const {
  if (a.size() != b.size()) return a.size() < b.size();
  if (a.height() != b.height()) return a.height() < b.height();
  return a.str() < b.str();
}

Context::Context() : shape_(Tree::hole()) {}

Context::Context(Tree shape) : shape_(std::move(shape)) {
  if (shape_.hole_count() != 1)
    throw InputError("context must contain exactly one hole: " + shape_.str());
}

std::size_t Context::hole_depth() const {
  std::size_t depth = 1;
  const Tree* cur = &shape_;
  while (!cur->is_hole()) {
    for (const auto& c : cur->children())
      if (c.hole_count()) {
        cur = &c;
        break;
      }
    ++depth;
  }
  return depth;
}

namespace {

Tree plug(const Tree& shape, const Tree& t) {
  if (shape.is_hole()) return t;
  std::vector<Tree> kids = shape.children();
  for (auto& k : kids)
    if (k.hole_count()) {
      k = plug(k, t);
      break;
    }
  return Tree::node(std::move(kids));
}

class Parser {
 public:
  Parser(std::string_view text, const RankedAlphabet* alphabet) : s_(text), alpha_(alphabet) {}

  Tree run() {
    Tree t = parse();
    skip();
    if (pos_ != s_.size()) fail("trailing characters");
    return t;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw InputError("tree syntax error at offset " + std::to_string(pos_) + ": " + why);
  }

  Tree parse() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (s_[pos_] == ')') fail("unbalanced ')'");
    if (s_[pos_] == '(') {
      ++pos_;
      std::vector<Tree> kids;
      for (;;) {
        skip();
        if (pos_ >= s_.size()) fail("missing ')'");
        if (s_[pos_] == ')') {
          ++pos_;
          break;
        }
        kids.push_back(parse());
      }
      if (kids.empty()) fail("empty node '()'");
      if (alpha_ && kids.size() > alpha_->max_rank)
        fail("arity " + std::to_string(kids.size()) + " exceeds max rank " +
             std::to_string(alpha_->max_rank));
      return Tree::node(std::move(kids));
    }
    std::size_t start = pos_;
    while (pos_ < s_.size()) {
      char ch = s_[pos_];
      if (std::isspace(static_cast<unsigned char>(ch)) || ch == '(' || ch == ')') break;
      ++pos_;
    }
    std::string_view tok = s_.substr(start, pos_ - start);
    if (tok == kHoleToken) return Tree::hole();
    if (alpha_ && !alpha_->has_leaf(tok)) fail("unknown token '" + std::string(tok) + "'");
    return Tree::leaf(std::string(tok));
  }

  std::string_view s_;
  const RankedAlphabet* alpha_;
  std::size_t pos_ = 0;
};

void collect_yield(const Tree& t, std::vector<std::string>& out) {
  if (t.is_leaf()) {
    out.push_back(t.str());
    return;
  }
  for (const auto& c : t.children()) collect_yield(c, out);
}

void collect_subtrees(const Tree& t, std::unordered_set<std::string>& seen, std::vector<Tree>& out) {
  if (!seen.insert(t.str()).second) return;
  out.push_back(t);
  for (const auto& c : t.children()) collect_subtrees(c, seen, out);
}

void collect_labels(const Tree& t, std::set<std::string>& out) {
  if (t.is_leaf() && !t.is_hole()) out.insert(t.label());
  for (const auto& c : t.children()) collect_labels(c, out);
}

// Calls f on every tuple of length k over rows.
template <class F>
void for_each_tuple(const std::vector<Tree>& rows, std::size_t k, F&& f) {
  if (rows.empty()) return;
  std::vector<std::size_t> idx(k, 0);
  std::vector<Tree> tuple(k, rows[0]);
  for (;;) {
    for (std::size_t i = 0; i < k; ++i) tuple[i] = rows[idx[i]];
    f(tuple);
    std::size_t pos = k;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < rows.size()) break;
      idx[pos] = 0;
      if (pos == 0) return;
    }
    if (k == 0) return;
  }
}

}  // namespace

Tree compose(const Context& c, const Tree& t) { return plug(c.shape(), t); }

Context compose(const Context& outer, const Context& inner) {
  return Context(plug(outer.shape(), inner.shape()));
}

std::vector<std::string> yield(const Tree& t) {
  std::vector<std::string> out;
  collect_yield(t, out);
  return out;
}

Tree parse_tree(std::string_view text, const RankedAlphabet* alphabet) {
  Tree t = Parser(text, alphabet).run();
  if (t.hole_count()) throw InputError("unexpected hole in tree: " + std::string(text));
  return t;
}

Tree parse_tree(std::string_view text, const RankedAlphabet& alphabet) {
  return parse_tree(text, &alphabet);
}

Context parse_context(std::string_view text, const RankedAlphabet* alphabet) {
  return Context(Parser(text, alphabet).run());
}

std::vector<Tree> subtrees(const Tree& t) {
  std::unordered_set<std::string> seen;
  std::vector<Tree> out;
  collect_subtrees(t, seen, out);
  std::sort(out.begin(), out.end(), CanonicalLess{});
  return out;
}

std::vector<Tree> sigma_extension(const std::vector<Tree>& rows, const RankedAlphabet& alphabet) {
  std::vector<Tree> out;
  for (const auto& tok : alphabet.leaves) out.push_back(Tree::leaf(tok));
  for (std::size_t k = 1; k <= alphabet.max_rank; ++k)
    for_each_tuple(rows, k, [&](const std::vector<Tree>& tuple) { out.push_back(Tree::node(tuple)); });
  std::sort(out.begin(), out.end(), CanonicalLess{});
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Context> sigma_contexts(const std::vector<Tree>& rows, const RankedAlphabet& alphabet) {
  std::vector<Context> out;
  for (std::size_t k = 1; k <= alphabet.max_rank; ++k) {
    for (std::size_t hole = 0; hole < k; ++hole) {
      if (k == 1) {
        out.emplace_back(Tree::node({Tree::hole()}));
        continue;
      }
      for_each_tuple(rows, k - 1, [&](const std::vector<Tree>& tuple) {
        std::vector<Tree> kids(tuple.begin(), tuple.end());
        kids.insert(kids.begin() + static_cast<std::ptrdiff_t>(hole), Tree::hole());
        out.emplace_back(Tree::node(std::move(kids)));
      });
    }
  }
  std::sort(out.begin(), out.end(), ContextLess{});
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Tree right_chain(const std::string& token, std::size_t n) {
  if (n == 0) throw InputError("right chain needs at least one leaf");
  Tree t = Tree::leaf(token);
  for (std::size_t i = 1; i < n; ++i) t = Tree::node({Tree::leaf(token), t});
  return t;
}

std::optional<std::string> right_chain_label(const Tree& t) {
  if (t.is_hole()) return std::nullopt;
  if (t.is_leaf()) return t.label();
  if (t.arity() != 2 || !t.children()[0].is_leaf() || t.children()[0].is_hole()) return std::nullopt;
  auto rest = right_chain_label(t.children()[1]);
  if (!rest || *rest != t.children()[0].label()) return std::nullopt;
  return rest;
}

std::vector<std::string> leaf_tokens(const Tree& t) {
  std::set<std::string> labels;
  collect_labels(t, labels);
  return {labels.begin(), labels.end()};
}

std::size_t max_arity(const Tree& t) {
  std::size_t best = t.arity();
  for (const auto& c : t.children()) best = std::max(best, max_arity(c));
  return best;
}

}  // namespace treelearn
