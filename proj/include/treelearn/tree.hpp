#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace treelearn {

/// Token used for the hole of a context in serialized form.
inline constexpr std::string_view kHoleToken = "<>";

/// Leaf tokens plus the largest permitted node arity.  Internal nodes are
/// anonymous, so the alphabet is fully described by these two things.
struct RankedAlphabet {
  std::vector<std::string> leaves;  // sorted, distinct
  std::size_t max_rank = 1;

  RankedAlphabet() = default;
  RankedAlphabet(std::vector<std::string> leaf_tokens, std::size_t rank);

  bool has_leaf(std::string_view token) const;
};

/// Returns true when `token` can be used as a leaf label.
bool is_valid_token(std::string_view token);

/// An immutable ranked tree whose internal nodes carry no label.  A tree may
/// contain hole leaves; `Context` wraps trees with exactly one hole.
/// Copies are cheap: subtrees are shared.
class Tree {
 public:
  static Tree leaf(std::string token);
  static Tree node(std::vector<Tree> children);
  static Tree hole();

  bool is_leaf() const { return n_->kind != Kind::Internal; }
  bool is_hole() const { return n_->kind == Kind::Hole; }
  bool is_node() const { return n_->kind == Kind::Internal; }

  /// Leaf token; empty for internal nodes.
  const std::string& label() const { return n_->label; }
  const std::vector<Tree>& children() const { return n_->children; }
  std::size_t arity() const { return n_->children.size(); }

  /// Number of nodes, counting leaves and holes.
  std::size_t size() const { return n_->size; }
  /// A leaf has height 1.
  std::size_t height() const { return n_->height; }
  std::size_t leaf_count() const { return n_->leaves; }
  std::size_t hole_count() const { return n_->holes; }

  /// Canonical serialization, cached.
  const std::string& str() const { return n_->text; }

  bool operator==(const Tree& other) const {
    return n_ == other.n_ || n_->text == other.n_->text;
  }
  bool operator!=(const Tree& other) const { return !(*this == other); }

 private:
  enum class Kind { Leaf, Hole, Internal };
  struct Node {
    Kind kind;
    std::string label;
    std::vector<Tree> children;
    std::size_t size = 1, height = 1, leaves = 0, holes = 0;
    std::string text;
  };
  explicit Tree(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  std::shared_ptr<const Node> n_;
};

/// Order by (size, height, serialization).
struct CanonicalLess {
  bool operator()(const Tree& a, const Tree& b) const;
};

struct TreeHash {
  std::size_t operator()(const Tree& t) const { return std::hash<std::string>{}(t.str()); }
};

/// A tree with exactly one hole.
class Context {
 public:
  /// The trivial context consisting of the hole alone.
  Context();
  /// Throws InputError unless `shape` has exactly one hole.
  explicit Context(Tree shape);

  const Tree& shape() const { return shape_; }
  const std::string& str() const { return shape_.str(); }
  std::size_t size() const { return shape_.size(); }
  /// Depth of the hole, the root being at depth 1.
  std::size_t hole_depth() const;

  bool operator==(const Context& other) const { return shape_ == other.shape_; }
  bool operator!=(const Context& other) const { return !(*this == other); }

 private:
  Tree shape_;
};

struct ContextLess {
  bool operator()(const Context& a, const Context& b) const {
    return CanonicalLess{}(a.shape(), b.shape());
  }
};

/// Plug `t` into the hole of `c`.
Tree compose(const Context& c, const Tree& t);
/// Plug `inner` into the hole of `outer`; the result has `inner`'s hole.
Context compose(const Context& outer, const Context& inner);

/// Leaf tokens from left to right (holes appear as "<>").
std::vector<std::string> yield(const Tree& t);

/// Parse a tree without holes.  With an alphabet, leaf tokens and arities
/// are validated against it.
Tree parse_tree(std::string_view text, const RankedAlphabet* alphabet = nullptr);
Tree parse_tree(std::string_view text, const RankedAlphabet& alphabet);
Context parse_context(std::string_view text, const RankedAlphabet* alphabet = nullptr);

/// Every distinct subtree of t, including t, in canonical order.
std::vector<Tree> subtrees(const Tree& t);

/// All leaves of the alphabet plus every node whose 1..p children are drawn
/// from `rows`, deduplicated and in canonical order.
std::vector<Tree> sigma_extension(const std::vector<Tree>& rows, const RankedAlphabet& alphabet);

/// Every one-level context: a node of arity 1..p with the hole at one position
/// and the remaining children drawn from `rows`.  Canonical order.
std::vector<Context> sigma_contexts(const std::vector<Tree>& rows, const RankedAlphabet& alphabet);

/// Right chain of n copies of token: a, (a a), (a (a a)), ...
Tree right_chain(const std::string& token, std::size_t n);

/// If t is a right chain (every left child a leaf, all leaves the same
/// token) return that token.
std::optional<std::string> right_chain_label(const Tree& t);

/// Distinct leaf tokens of t, sorted.
std::vector<std::string> leaf_tokens(const Tree& t);

/// Maximum arity of any internal node of t (0 for a leaf).
std::size_t max_arity(const Tree& t);

}  // namespace treelearn
