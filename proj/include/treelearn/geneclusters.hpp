#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "treelearn/tree.hpp"

namespace treelearn {

using GeneString = std::vector<std::string>;

/// Non-negative score of a contiguous substring.
using WeightFunction = std::function<double(std::span<const std::string>)>;

WeightFunction zero_weights();

/// w(x) = total count of corpus strings that contain x as a contiguous
/// substring, for |x| >= 2; 0 for single tokens.
class SubstringFrequency {
 public:
  SubstringFrequency() = default;
  explicit SubstringFrequency(const std::vector<std::pair<std::size_t, GeneString>>& corpus);

  double operator()(std::span<const std::string> x) const;
  WeightFunction function() const;

 private:
  std::unordered_map<std::string, double> counts_;
};

/// Replace every maximal run of k >= 2 equal tokens σ by the token "σ#k".
GeneString preprocess_runs(const GeneString& s);

/// If token has the form "σ#k" produced by preprocess_runs, return (σ, k).
std::optional<std::pair<std::string, std::size_t>> split_run_token(const std::string& token);

/// Weight function over preprocessed strings: each run token is scored as a
/// single copy of its base token.
WeightFunction lift_to_runs(WeightFunction w);

struct ScoredTree {
  Tree tree;
  double score;
};

/// Binary tree over s maximizing the recursive substring score
///   w_tree(s) = w(s)                                         if |s| <= 2
///   w_tree(s) = w(s) + max_i (w_tree(s[..i]) + w_tree(s[i..]))  otherwise,
/// ties going to the smallest split point.  Requires |s| >= 1.
ScoredTree optimal_tree(const GeneString& s, const WeightFunction& w);

/// Every leaf "σ#k" becomes a right chain of k leaves σ.
Tree expand_chains(const Tree& t);

/// preprocess_runs, optimal_tree under the lifted weights, expand_chains.
ScoredTree gene_tree(const GeneString& s, const WeightFunction& w);

/// Non-negative integer cost or infinity; addition saturates.
class EditCost {
 public:
  constexpr EditCost() = default;
  constexpr explicit EditCost(std::uint64_t v) : v_(v) {}
  static constexpr EditCost infinity() {
    EditCost c;
    c.v_ = kInf;
    return c;
  }

  constexpr bool is_infinite() const { return v_ == kInf; }
  constexpr std::uint64_t value() const { return v_; }

  friend constexpr EditCost operator+(EditCost a, EditCost b) {
    if (a.is_infinite() || b.is_infinite()) return infinity();
    return EditCost(a.v_ + b.v_);
  }
  friend constexpr bool operator==(EditCost a, EditCost b) { return a.v_ == b.v_; }
  friend constexpr bool operator<(EditCost a, EditCost b) { return a.v_ < b.v_; }

  std::string str() const { return is_infinite() ? "inf" : std::to_string(v_); }

 private:
  static constexpr std::uint64_t kInf = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t v_ = 0;
};

inline EditCost min(EditCost a, EditCost b) { return b < a ? b : a; }

/// Number of sibling swaps turning one tree into the other; infinite when
/// the shapes or leaf labels cannot be matched.
EditCost swap_distance(const Tree& t, const Tree& s);

/// Number of leaf duplications separating right-chain-homologous trees:
/// |leaves(t) - leaves(s)| for same-label right chains, summed child-wise
/// otherwise; infinite for incompatible trees.
EditCost duplication_distance(const Tree& t, const Tree& s);

enum class DistanceKind { Swap, Duplication };
EditCost distance(DistanceKind kind, const Tree& t, const Tree& s);

/// Strings file: one space-separated string per line, optionally prefixed by
/// "count<TAB>".  Blank lines are skipped.
std::vector<std::pair<std::size_t, GeneString>> read_strings(std::istream& in);

}  // namespace treelearn
