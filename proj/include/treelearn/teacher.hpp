#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "treelearn/geneclusters.hpp"
#include "treelearn/grammar.hpp"
#include "treelearn/learner.hpp"
#include "treelearn/mta.hpp"
#include "treelearn/rng.hpp"

namespace treelearn {

// ---------------------------------------------------------------------------
// Candidate trees for equivalence queries

/// Every string of length 1..l over the alphabet's leaves.
struct Exhaustive {
  std::size_t max_len = 1;
};

/// `count` strings drawn uniformly from all strings of length 1..s.
struct RandomSampling {
  std::size_t count = 0;
  std::size_t max_len = 1;
  std::uint64_t seed = 0;
};

/// Every tree obtained from a base tree by replacing each leaf with a right
/// chain of 1..d+1 copies of itself.
struct Duplications {
  std::vector<Tree> base;
  std::size_t max_dup = 0;
};

using Strategy = std::variant<Exhaustive, RandomSampling, Duplications>;

/// How a string becomes candidate trees: its optimal tree under a weight
/// function, or every bracketing with node arities 2..max_rank.
enum class ParseMode { Optimal, All };

struct CandidateConfig {
  Strategy strategy = Exhaustive{};
  ParseMode parses = ParseMode::Optimal;
  WeightFunction weights = zero_weights();
};

/// Strings of length 1..l, by length and then lexicographically.
std::vector<GeneString> exhaustive_strings(const RankedAlphabet& alphabet, std::size_t max_len);

/// Deterministic given the seed.
std::vector<GeneString> sampled_strings(const RankedAlphabet& alphabet, std::size_t count, std::size_t max_len,
                                        std::uint64_t seed);

/// Every tree with the given yield whose internal nodes have 2..max_rank
/// children.
std::vector<Tree> all_parses(const GeneString& s, std::size_t max_rank);

std::vector<Tree> exhaustive_candidates(const RankedAlphabet& alphabet, std::size_t max_len,
                                        const WeightFunction& w);
std::vector<Tree> sampling_candidates(const RankedAlphabet& alphabet, std::size_t count, std::size_t max_len,
                                      std::uint64_t seed, const WeightFunction& w);
std::vector<Tree> duplication_candidates(const std::vector<Tree>& base, std::size_t max_dup);

/// Candidate set of a configuration, deduplicated, in canonical order.
std::vector<Tree> candidates(const CandidateConfig& cfg, const RankedAlphabet& alphabet);

// ---------------------------------------------------------------------------
// Oracles

/// Answers membership queries from a target series and equivalence queries
/// by scanning a fixed candidate set in canonical order.  The first
/// candidate on which the hypothesis differs from the target by more than
/// epsilon is returned.
template <class S>
class SimulatedTeacher : public TeacherOracle<S> {
 public:
  using Target = std::function<S(const Tree&)>;

  SimulatedTeacher(Target target, std::vector<Tree> candidate_trees, S epsilon)
      : target_(std::move(target)), candidates_(std::move(candidate_trees)), epsilon_(std::move(epsilon)) {
    std::sort(candidates_.begin(), candidates_.end(), CanonicalLess{});
    candidates_.erase(std::unique(candidates_.begin(), candidates_.end()), candidates_.end());
  }

  S smq(const Tree& t) override {
    ++smq_calls_;
    auto it = memo_.find(t.str());
    if (it == memo_.end()) it = memo_.emplace(t.str(), target_(t)).first;
    return it->second;
  }

  std::optional<std::pair<Tree, S>> seq(const Mta<S>& h) override {
    ++seq_calls_;
    for (const auto& t : candidates_) {
      S truth = smq(t);
      S guess = h.eval(t);
      if (Num<S>::abs(guess - truth) > epsilon_) return std::make_pair(t, truth);
    }
    return std::nullopt;
  }

  const std::vector<Tree>& candidate_trees() const { return candidates_; }
  std::size_t smq_calls() const { return smq_calls_; }
  std::size_t seq_calls() const { return seq_calls_; }
  std::size_t distinct_queries() const { return memo_.size(); }
  const S& epsilon() const { return epsilon_; }

 private:
  Target target_;
  std::vector<Tree> candidates_;
  S epsilon_;
  std::unordered_map<std::string, S> memo_;
  std::size_t smq_calls_ = 0, seq_calls_ = 0;
};

/// 0 for exact targets given by a grammar or automaton, 1e-6 otherwise.
template <class S>
S default_epsilon(bool corpus_target) {
  if (Num<S>::exact && !corpus_target) return Num<S>::zero();
  return Num<S>::from_rational(Rational(1, 1000000));
}

template <class S>
typename SimulatedTeacher<S>::Target grammar_target(const Wcfg<S>& g) {
  auto ev = std::make_shared<GrammarEvaluator<S>>(g);
  return [ev](const Tree& t) { return ev->weight(t); };
}

template <class S>
typename SimulatedTeacher<S>::Target mta_target(const Mta<S>& a) {
  auto copy = std::make_shared<Mta<S>>(a);
  return [copy](const Tree& t) { return copy->eval(t); };
}

/// Corpus of trees with normalized frequencies.  A tree's value is
/// Σ_i f_i · q^{d(t, s_i)}, with q^∞ = 0.
template <class S>
class CorpusOracle {
 public:
  CorpusOracle(std::vector<std::pair<Tree, S>> corpus, S q, DistanceKind kind) : q_(std::move(q)), kind_(kind) {
    if (!(q_ > Num<S>::zero() && q_ < Num<S>::one())) throw InputError("decay factor must lie in (0,1)");
    S total = Num<S>::zero();
    for (const auto& [t, f] : corpus) {
      if (!(f > Num<S>::zero())) throw InputError("corpus frequencies must be positive");
      total += f;
    }
    for (auto& [t, f] : corpus) entries_.emplace_back(t, f / total);
  }

  S operator()(const Tree& t) const {
    S value = Num<S>::zero();
    for (const auto& [s, f] : entries_) {
      EditCost d = distance(kind_, t, s);
      if (d.is_infinite()) continue;
      S factor = f;
      for (std::uint64_t i = 0; i < d.value() && !Num<S>::is_zero(factor); ++i) factor *= q_;
      value += factor;
    }
    return value;
  }

  const std::vector<std::pair<Tree, S>>& entries() const { return entries_; }
  const S& decay() const { return q_; }
  DistanceKind distance_kind() const { return kind_; }

  /// The skeletal alphabet spanned by the corpus trees.
  RankedAlphabet alphabet() const {
    std::set<std::string> tokens;
    std::size_t rank = 1;
    for (const auto& [t, f] : entries_) {
      for (auto& tok : leaf_tokens(t)) tokens.insert(tok);
      rank = std::max(rank, max_arity(t));
    }
    return RankedAlphabet({tokens.begin(), tokens.end()}, rank);
  }

 private:
  std::vector<std::pair<Tree, S>> entries_;
  S q_;
  DistanceKind kind_;
};

/// Corpus file: "<frequency><TAB><tree>" per line; blank lines and lines
/// starting with '#' are skipped.
template <class S>
std::vector<std::pair<Tree, S>> read_corpus(std::istream& in) {
  std::vector<std::pair<Tree, S>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::skip_line(line)) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw InputError("corpus line " + std::to_string(lineno) + ": missing TAB");
    try {
      S f = Num<S>::parse(line.substr(0, tab));
      out.emplace_back(parse_tree(line.substr(tab + 1)), f);
    } catch (const InputError& e) {
      throw InputError("corpus line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (out.empty()) throw InputError("corpus is empty");
  return out;
}

}  // namespace treelearn
