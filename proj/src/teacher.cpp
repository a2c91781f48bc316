#include "treelearn/teacher.hpp"

#include <cmath>
#include <map>

namespace treelearn {

std::vector<GeneString> exhaustive_strings(const RankedAlphabet& alphabet, std::size_t max_len) {
  std::vector<GeneString> out;
  const auto& sigma = alphabet.leaves;
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<std::size_t> idx(len, 0);
    for (;;) {
      GeneString s(len);
      for (std::size_t i = 0; i < len; ++i) s[i] = sigma[idx[i]];
      out.push_back(std::move(s));
      std::size_t pos = len;
      while (pos > 0 && ++idx[pos - 1] == sigma.size()) idx[--pos] = 0;
      if (pos == 0) break;
    }
  }
  return out;
}

std::vector<GeneString> sampled_strings(const RankedAlphabet& alphabet, std::size_t count, std::size_t max_len,
                                        std::uint64_t seed) {
  std::vector<GeneString> out;
  if (count == 0 || max_len == 0) return out;
  const std::uint64_t n = alphabet.leaves.size();
  // Number of strings of each length, if the total fits in 64 bits.
  std::vector<std::uint64_t> per_len(max_len + 1, 0);
  bool fits = true;
  std::uint64_t total = 0, pw = 1;
  for (std::size_t len = 1; len <= max_len && fits; ++len) {
    if (pw > UINT64_MAX / n) {
      fits = false;
      break;
    }
    pw *= n;
    per_len[len] = pw;
    if (total > UINT64_MAX - pw) fits = false;
    total += pw;
  }
  CounterRng rng(seed);
  for (std::size_t r = 0; r < count; ++r) {
    std::size_t len = max_len;
    if (fits) {
      std::uint64_t x = rng.below(total);
      for (len = 1; len <= max_len; ++len) {
        if (x < per_len[len]) break;
        x -= per_len[len];
      }
    } else {
      // P(len = k) = n^k / Σ_j n^j, computed relative to the longest length.
      double u = static_cast<double>(rng.next() >> 11) * 0x1.0p-53, acc = 0, norm = 0;
      for (std::size_t k = 1; k <= max_len; ++k) norm += std::pow(static_cast<double>(n), -static_cast<double>(max_len - k));
      for (std::size_t k = 1; k <= max_len; ++k) {
        acc += std::pow(static_cast<double>(n), -static_cast<double>(max_len - k)) / norm;
        if (u < acc) {
          len = k;
          break;
        }
      }
    }
    GeneString s(len);
    for (std::size_t i = 0; i < len; ++i) s[i] = alphabet.leaves[rng.below(n)];
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

class ParseEnumerator {
 public:
  ParseEnumerator(const GeneString& s, std::size_t max_rank) : s_(s), p_(max_rank) {}

  const std::vector<Tree>& span(std::size_t i, std::size_t len) {
    auto key = std::make_pair(i, len);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::vector<Tree> out;
    if (len == 1) {
      out.push_back(Tree::leaf(s_[i]));
    } else {
      std::vector<Tree> kids;
      split(i, len, kids, out);
    }
    return memo_.emplace(key, std::move(out)).first->second;
  }

 private:
  // Extend `kids` with parses of consecutive parts covering s[i, i+len).
  void split(std::size_t i, std::size_t len, std::vector<Tree>& kids, std::vector<Tree>& out) {
    if (len == 0) {
      if (kids.size() >= 2) out.push_back(Tree::node(kids));
      return;
    }
    if (kids.size() == p_) return;
    std::size_t first_max = kids.empty() ? len - 1 : len;
    for (std::size_t part = 1; part <= first_max; ++part) {
      std::vector<Tree> options = span(i, part);
      for (const auto& t : options) {
        kids.push_back(t);
        split(i + part, len - part, kids, out);
        kids.pop_back();
      }
    }
  }

  const GeneString& s_;
  std::size_t p_;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Tree>> memo_;
};

Tree duplicate_leaves(const Tree& t, const std::vector<std::size_t>& copies, std::size_t& next) {
  if (t.is_leaf()) return right_chain(t.label(), 1 + copies[next++]);
  std::vector<Tree> kids;
  for (const auto& c : t.children()) kids.push_back(duplicate_leaves(c, copies, next));
  return Tree::node(std::move(kids));
}

}  // namespace

std::vector<Tree> all_parses(const GeneString& s, std::size_t max_rank) {
  if (s.empty()) return {};
  ParseEnumerator e(s, max_rank);
  return e.span(0, s.size());
}

std::vector<Tree> exhaustive_candidates(const RankedAlphabet& alphabet, std::size_t max_len,
                                        const WeightFunction& w) {
  std::vector<Tree> out;
  for (const auto& s : exhaustive_strings(alphabet, max_len)) out.push_back(optimal_tree(s, w).tree);
  return out;
}

std::vector<Tree> sampling_candidates(const RankedAlphabet& alphabet, std::size_t count, std::size_t max_len,
                                      std::uint64_t seed, const WeightFunction& w) {
  std::vector<Tree> out;
  for (const auto& s : sampled_strings(alphabet, count, max_len, seed)) out.push_back(optimal_tree(s, w).tree);
  return out;
}

std::vector<Tree> duplication_candidates(const std::vector<Tree>& base, std::size_t max_dup) {
  std::vector<Tree> out;
  for (const auto& t : base) {
    const std::size_t leaves = t.leaf_count();
    std::vector<std::size_t> copies(leaves, 0);
    for (;;) {
      std::size_t next = 0;
      out.push_back(duplicate_leaves(t, copies, next));
      std::size_t pos = leaves;
      while (pos > 0 && ++copies[pos - 1] > max_dup) copies[--pos] = 0;
      if (pos == 0) break;
    }
  }
  return out;
}

std::vector<Tree> candidates(const CandidateConfig& cfg, const RankedAlphabet& alphabet) {
  std::vector<Tree> out;
  auto from_strings = [&](const std::vector<GeneString>& strings) {
    for (const auto& s : strings) {
      if (cfg.parses == ParseMode::Optimal) {
        out.push_back(optimal_tree(s, cfg.weights).tree);
      } else {
        for (auto& t : all_parses(s, alphabet.max_rank)) out.push_back(std::move(t));
      }
    }
  };
  if (const auto* ex = std::get_if<Exhaustive>(&cfg.strategy)) {
    from_strings(exhaustive_strings(alphabet, ex->max_len));
  } else if (const auto* rs = std::get_if<RandomSampling>(&cfg.strategy)) {
    from_strings(sampled_strings(alphabet, rs->count, rs->max_len, rs->seed));
  } else {
    const auto& dup = std::get<Duplications>(cfg.strategy);
    out = duplication_candidates(dup.base, dup.max_dup);
  }
  std::sort(out.begin(), out.end(), CanonicalLess{});
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace treelearn
