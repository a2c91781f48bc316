#include "treelearn/geneclusters.hpp"

#include <cctype>
#include <memory>
#include <sstream>
#include <unordered_set>

#include "treelearn/errors.hpp"

namespace treelearn {

namespace {

std::string join_key(std::span<const std::string> x) {
  std::string key;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) key.push_back('\x1f');
    key += x[i];
  }
  return key;
}

bool children_compatible(const Tree& t, const Tree& s) {
  if (t.is_leaf() || s.is_leaf()) return t.is_leaf() && s.is_leaf() && t.label() == s.label();
  return t.arity() == s.arity();
}

}  // namespace

WeightFunction zero_weights() {
  return [](std::span<const std::string>) { return 0.0; };
}

SubstringFrequency::SubstringFrequency(const std::vector<std::pair<std::size_t, GeneString>>& corpus) {
  for (const auto& [count, s] : corpus) {
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = i + 2; j <= s.size(); ++j)
        seen.insert(join_key(std::span<const std::string>(s).subspan(i, j - i)));
    for (const auto& key : seen) counts_[key] += static_cast<double>(count);
  }
}

double SubstringFrequency::operator()(std::span<const std::string> x) const {
  if (x.size() < 2) return 0.0;
  auto it = counts_.find(join_key(x));
  return it == counts_.end() ? 0.0 : it->second;
}

WeightFunction SubstringFrequency::function() const {
  auto self = std::make_shared<SubstringFrequency>(*this);
  return [self](std::span<const std::string> x) { return (*self)(x); };
}

GeneString preprocess_runs(const GeneString& s) {
  GeneString out;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t j = i;
    while (j < s.size() && s[j] == s[i]) ++j;
    std::size_t k = j - i;
    out.push_back(k >= 2 ? s[i] + "#" + std::to_string(k) : s[i]);
    i = j;
  }
  return out;
}

std::optional<std::pair<std::string, std::size_t>> split_run_token(const std::string& token) {
  auto hash = token.rfind('#');
  if (hash == std::string::npos || hash == 0 || hash + 1 >= token.size()) return std::nullopt;
  std::size_t k = 0;
  for (std::size_t i = hash + 1; i < token.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(token[i]))) return std::nullopt;
    k = k * 10 + static_cast<std::size_t>(token[i] - '0');
    if (k > 1000000) return std::nullopt;
  }
  if (k < 2) return std::nullopt;
  return std::make_pair(token.substr(0, hash), k);
}

WeightFunction lift_to_runs(WeightFunction w) {
  return [w = std::move(w)](std::span<const std::string> x) {
    std::vector<std::string> base(x.begin(), x.end());
    for (auto& tok : base)
      if (auto run = split_run_token(tok)) tok = run->first;
    return w(base);
  };
}

ScoredTree optimal_tree(const GeneString& s, const WeightFunction& w) {
  const std::size_t n = s.size();
  if (n == 0) throw InputError("optimal_tree: empty string");
  std::span<const std::string> all(s);
  // best[i][len-1] = w_tree(s[i .. i+len)), split[i][len-1] = chosen split length
  std::vector<std::vector<double>> best(n, std::vector<double>(n + 1, 0.0));
  std::vector<std::vector<std::size_t>> split(n, std::vector<std::size_t>(n + 1, 0));
  for (std::size_t len = 1; len <= n; ++len)
    for (std::size_t i = 0; i + len <= n; ++i) {
      double own = w(all.subspan(i, len));
      if (len <= 2) {
        best[i][len] = own;
        continue;
      }
      double top = 0;
      std::size_t arg = 0;
      for (std::size_t k = 1; k < len; ++k) {
        double cand = best[i][k] + best[i + k][len - k];
        if (arg == 0 || cand > top) top = cand, arg = k;
      }
      best[i][len] = own + top;
      split[i][len] = arg;
    }
  std::function<Tree(std::size_t, std::size_t)> build = [&](std::size_t i, std::size_t len) -> Tree {
    if (len == 1) return Tree::leaf(s[i]);
    if (len == 2) return Tree::node({Tree::leaf(s[i]), Tree::leaf(s[i + 1])});
    std::size_t k = split[i][len];
    return Tree::node({build(i, k), build(i + k, len - k)});
  };
  return {build(0, n), best[0][n]};
}

Tree expand_chains(const Tree& t) {
  if (t.is_hole()) return t;
  if (t.is_leaf()) {
    if (auto run = split_run_token(t.label())) return right_chain(run->first, run->second);
    return t;
  }
  std::vector<Tree> kids;
  for (const auto& c : t.children()) kids.push_back(expand_chains(c));
  return Tree::node(std::move(kids));
}

ScoredTree gene_tree(const GeneString& s, const WeightFunction& w) {
  ScoredTree st = optimal_tree(preprocess_runs(s), lift_to_runs(w));
  st.tree = expand_chains(st.tree);
  return st;
}

EditCost swap_distance(const Tree& t, const Tree& s) {
  if (t.is_leaf() && s.is_leaf()) return t.label() == s.label() ? EditCost(0) : EditCost::infinity();
  if (!children_compatible(t, s)) return EditCost::infinity();
  const auto& tc = t.children();
  const auto& sc = s.children();
  EditCost straight(0);
  for (std::size_t i = 0; i < tc.size(); ++i) straight = straight + swap_distance(tc[i], sc[i]);
  if (tc.size() != 2) return straight;
  EditCost crossed = swap_distance(tc[0], sc[1]) + swap_distance(tc[1], sc[0]) + EditCost(1);
  return min(straight, crossed);
}

EditCost duplication_distance(const Tree& t, const Tree& s) {
  auto lt = right_chain_label(t), ls = right_chain_label(s);
  if (lt && ls && *lt == *ls) {
    std::size_t a = t.leaf_count(), b = s.leaf_count();
    return EditCost(a > b ? a - b : b - a);
  }
  if (!children_compatible(t, s) || t.is_leaf()) return EditCost::infinity();
  EditCost total(0);
  for (std::size_t i = 0; i < t.arity(); ++i)
    total = total + duplication_distance(t.children()[i], s.children()[i]);
  return total;
}

EditCost distance(DistanceKind kind, const Tree& t, const Tree& s) {
  return kind == DistanceKind::Swap ? swap_distance(t, s) : duplication_distance(t, s);
}

std::vector<std::pair<std::size_t, GeneString>> read_strings(std::istream& in) {
  std::vector<std::pair<std::size_t, GeneString>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::size_t count = 1;
    std::string body = line;
    if (auto tab = line.find('\t'); tab != std::string::npos) {
      std::string head = line.substr(0, tab);
      try {
        std::size_t used = 0;
        long long c = std::stoll(head, &used);
        if (used != head.size() || c <= 0) throw std::invalid_argument("count");
        count = static_cast<std::size_t>(c);
      } catch (const std::exception&) {
        throw InputError("strings line " + std::to_string(lineno) + ": bad count '" + head + "'");
      }
      body = line.substr(tab + 1);
    }
    std::istringstream is(body);
    GeneString s;
    for (std::string tok; is >> tok;) {
      if (!is_valid_token(tok))
        throw InputError("strings line " + std::to_string(lineno) + ": invalid token '" + tok + "'");
      s.push_back(tok);
    }
    if (!s.empty()) out.emplace_back(count, std::move(s));
  }
  return out;
}

}  // namespace treelearn
