#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "treelearn/errors.hpp"
#include "treelearn/mta.hpp"
#include "treelearn/scalar.hpp"
#include "treelearn/tree.hpp"

namespace treelearn {

// Weighted context-free grammars over skeletal trees.
//
// A rule's role in a derivation depends on its right-hand side:
//   N -> a          lexical: tags a leaf `a` with N.
//   N -> M          chain: N derives whatever M derives, no tree node.
//   N -> X1 .. Xk   (k >= 2) node rule: an internal node of arity k.
//   N -> ( X )      bracketed: explicit node, needed for arity 1.
// Terminals inside node rules stand for bare leaves.

struct GrammarSymbol {
  bool terminal = false;
  std::size_t index = 0;
  bool operator==(const GrammarSymbol& o) const { return terminal == o.terminal && index == o.index; }
  bool operator<(const GrammarSymbol& o) const {
    return terminal != o.terminal ? terminal < o.terminal : index < o.index;
  }
};

enum class RuleKind { Lexical, Chain, Node };

template <class S>
struct Rule {
  std::size_t lhs = 0;
  std::vector<GrammarSymbol> rhs;
  bool node = false;
  S weight{};

  RuleKind kind() const {
    if (node) return RuleKind::Node;
    return rhs.front().terminal ? RuleKind::Lexical : RuleKind::Chain;
  }
};

template <class S>
class Wcfg {
 public:
  Wcfg() = default;

  /// Returns the index of `name`, adding it if new.  The first nonterminal
  /// added is the start symbol.
  std::size_t add_nonterminal(const std::string& name) {
    if (auto i = nonterminal_index(name)) return *i;
    if (terminal_index(name)) throw InputError("symbol '" + name + "' is already a terminal");
    nt_index_.emplace(name, nonterminals_.size());
    nonterminals_.push_back(name);
    return nonterminals_.size() - 1;
  }

  std::size_t add_terminal(const std::string& name) {
    if (auto i = terminal_index(name)) return *i;
    if (nonterminal_index(name)) throw InputError("symbol '" + name + "' is already a nonterminal");
    if (!is_valid_token(name)) throw InputError("invalid terminal '" + name + "'");
    t_index_.emplace(name, terminals_.size());
    terminals_.push_back(name);
    return terminals_.size() - 1;
  }

  /// Rules of length one are plain (lexical or chain) unless `node` is set;
  /// longer right-hand sides are always node rules.
  void add_rule(std::size_t lhs, std::vector<GrammarSymbol> rhs, bool node, S weight) {
    if (rhs.empty()) throw InputError("empty right-hand side");
    if (lhs >= nonterminals_.size()) throw InputError("rule lhs out of range");
    for (const auto& sym : rhs)
      if (sym.index >= (sym.terminal ? terminals_.size() : nonterminals_.size()))
        throw InputError("rule symbol out of range");
    Rule<S> r;
    r.lhs = lhs;
    r.node = node || rhs.size() >= 2;
    r.rhs = std::move(rhs);
    r.weight = std::move(weight);
    rules_.push_back(std::move(r));
  }

  const std::vector<std::string>& nonterminals() const { return nonterminals_; }
  const std::vector<std::string>& terminals() const { return terminals_; }
  const std::vector<Rule<S>>& rules() const { return rules_; }
  std::vector<Rule<S>>& mutable_rules() { return rules_; }
  std::size_t start() const { return 0; }

  std::optional<std::size_t> nonterminal_index(const std::string& name) const {
    auto it = nt_index_.find(name);
    if (it == nt_index_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::size_t> terminal_index(const std::string& name) const {
    auto it = t_index_.find(name);
    if (it == t_index_.end()) return std::nullopt;
    return it->second;
  }

  std::string symbol_name(const GrammarSymbol& s) const {
    return s.terminal ? terminals_.at(s.index) : nonterminals_.at(s.index);
  }

  /// Largest node-rule arity (at least 1).
  std::size_t max_arity() const {
    std::size_t p = 1;
    for (const auto& r : rules_)
      if (r.node) p = std::max(p, r.rhs.size());
    return p;
  }

  /// The skeletal alphabet spanned by the grammar.
  RankedAlphabet alphabet() const { return RankedAlphabet(terminals_, max_arity()); }

  /// Nonterminals ordered so that the target of every chain rule comes
  /// before its source.  Throws InputError on a cycle of chain rules.
  std::vector<std::size_t> chain_order() const {
    const std::size_t n = nonterminals_.size();
    std::vector<std::vector<std::size_t>> succ(n);
    for (const auto& r : rules_)
      if (r.kind() == RuleKind::Chain) succ[r.lhs].push_back(r.rhs[0].index);
    std::vector<int> state(n, 0);
    std::vector<std::size_t> order;
    std::vector<std::pair<std::size_t, std::size_t>> stack;
    for (std::size_t root = 0; root < n; ++root) {
      if (state[root]) continue;
      stack.push_back({root, 0});
      state[root] = 1;
      while (!stack.empty()) {
        auto& [v, i] = stack.back();
        if (i < succ[v].size()) {
          std::size_t w = succ[v][i++];
          if (state[w] == 1)
            throw InputError("cyclic chain rules through nonterminal '" + nonterminals_[w] + "'");
          if (state[w] == 0) {
            state[w] = 1;
            stack.push_back({w, 0});
          }
        } else {
          state[v] = 2;
          order.push_back(v);
          stack.pop_back();
        }
      }
    }
    return order;
  }

 private:
  std::vector<std::string> nonterminals_;
  std::vector<std::string> terminals_;
  std::map<std::string, std::size_t> nt_index_, t_index_;
  std::vector<Rule<S>> rules_;
};

// ---------------------------------------------------------------------------
// Text format

namespace detail {

inline std::string strip_comment(const std::string& line) {
  for (std::size_t i = 0; i < line.size(); ++i)
    if (line[i] == '#' && (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1]))))
      return line.substr(0, i);
  return line;
}

inline std::vector<std::string> rhs_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == '(' || ch == ')' || std::isspace(static_cast<unsigned char>(ch))) {
      if (!cur.empty()) out.push_back(cur), cur.clear();
      if (ch == '(' || ch == ')') out.push_back(std::string(1, ch));
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace detail

/// Parse the grammar text format:
///   start: S                 (optional; otherwise the first rule's lhs)
///   N -> X Y [0.25]          (weight optional, default 1)
///   N -> ( X ) [1/2]         (explicit unary node)
///   # comment
/// Symbols that occur as a left-hand side are nonterminals, all others are
/// terminals.
template <class S>
Wcfg<S> read_wcfg(std::istream& in) {
  struct Raw {
    std::string lhs;
    std::vector<std::string> rhs;
    bool node;
    S weight;
    std::size_t line;
  };
  std::vector<Raw> raws;
  std::optional<std::string> start;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& why) {
    return InputError("grammar line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::string body = detail::strip_comment(line);
    auto first = body.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    body = body.substr(first);
    if (body.rfind("start:", 0) == 0) {
      auto toks = detail::split_ws(body.substr(6));
      if (toks.size() != 1) throw fail("expected 'start: <nonterminal>'");
      if (start) throw fail("duplicate start line");
      start = toks[0];
      continue;
    }
    auto arrow = body.find("->");
    if (arrow == std::string::npos) throw fail("expected '->'");
    auto lhs_toks = detail::split_ws(body.substr(0, arrow));
    if (lhs_toks.size() != 1) throw fail("expected a single left-hand side symbol");
    std::string rest = body.substr(arrow + 2);
    S weight = Num<S>::one();
    if (auto open = rest.find('['); open != std::string::npos) {
      auto close = rest.find(']', open);
      if (close == std::string::npos) throw fail("unterminated weight");
      if (rest.find_first_not_of(" \t\r", close + 1) != std::string::npos) throw fail("text after weight");
      try {
        weight = Num<S>::parse(rest.substr(open + 1, close - open - 1));
      } catch (const InputError& e) {
        throw fail(e.what());
      }
      rest = rest.substr(0, open);
    }
    auto toks = detail::rhs_tokens(rest);
    bool node = false;
    if (!toks.empty() && toks.front() == "(") {
      if (toks.back() != ")") throw fail("unbalanced parentheses in right-hand side");
      toks = std::vector<std::string>(toks.begin() + 1, toks.end() - 1);
      node = true;
    }
    for (const auto& t : toks)
      if (t == "(" || t == ")") throw fail("nested parentheses are not allowed in a rule");
    if (toks.empty()) throw fail("empty right-hand side");
    raws.push_back({lhs_toks[0], toks, node, weight, lineno});
  }
  Wcfg<S> g;
  if (raws.empty() && !start) return g;
  g.add_nonterminal(start ? *start : raws.front().lhs);
  for (const auto& r : raws) g.add_nonterminal(r.lhs);
  std::set<std::string> term_names;
  for (const auto& r : raws)
    for (const auto& s : r.rhs)
      if (!g.nonterminal_index(s)) term_names.insert(s);
  for (const auto& t : term_names) {
    lineno = 0;
    if (!is_valid_token(t)) throw InputError("grammar: invalid terminal '" + t + "'");
    g.add_terminal(t);
  }
  for (const auto& r : raws) {
    std::vector<GrammarSymbol> rhs;
    for (const auto& s : r.rhs) {
      if (auto i = g.nonterminal_index(s))
        rhs.push_back({false, *i});
      else
        rhs.push_back({true, *g.terminal_index(s)});
    }
    g.add_rule(*g.nonterminal_index(r.lhs), std::move(rhs), r.node, r.weight);
  }
  g.chain_order();
  return g;
}

template <class S>
Wcfg<S> wcfg_from_string(const std::string& text) {
  std::istringstream is(text);
  return read_wcfg<S>(is);
}

template <class S>
void write_wcfg(std::ostream& out, const Wcfg<S>& g) {
  if (g.nonterminals().empty()) return;
  out << "start: " << g.nonterminals()[0] << "\n";
  for (const auto& r : g.rules()) {
    out << g.nonterminals()[r.lhs] << " ->";
    bool bracket = r.node && r.rhs.size() == 1;
    if (bracket) out << " (";
    for (const auto& s : r.rhs) out << ' ' << g.symbol_name(s);
    if (bracket) out << " )";
    out << " [" << format_value(r.weight) << "]\n";
  }
}

template <class S>
std::string wcfg_to_string(const Wcfg<S>& g) {
  std::ostringstream os;
  write_wcfg(os, g);
  return os.str();
}

template <class To, class From>
Wcfg<To> convert_wcfg(const Wcfg<From>& g) {
  Wcfg<To> out;
  for (const auto& n : g.nonterminals()) out.add_nonterminal(n);
  for (const auto& t : g.terminals()) out.add_terminal(t);
  for (const auto& r : g.rules())
    out.add_rule(r.lhs, r.rhs, r.node, Num<To>::from_rational(Num<From>::to_rational(r.weight)));
  return out;
}

// ---------------------------------------------------------------------------
// Tree weights

/// Bottom-up computation of the per-nonterminal weight of skeletal trees:
/// entry N is the total weight of all derivations of the tree from N.
/// Results are memoized per subtree.
template <class S>
class GrammarEvaluator {
 public:
  explicit GrammarEvaluator(Wcfg<S> g) : g_(std::move(g)), order_(g_.chain_order()) {
    lexical_.resize(g_.terminals().size());
    chains_.resize(g_.nonterminals().size());
    for (std::size_t i = 0; i < g_.rules().size(); ++i) {
      const auto& r = g_.rules()[i];
      switch (r.kind()) {
        case RuleKind::Lexical: lexical_[r.rhs[0].index].push_back(i); break;
        case RuleKind::Chain: chains_[r.lhs].push_back(i); break;
        case RuleKind::Node:
          if (node_.size() < r.rhs.size() + 1) node_.resize(r.rhs.size() + 1);
          node_[r.rhs.size()].push_back(i);
          break;
      }
    }
  }

  const Wcfg<S>& grammar() const { return g_; }

  const Vector<S>& weights(const Tree& t) {
    if (auto it = memo_.find(t.str()); it != memo_.end()) return it->second;
    Vector<S> w = compute(t);
    if (memo_.size() > 2000000) memo_.clear();
    return memo_.emplace(t.str(), std::move(w)).first->second;
  }

  S weight(const Tree& t) {
    const auto& w = weights(t);
    return w.empty() ? Num<S>::zero() : w[g_.start()];
  }

 private:
  Vector<S> compute(const Tree& t) {
    const std::size_t n = g_.nonterminals().size();
    Vector<S> w = zero_vector<S>(n);
    if (t.is_hole()) throw InputError("cannot weigh a hole");
    if (t.is_leaf()) {
      auto ti = g_.terminal_index(t.label());
      if (!ti) throw InputError("unknown terminal '" + t.label() + "'");
      for (std::size_t ri : lexical_[*ti]) w[g_.rules()[ri].lhs] += g_.rules()[ri].weight;
    } else if (t.arity() < node_.size() && !node_[t.arity()].empty()) {
      std::vector<Vector<S>> owned;
      owned.reserve(t.arity());
      for (const auto& c : t.children()) owned.push_back(weights(c));
      for (std::size_t ri : node_[t.arity()]) {
        const auto& r = g_.rules()[ri];
        S prod = r.weight;
        for (std::size_t j = 0; j < r.rhs.size() && !Num<S>::is_zero(prod); ++j) {
          const auto& sym = r.rhs[j];
          const Tree& child = t.children()[j];
          if (sym.terminal) {
            if (!child.is_leaf() || child.label() != g_.terminals()[sym.index]) prod = Num<S>::zero();
          } else {
            prod *= owned[j][sym.index];
          }
        }
        if (!Num<S>::is_zero(prod)) w[r.lhs] += prod;
      }
    } else {
      for (const auto& c : t.children()) weights(c);  // still validates leaf tokens
    }
    for (std::size_t v : order_)
      for (std::size_t ri : chains_[v]) {
        const auto& r = g_.rules()[ri];
        const S& sub = w[r.rhs[0].index];
        if (!Num<S>::is_zero(sub)) w[v] += r.weight * sub;
      }
    return w;
  }

  Wcfg<S> g_;
  std::vector<std::size_t> order_;
  std::vector<std::vector<std::size_t>> lexical_, chains_, node_;
  std::unordered_map<std::string, Vector<S>> memo_;
};

/// Per-nonterminal weights of a skeletal tree.
template <class S>
Vector<S> nonterminal_weights(const Wcfg<S>& g, const Tree& s) {
  GrammarEvaluator<S> ev(g);
  return ev.weights(s);
}

/// Total weight of all derivations of s from the start symbol.
template <class S>
S skeletal_weight(const Wcfg<S>& g, const Tree& s) {
  GrammarEvaluator<S> ev(g);
  return ev.weight(s);
}

// ---------------------------------------------------------------------------
// Structural predicates

/// No two distinct nonterminals share a right-hand side (bracketed unary
/// rules are distinct from plain ones).
template <class S>
bool is_invertible(const Wcfg<S>& g) {
  std::map<std::pair<bool, std::vector<GrammarSymbol>>, std::size_t> owner;
  for (const auto& r : g.rules()) {
    auto key = std::make_pair(r.node, r.rhs);
    auto [it, fresh] = owner.emplace(key, r.lhs);
    if (!fresh && it->second != r.lhs) return false;
  }
  return true;
}

template <class S>
bool is_structurally_unambiguous(const Wcfg<S>& g) {
  return is_invertible(g);
}

template <class S>
bool has_negative_weight(const Wcfg<S>& g) {
  for (const auto& r : g.rules())
    if (Num<S>::is_negative(r.weight)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Conversions

/// Grammar with start S, one nonterminal V_i per automaton dimension, and
/// rules S -> V_i [λ_i], V_i -> σ [μ_σ[i]], V_i -> V_j1 .. V_jk [c^i_{j1..jk}].
/// Zero-weight rules are left out.  Throws PreconditionError on negative
/// weights.
template <class S>
Wcfg<S> pmta_to_wcfg(const Mta<S>& a) {
  if (!is_positive(a)) throw PreconditionError("pmta_to_wcfg: automaton has a negative weight");
  std::set<std::string> terms(a.alphabet().leaves.begin(), a.alphabet().leaves.end());
  std::string prefix;
  auto clash = [&] {
    if (terms.count(prefix + "S")) return true;
    for (std::size_t i = 1; i <= a.dim(); ++i)
      if (terms.count(prefix + "V" + std::to_string(i))) return true;
    return false;
  };
  while (clash()) prefix += "_";

  Wcfg<S> g;
  std::size_t start = g.add_nonterminal(prefix + "S");
  std::vector<std::size_t> v(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) v[i] = g.add_nonterminal(prefix + "V" + std::to_string(i + 1));
  for (const auto& tok : a.alphabet().leaves) g.add_terminal(tok);

  for (std::size_t i = 0; i < a.dim(); ++i)
    if (!Num<S>::is_zero(a.output()[i])) g.add_rule(start, {{false, v[i]}}, false, a.output()[i]);
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (const auto& tok : a.alphabet().leaves) {
      const S& x = a.leaf(tok)[i];
      if (!Num<S>::is_zero(x)) g.add_rule(v[i], {{true, *g.terminal_index(tok)}}, false, x);
    }
  for (std::size_t k = 1; k <= a.max_rank(); ++k) {
    const auto& m = a.node(k);
    for (std::size_t i = 0; i < a.dim(); ++i)
      for (std::size_t c = 0; c < m.columns(); ++c) {
        const S& x = m.at(i, c);
        if (Num<S>::is_zero(x)) continue;
        std::vector<GrammarSymbol> rhs;
        for (std::size_t j : m.column_tuple(c)) rhs.push_back({false, v[j]});
        g.add_rule(v[i], std::move(rhs), true, x);
      }
  }
  return g;
}

/// Coordinate of a grammar symbol in the automaton built by wcfg_to_pmta:
/// nonterminals first, in grammar order, then terminals.
template <class S>
std::size_t pmta_coordinate(const Wcfg<S>& g, const GrammarSymbol& s) {
  return s.terminal ? g.nonterminals().size() + s.index : s.index;
}

/// Automaton of dimension |V| + |Σ| computing the grammar's skeletal tree
/// series.  Coordinate ι(N) of a tree's vector holds the weight of the
/// derivations from N that do not start with a chain rule; coordinate ι(a)
/// is 1 exactly on the bare leaf a.  Chain rules are folded into λ and into
/// the node maps through their closure K = I + U + U² + ...
template <class S>
Mta<S> wcfg_to_pmta(const Wcfg<S>& g) {
  if (has_negative_weight(g)) throw PreconditionError("wcfg_to_pmta: grammar has a negative weight");
  if (g.nonterminals().empty()) throw PreconditionError("wcfg_to_pmta: grammar has no nonterminals");
  if (g.terminals().empty()) throw PreconditionError("wcfg_to_pmta: grammar has no terminals");
  const std::size_t nv = g.nonterminals().size(), nt = g.terminals().size();
  const std::size_t d = nv + nt;

  // closure[N] = sum over chain paths N ->* M of the path weight, as a
  // sparse row over nonterminals M.
  std::vector<std::map<std::size_t, S>> closure(nv);
  for (std::size_t v : g.chain_order()) {
    closure[v][v] += Num<S>::one();
    for (const auto& r : g.rules())
      if (r.lhs == v && r.kind() == RuleKind::Chain)
        for (const auto& [m, w] : closure[r.rhs[0].index]) closure[v][m] += r.weight * w;
  }
  auto support = [&](const GrammarSymbol& x) {
    std::vector<std::pair<std::size_t, S>> out;
    if (x.terminal) {
      out.emplace_back(nv + x.index, Num<S>::one());
    } else {
      for (const auto& [m, w] : closure[x.index])
        if (!Num<S>::is_zero(w)) out.emplace_back(m, w);
    }
    return out;
  };

  std::vector<bool> bare(nt, false);
  for (const auto& r : g.rules())
    if (r.node)
      for (const auto& s : r.rhs)
        if (s.terminal) bare[s.index] = true;

  Mta<S> a(g.alphabet(), d);
  for (const auto& [m, w] : closure[g.start()]) a.output()[m] += w;
  for (std::size_t t = 0; t < nt; ++t)
    if (bare[t]) a.leaf(g.terminals()[t])[nv + t] = Num<S>::one();
  for (const auto& r : g.rules()) {
    if (r.kind() == RuleKind::Lexical) a.leaf(g.terminals()[r.rhs[0].index])[r.lhs] += r.weight;
    if (r.kind() != RuleKind::Node) continue;
    auto& m = a.node(r.rhs.size());
    std::vector<std::vector<std::pair<std::size_t, S>>> sup;
    for (const auto& s : r.rhs) sup.push_back(support(s));
    std::vector<std::size_t> pos(sup.size(), 0), tuple(sup.size());
    bool empty = false;
    for (const auto& s : sup) empty = empty || s.empty();
    if (empty) continue;
    for (;;) {
      S w = r.weight;
      for (std::size_t j = 0; j < sup.size(); ++j) {
        tuple[j] = sup[j][pos[j]].first;
        w *= sup[j][pos[j]].second;
      }
      m.at(r.lhs, m.column_index(tuple)) += w;
      std::size_t j = sup.size();
      bool done = true;
      while (j > 0) {
        --j;
        if (++pos[j] < sup[j].size()) {
          done = false;
          break;
        }
        pos[j] = 0;
      }
      if (done) break;
    }
  }
  return a;
}

namespace detail {

// Nonterminals whose rules (with non-zero weight) reach each other.
template <class S>
bool has_recursion(const Wcfg<S>& g, std::vector<std::size_t>& topo) {
  const std::size_t n = g.nonterminals().size();
  std::vector<std::set<std::size_t>> succ(n);
  for (const auto& r : g.rules())
    if (!Num<S>::is_zero(r.weight))
      for (const auto& s : r.rhs)
        if (!s.terminal) succ[r.lhs].insert(s.index);
  std::vector<int> state(n, 0);
  topo.clear();
  bool cyclic = false;
  std::vector<std::pair<std::size_t, std::set<std::size_t>::const_iterator>> stack;
  for (std::size_t root = 0; root < n; ++root) {
    if (state[root]) continue;
    state[root] = 1;
    stack.push_back({root, succ[root].begin()});
    while (!stack.empty()) {
      auto& [v, it] = stack.back();
      if (it != succ[v].end()) {
        std::size_t w = *it++;
        if (state[w] == 1) cyclic = true;
        if (state[w] == 0) {
          state[w] = 1;
          stack.push_back({w, succ[w].begin()});
        }
      } else {
        state[v] = 2;
        topo.push_back(v);
        stack.pop_back();
      }
    }
  }
  return cyclic;
}

template <class T, class S>
T rule_inside(const Rule<S>& r, const std::vector<T>& z, const T& weight) {
  T prod = weight;
  for (const auto& s : r.rhs)
    if (!s.terminal) prod *= z[s.index];
  return prod;
}

}  // namespace detail

struct PartitionOptions {
  double tolerance = 1e-12;
  std::size_t max_iterations = 1000000;
  double divergence_bound = 1e100;
};

/// Least fixed point of Z_V = Σ_{V→X1..Xk} θ ∏ Z_Xi (terminals count 1).
/// Non-recursive grammars are solved directly in the scalar type.  Recursive
/// ones are iterated in floats from zero; the exact backend then looks for a
/// rational fixed point near the float solution and verifies it exactly,
/// falling back to the float values.  Throws PreconditionError on
/// divergence.
template <class S>
std::vector<S> partition_function(const Wcfg<S>& g, PartitionOptions opt = {}) {
  const std::size_t n = g.nonterminals().size();
  std::vector<std::size_t> topo;
  if (!detail::has_recursion(g, topo)) {
    std::vector<S> z(n, Num<S>::zero());
    for (std::size_t v : topo)
      for (const auto& r : g.rules())
        if (r.lhs == v) z[v] += detail::rule_inside(r, z, r.weight);
    return z;
  }
  std::vector<double> z(n, 0.0), next(n);
  std::vector<double> theta;
  for (const auto& r : g.rules()) theta.push_back(Num<S>::to_double(r.weight));
  bool converged = false;
  for (std::size_t it = 0; it < opt.max_iterations; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < g.rules().size(); ++i)
      next[g.rules()[i].lhs] += detail::rule_inside(g.rules()[i], z, theta[i]);
    double delta = 0;
    for (std::size_t v = 0; v < n; ++v) {
      if (!std::isfinite(next[v]) || next[v] > opt.divergence_bound)
        throw PreconditionError("partition function diverges at nonterminal '" + g.nonterminals()[v] + "'");
      delta = std::fmax(delta, std::fabs(next[v] - z[v]));
    }
    z.swap(next);
    if (delta <= opt.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) throw PreconditionError("partition function did not converge within the iteration cap");
  std::vector<S> out(n);
  if constexpr (Num<S>::exact) {
    std::vector<Rational> cand(n);
    for (std::size_t v = 0; v < n; ++v) cand[v] = rationalize(z[v], 1e-9 * std::fmax(1.0, z[v]));
    std::vector<Rational> check(n, Rational(0));
    for (const auto& r : g.rules()) check[r.lhs] += detail::rule_inside(r, cand, r.weight);
    bool exact = check == cand;
    for (std::size_t v = 0; v < n; ++v) out[v] = exact ? cand[v] : Rational(z[v]);
  } else {
    out = z;
  }
  return out;
}

/// Renormalize a convergent non-negative grammar into a PCFG with the same
/// rule skeleton: θ'(V→X1..Xk) = θ ∏ Z_Xi / Z_V.  Rules of nonterminals with
/// Z_V = 0 and rules whose new weight is 0 are dropped.  When the exact
/// backend had to fall back to float partition values, each nonterminal's
/// weights are additionally scaled to sum to exactly one.
template <class S>
Wcfg<S> wcfg_to_pcfg(const Wcfg<S>& g, PartitionOptions opt = {}) {
  if (has_negative_weight(g)) throw PreconditionError("wcfg_to_pcfg: grammar has a negative weight");
  if (g.nonterminals().empty()) throw PreconditionError("wcfg_to_pcfg: grammar has no nonterminals");
  std::vector<S> z = partition_function(g, opt);
  if (Num<S>::is_zero(z[g.start()])) throw PreconditionError("wcfg_to_pcfg: start symbol derives nothing");
  Wcfg<S> out;
  for (const auto& v : g.nonterminals()) out.add_nonterminal(v);
  for (const auto& t : g.terminals()) out.add_terminal(t);
  std::vector<S> sums(g.nonterminals().size(), Num<S>::zero());
  std::vector<S> fresh;
  for (const auto& r : g.rules()) {
    S w = Num<S>::zero();
    if (!Num<S>::is_zero(z[r.lhs])) w = detail::rule_inside(r, z, r.weight) / z[r.lhs];
    fresh.push_back(w);
    sums[r.lhs] += w;
  }
  for (std::size_t i = 0; i < g.rules().size(); ++i) {
    const auto& r = g.rules()[i];
    S w = fresh[i];
    if constexpr (Num<S>::exact)
      if (!Num<S>::is_zero(sums[r.lhs]) && sums[r.lhs] != 1) w /= sums[r.lhs];
    if (!Num<S>::is_zero(w)) out.add_rule(r.lhs, r.rhs, r.node, w);
  }
  return out;
}

/// True when every nonterminal's weights sum to one (within tolerance) and
/// lie in [0, 1].
template <class S>
bool is_pcfg(const Wcfg<S>& g) {
  std::vector<S> sums(g.nonterminals().size(), Num<S>::zero());
  std::vector<bool> seen(g.nonterminals().size(), false);
  for (const auto& r : g.rules()) {
    if (Num<S>::is_negative(r.weight) || r.weight > Num<S>::one()) return false;
    sums[r.lhs] += r.weight;
    seen[r.lhs] = true;
  }
  for (std::size_t v = 0; v < sums.size(); ++v)
    if (seen[v] && !Num<S>::equal(sums[v], Num<S>::one())) return false;
  return true;
}

}  // namespace treelearn
