#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "treelearn/errors.hpp"
#include "treelearn/multilinear.hpp"
#include "treelearn/tree.hpp"

namespace treelearn {

/// Multiplicity tree automaton over a skeletal alphabet: one vector per leaf
/// token, one k-linear map per node arity k = 1..p, and an output vector.
template <class S>
class Mta {
 public:
  Mta() = default;

  /// The zero automaton of the given dimension.
  Mta(RankedAlphabet alphabet, std::size_t dim) : alphabet_(std::move(alphabet)), dim_(dim) {
    for (const auto& tok : alphabet_.leaves) leaves_.emplace(tok, zero_vector<S>(dim_));
    for (std::size_t k = 1; k <= alphabet_.max_rank; ++k) nodes_.emplace_back(dim_, k);
    output_ = zero_vector<S>(dim_);
  }

  const RankedAlphabet& alphabet() const { return alphabet_; }
  std::size_t dim() const { return dim_; }
  std::size_t max_rank() const { return alphabet_.max_rank; }

  Vector<S>& leaf(const std::string& token) {
    auto it = leaves_.find(token);
    if (it == leaves_.end()) throw InputError("unknown leaf token '" + token + "'");
    return it->second;
  }
  const Vector<S>& leaf(const std::string& token) const {
    auto it = leaves_.find(token);
    if (it == leaves_.end()) throw InputError("unknown leaf token '" + token + "'");
    return it->second;
  }
  const std::map<std::string, Vector<S>>& leaves() const { return leaves_; }

  MultilinearMap<S>& node(std::size_t rank) { return nodes_.at(check_rank(rank) - 1); }
  const MultilinearMap<S>& node(std::size_t rank) const { return nodes_.at(check_rank(rank) - 1); }

  Vector<S>& output() { return output_; }
  const Vector<S>& output() const { return output_; }

  Vector<S> eval_vector(const Tree& t) const {
    if (t.is_hole()) throw InputError("cannot evaluate a hole");
    if (t.is_leaf()) return leaf(t.label());
    std::vector<Vector<S>> args;
    args.reserve(t.arity());
    for (const auto& c : t.children()) args.push_back(eval_vector(c));
    return node(t.arity()).apply(args);
  }

  S eval(const Tree& t) const { return dot(output_, eval_vector(t)); }

 private:
  std::size_t check_rank(std::size_t rank) const {
    if (rank < 1 || rank > alphabet_.max_rank)
      throw InputError("node arity " + std::to_string(rank) + " exceeds max rank " +
                       std::to_string(alphabet_.max_rank));
    return rank;
  }

  RankedAlphabet alphabet_;
  std::size_t dim_ = 0;
  std::map<std::string, Vector<S>> leaves_;
  std::vector<MultilinearMap<S>> nodes_;
  Vector<S> output_;
};

template <class S>
bool is_positive(const Mta<S>& a) {
  for (const auto& x : a.output())
    if (Num<S>::is_negative(x)) return false;
  for (const auto& [tok, v] : a.leaves())
    for (const auto& x : v)
      if (Num<S>::is_negative(x)) return false;
  for (std::size_t k = 1; k <= a.max_rank(); ++k)
    for (const auto& x : a.node(k).coefficients())
      if (Num<S>::is_negative(x)) return false;
  return true;
}

/// Every column of every node map, and every leaf vector, has at most one
/// non-zero entry.
template <class S>
bool is_colinear_mta(const Mta<S>& a) {
  auto at_most_one = [](const Vector<S>& col) {
    int nonzero = 0;
    for (const auto& x : col)
      if (!Num<S>::is_zero(x) && ++nonzero > 1) return false;
    return true;
  };
  for (const auto& [tok, v] : a.leaves())
    if (!at_most_one(v)) return false;
  for (std::size_t k = 1; k <= a.max_rank(); ++k) {
    const auto& m = a.node(k);
    for (std::size_t c = 0; c < m.columns(); ++c)
      if (!at_most_one(m.column(c))) return false;
  }
  return true;
}

template <class S>
void write_mta(std::ostream& out, const Mta<S>& a) {
  auto row = [&](const auto& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out << ' ' << Num<S>::format(values[i]);
  };
  out << "mta d=" << a.dim() << " p=" << a.max_rank() << "\n";
  out << "lambda:";
  row(a.output());
  out << "\n";
  for (const auto& [tok, v] : a.leaves()) {
    out << "leaf " << tok << ":";
    row(v);
    out << "\n";
  }
  for (std::size_t k = 1; k <= a.max_rank(); ++k) {
    out << "rank " << k << ":\n";
    const auto& m = a.node(k);
    for (std::size_t i = 0; i < a.dim(); ++i) {
      bool first = true;
      for (std::size_t c = 0; c < m.columns(); ++c) {
        out << (first ? "" : " ") << Num<S>::format(m.at(i, c));
        first = false;
      }
      out << "\n";
    }
  }
}

template <class S>
std::string mta_to_string(const Mta<S>& a) {
  std::ostringstream os;
  write_mta(os, a);
  return os.str();
}

namespace detail {

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

inline bool skip_line(const std::string& line) {
  auto p = line.find_first_not_of(" \t\r");
  return p == std::string::npos || line[p] == '#';
}

}  // namespace detail

template <class S>
Mta<S> read_mta(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!detail::skip_line(line)) return true;
    }
    return false;
  };
  auto fail = [&](const std::string& why) -> InputError {
    return InputError("automaton line " + std::to_string(lineno) + ": " + why);
  };
  auto scalars = [&](const std::vector<std::string>& toks, std::size_t from) {
    Vector<S> v;
    for (std::size_t i = from; i < toks.size(); ++i) v.push_back(Num<S>::parse(toks[i]));
    return v;
  };

  if (!next()) throw InputError("empty automaton file");
  std::size_t d = 0, p = 0;
  {
    auto toks = detail::split_ws(line);
    if (toks.size() != 3 || toks[0] != "mta" || toks[1].rfind("d=", 0) != 0 || toks[2].rfind("p=", 0) != 0)
      throw fail("expected header 'mta d=<d> p=<p>'");
    try {
      d = std::stoul(toks[1].substr(2));
      p = std::stoul(toks[2].substr(2));
    } catch (const std::exception&) {
      throw fail("bad header numbers");
    }
  }
  if (!next()) throw fail("missing lambda line");
  auto lam_toks = detail::split_ws(line);
  if (lam_toks.empty() || lam_toks[0] != "lambda:") throw fail("expected 'lambda:'");
  Vector<S> lambda = scalars(lam_toks, 1);
  if (lambda.size() != d) throw fail("lambda has wrong length");

  std::map<std::string, Vector<S>> leaves;
  std::vector<MultilinearMap<S>> maps;
  bool have_line = next();
  while (have_line) {
    auto toks = detail::split_ws(line);
    if (toks[0] == "leaf") {
      if (toks.size() < 2 || toks[1].empty() || toks[1].back() != ':') throw fail("expected 'leaf <token>:'");
      std::string tok = toks[1].substr(0, toks[1].size() - 1);
      Vector<S> v = scalars(toks, 2);
      if (v.size() != d) throw fail("leaf vector has wrong length");
      if (!leaves.emplace(tok, std::move(v)).second) throw fail("duplicate leaf '" + tok + "'");
      have_line = next();
    } else if (toks[0] == "rank") {
      if (toks.size() != 2 || toks[1].empty() || toks[1].back() != ':') throw fail("expected 'rank <k>:'");
      std::size_t k = 0;
      try {
        k = std::stoul(toks[1].substr(0, toks[1].size() - 1));
      } catch (const std::exception&) {
        throw fail("bad rank");
      }
      if (k != maps.size() + 1 || k > p) throw fail("ranks must appear in order 1..p");
      MultilinearMap<S> m(d, k);
      for (std::size_t i = 0; i < d; ++i) {
        if (!next()) throw fail("missing matrix row");
        auto row = scalars(detail::split_ws(line), 0);
        if (row.size() != m.columns()) throw fail("matrix row has wrong length");
        for (std::size_t c = 0; c < m.columns(); ++c) m.at(i, c) = row[c];
      }
      maps.push_back(std::move(m));
      have_line = next();
    } else {
      throw fail("unexpected line '" + line + "'");
    }
  }
  if (maps.size() != p) throw InputError("automaton declares p=" + std::to_string(p) + " but has " +
                                         std::to_string(maps.size()) + " rank blocks");
  std::vector<std::string> tokens;
  for (const auto& [tok, v] : leaves) tokens.push_back(tok);
  Mta<S> a(RankedAlphabet(tokens, p), d);
  a.output() = lambda;
  for (auto& [tok, v] : leaves) a.leaf(tok) = v;
  for (std::size_t k = 1; k <= p; ++k) a.node(k) = maps[k - 1];
  return a;
}

template <class S>
Mta<S> mta_from_string(const std::string& text) {
  std::istringstream is(text);
  return read_mta<S>(is);
}

/// Convert an automaton between scalar backends (via exact rationals).
template <class To, class From>
Mta<To> convert_mta(const Mta<From>& a) {
  Mta<To> out(a.alphabet(), a.dim());
  auto conv = [](const From& x) { return Num<To>::from_rational(Num<From>::to_rational(x)); };
  for (std::size_t i = 0; i < a.dim(); ++i) out.output()[i] = conv(a.output()[i]);
  for (const auto& [tok, v] : a.leaves())
    for (std::size_t i = 0; i < a.dim(); ++i) out.leaf(tok)[i] = conv(v[i]);
  for (std::size_t k = 1; k <= a.max_rank(); ++k)
    for (std::size_t i = 0; i < a.dim(); ++i)
      for (std::size_t c = 0; c < a.node(k).columns(); ++c) out.node(k).at(i, c) = conv(a.node(k).at(i, c));
  return out;
}

}  // namespace treelearn
