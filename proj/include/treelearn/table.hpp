#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "treelearn/errors.hpp"
#include "treelearn/multilinear.hpp"
#include "treelearn/tree.hpp"

namespace treelearn {

/// Result of comparing a row against the basis.
template <class S>
struct ColinearClass {
  enum class Kind { Zero, Basis, Independent };
  Kind kind = Kind::Zero;
  std::size_t index = 0;  // basis position, valid for Kind::Basis
  S coeff{};               // row = coeff * basis row, valid for Kind::Basis

  bool is_zero() const { return kind == Kind::Zero; }
  bool is_independent() const { return kind == Kind::Independent; }
  bool in_class() const { return kind == Kind::Basis; }
};

/// The learner's observation table: row trees T (subtree-closed), column
/// contexts C (starting with the bare hole), the Hankel entries for
/// T ∪ Σ(T) over C, and a basis B ⊆ T of pairwise co-linearly independent
/// rows.  Membership queries are memoized by tree serialization, so
/// `smq_count()` counts distinct queried trees.
template <class S>
class ObservationTable {
 public:
  using Oracle = std::function<S(const Tree&)>;

  ObservationTable(RankedAlphabet alphabet, Oracle oracle)
      : alphabet_(std::move(alphabet)), oracle_(std::move(oracle)) {
    columns_.emplace_back();
    column_keys_.insert(columns_.back().str());
  }

  const RankedAlphabet& alphabet() const { return alphabet_; }
  const std::vector<Tree>& rows() const { return rows_; }
  const std::vector<Context>& columns() const { return columns_; }
  const std::vector<Tree>& basis() const { return basis_; }
  std::size_t smq_count() const { return queries_.size(); }
  bool has_row(const Tree& t) const { return row_keys_.count(t.str()) > 0; }

  /// Membership query through the memo.
  const S& query(const Tree& t) {
    auto it = queries_.find(t.str());
    if (it == queries_.end()) it = queries_.emplace(t.str(), oracle_(t)).first;
    return it->second;
  }

  /// H[t][C]; any tree may be asked, cells are filled on demand.
  const Vector<S>& row(const Tree& t) {
    auto it = cells_.find(t.str());
    if (it == cells_.end()) it = cells_.emplace(t.str(), Vector<S>{}).first;
    Vector<S>& r = it->second;
    while (r.size() < columns_.size()) r.push_back(query(compose(columns_[r.size()], t)));
    return r;
  }

  const S& cell(const Tree& t, std::size_t column) { return row(t).at(column); }

  /// Σ(T) in canonical order.
  const std::vector<Tree>& extension() {
    if (!extension_valid_) {
      extension_ = sigma_extension(rows_, alphabet_);
      extension_valid_ = true;
    }
    return extension_;
  }

  /// Σ(T,⋄) in canonical order.
  const std::vector<Context>& one_level_contexts() {
    if (!contexts_valid_) {
      contexts_ = sigma_contexts(rows_, alphabet_);
      contexts_valid_ = true;
    }
    return contexts_;
  }

  ColinearClass<S> classify(const Tree& t) {
    const Vector<S> r = row(t);
    ColinearClass<S> out;
    if (is_zero_vector(r)) return out;
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      if (auto alpha = colinear_witness(r, row(basis_[i]))) {
        out.kind = ColinearClass<S>::Kind::Basis;
        out.index = i;
        out.coeff = *alpha;
        return out;
      }
    }
    out.kind = ColinearClass<S>::Kind::Independent;
    return out;
  }

  /// Add t and all its subtrees to T.
  void add_rows(const Tree& t) {
    for (const auto& s : subtrees(t)) insert_row(s);
  }

  /// Add a column context; returns false if it was already present.
  bool add_column(const Context& c) {
    if (!column_keys_.insert(c.str()).second) return false;
    columns_.push_back(c);
    ++growth_;
    return true;
  }

  /// First tree of Σ(T) whose row is independent of the basis.
  std::optional<Tree> find_unclosed() {
    for (const auto& t : extension())
      if (classify(t).is_independent()) return t;
    return std::nullopt;
  }

  bool is_closed() { return !find_unclosed().has_value(); }

  /// Repeatedly move the first independent Σ(T) row into T and B.
  void close() { close_with_hook(); }

  /// A zero row t ∈ T, a one-level context c' and a column c with
  /// H[c⟨c'⟨t⟩⟩] ≠ 0.  Returns the separating context c⟨c'⟩.
  std::optional<Context> check_zero_consistency() {
    const auto& ctxs = one_level_contexts();
    for (const auto& t : std::vector<Tree>(rows_)) {
      if (!classify(t).is_zero()) continue;
      for (const auto& c1 : ctxs) {
        const Vector<S>& r = row(compose(c1, t));
        for (std::size_t j = 0; j < r.size(); ++j)
          if (!Num<S>::is_zero(r[j])) return compose(columns_[j], c1);
      }
    }
    return std::nullopt;
  }

  /// Rows t ≡α b (b its basis representative) and a one-level context c'
  /// with H[c'⟨t⟩] ≠ α·H[c'⟨b⟩].  Returns the separating context c⟨c'⟩.
  std::optional<Context> check_colinear_consistency() {
    const auto& ctxs = one_level_contexts();
    for (const auto& t : std::vector<Tree>(rows_)) {
      auto cls = classify(t);
      if (!cls.in_class()) continue;
      const Tree b = basis_[cls.index];
      if (b == t) continue;
      for (const auto& c1 : ctxs) {
        const Vector<S> lhs = row(compose(c1, t));
        const Vector<S> rhs = scaled(row(compose(c1, b)), cls.coeff);
        if (vectors_equal(lhs, rhs)) continue;
        for (std::size_t j = 0; j < lhs.size(); ++j)
          if (!Num<S>::equal(lhs[j], rhs[j])) return compose(columns_[j], c1);
        // Only the vector-level tolerance failed; pick the largest deviation.
        std::size_t worst = 0;
        double gap = -1;
        for (std::size_t j = 0; j < lhs.size(); ++j) {
          double g = Num<S>::to_double(Num<S>::abs(lhs[j] - rhs[j]));
          if (g > gap) gap = g, worst = j;
        }
        return compose(columns_[worst], c1);
      }
    }
    return std::nullopt;
  }

  bool is_consistent() { return !check_zero_consistency() && !check_colinear_consistency(); }

  /// Hook invoked after every basis or column addition; lets the learner
  /// enforce its iteration cap inside long completions.
  void set_growth_hook(std::function<void(std::size_t)> hook) { growth_hook_ = std::move(hook); }

  /// T ← T ∪ subtrees(S), then alternate closing and resolving consistency
  /// violations until the table is closed and consistent.
  void complete(const std::vector<Tree>& trees) {
    for (const auto& t : trees) add_rows(t);
    for (;;) {
      close_with_hook();
      if (auto c = check_zero_consistency()) {
        add_column(*c);
        notify();
        continue;
      }
      if (auto c = check_colinear_consistency()) {
        add_column(*c);
        notify();
        continue;
      }
      break;
    }
  }

  /// Number of basis and column additions so far.
  std::size_t growth() const { return growth_; }

  /// Tab-separated dump: one line per (row, column) of T ∪ Σ(T) × C.
  void dump(std::ostream& out) {
    out << "row\tcolumn\tvalue\tin_basis\n";
    std::set<std::string> basis_keys;
    for (const auto& b : basis_) basis_keys.insert(b.str());
    for (const auto& t : extension()) {
      const Vector<S> r = row(t);
      for (std::size_t j = 0; j < columns_.size(); ++j)
        out << t.str() << '\t' << columns_[j].str() << '\t' << Num<S>::format(r[j]) << '\t'
            << (basis_keys.count(t.str()) ? 1 : 0) << '\n';
    }
  }

 private:
  void insert_row(const Tree& t) {
    if (!row_keys_.insert(t.str()).second) return;
    rows_.insert(std::upper_bound(rows_.begin(), rows_.end(), t, CanonicalLess{}), t);
    extension_valid_ = contexts_valid_ = false;
  }

  void close_with_hook() {
    while (auto t = find_unclosed()) {
      insert_row(*t);
      basis_.push_back(*t);
      ++growth_;
      notify();
    }
  }

  void notify() {
    if (growth_hook_) growth_hook_(growth_);
  }

  RankedAlphabet alphabet_;
  Oracle oracle_;
  std::vector<Tree> rows_;
  std::unordered_set<std::string> row_keys_;
  std::vector<Context> columns_;
  std::unordered_set<std::string> column_keys_;
  std::vector<Tree> basis_;
  std::unordered_map<std::string, S> queries_;
  std::unordered_map<std::string, Vector<S>> cells_;
  std::vector<Tree> extension_;
  bool extension_valid_ = false;
  std::vector<Context> contexts_;
  bool contexts_valid_ = false;
  std::size_t growth_ = 0;
  std::function<void(std::size_t)> growth_hook_;
};

}  // namespace treelearn
