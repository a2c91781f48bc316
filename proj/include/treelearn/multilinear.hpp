#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "treelearn/errors.hpp"
#include "treelearn/scalar.hpp"

namespace treelearn {

template <class S>
using Vector = std::vector<S>;

template <class S>
Vector<S> zero_vector(std::size_t d) {
  return Vector<S>(d, Num<S>::zero());
}

template <class S>
Vector<S> unit_vector(std::size_t d, std::size_t i) {
  Vector<S> v = zero_vector<S>(d);
  v.at(i) = Num<S>::one();
  return v;
}

template <class S>
bool is_zero_vector(const Vector<S>& v) {
  for (const auto& x : v)
    if (!Num<S>::is_zero(x)) return false;
  return true;
}

template <class S>
S max_abs(const Vector<S>& v) {
  S best = Num<S>::zero();
  for (const auto& x : v)
    if (Num<S>::abs(x) > best) best = Num<S>::abs(x);
  return best;
}

/// Exact backend: entrywise equality.  Float backend: the max-norm of the
/// difference is within the relative tolerance of the larger max-norm.
template <class S>
bool vectors_equal(const Vector<S>& a, const Vector<S>& b) {
  if (a.size() != b.size()) return false;
  if constexpr (Num<S>::exact) {
    return a == b;
  } else {
    double diff = 0;
    for (std::size_t i = 0; i < a.size(); ++i) diff = std::fmax(diff, std::fabs(a[i] - b[i]));
    if (diff <= float_tolerance().absolute) return true;
    return diff <= float_tolerance().relative * std::fmax(max_abs(a), max_abs(b));
  }
}

template <class S>
Vector<S> scaled(const Vector<S>& v, const S& alpha) {
  Vector<S> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = alpha * v[i];
  return out;
}

template <class S>
S dot(const Vector<S>& a, const Vector<S>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  S acc = Num<S>::zero();
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!Num<S>::is_zero(a[i]) && !Num<S>::is_zero(b[i])) acc += a[i] * b[i];
  return acc;
}

/// Returns alpha != 0 with v = alpha * w.  Two zero vectors give alpha = 1.
template <class S>
std::optional<S> colinear_witness(const Vector<S>& v, const Vector<S>& w) {
  if (v.size() != w.size()) throw std::invalid_argument("colinear_witness: dimension mismatch");
  bool v_zero = is_zero_vector(v), w_zero = is_zero_vector(w);
  if (v_zero && w_zero) return Num<S>::one();
  if (v_zero || w_zero) return std::nullopt;
  std::size_t pivot = 0;
  S best = Num<S>::zero();
  for (std::size_t i = 0; i < w.size(); ++i)
    if (Num<S>::abs(w[i]) > best) {
      best = Num<S>::abs(w[i]);
      pivot = i;
    }
  S alpha = v[pivot] / w[pivot];
  if (Num<S>::is_zero(alpha)) return std::nullopt;
  if (!vectors_equal(v, scaled(w, alpha))) return std::nullopt;
  return alpha;
}

/// Kronecker product x_1 ⊗ ... ⊗ x_k of equal-length vectors, laid out with
/// the last factor varying fastest.
template <class S>
Vector<S> kronecker(const std::vector<Vector<S>>& args) {
  Vector<S> out{Num<S>::one()};
  for (const auto& x : args) {
    Vector<S> next;
    next.reserve(out.size() * x.size());
    for (const auto& a : out)
      for (const auto& b : x) next.push_back(a * b);
    out = std::move(next);
  }
  return out;
}

/// A k-linear map V^k -> V with V = S^d, stored as a d x d^k matrix.  Column
/// c corresponds to the index tuple (j_1..j_k) with c = sum j_m * d^(k-m),
/// i.e. tuples in lexicographic order.
template <class S>
class MultilinearMap {
 public:
  MultilinearMap() = default;
  MultilinearMap(std::size_t dim, std::size_t arity)
      : dim_(dim), arity_(arity), cols_(ipow(dim, arity)), coeffs_(dim * cols_, Num<S>::zero()) {}

  std::size_t dim() const { return dim_; }
  std::size_t arity() const { return arity_; }
  std::size_t columns() const { return cols_; }

  S& at(std::size_t row, std::size_t col) { return coeffs_.at(row * cols_ + col); }
  const S& at(std::size_t row, std::size_t col) const { return coeffs_.at(row * cols_ + col); }

  std::size_t column_index(const std::vector<std::size_t>& tuple) const {
    if (tuple.size() != arity_) throw std::invalid_argument("column_index: wrong tuple length");
    std::size_t c = 0;
    for (std::size_t j : tuple) {
      if (j >= dim_) throw std::out_of_range("column_index: index out of range");
      c = c * dim_ + j;
    }
    return c;
  }

  std::vector<std::size_t> column_tuple(std::size_t c) const {
    std::vector<std::size_t> tuple(arity_);
    for (std::size_t m = arity_; m-- > 0;) {
      tuple[m] = c % dim_;
      c /= dim_;
    }
    return tuple;
  }

  Vector<S> column(std::size_t c) const {
    Vector<S> v(dim_);
    for (std::size_t i = 0; i < dim_; ++i) v[i] = at(i, c);
    return v;
  }

  void set_column(std::size_t c, const Vector<S>& v) {
    if (v.size() != dim_) throw std::invalid_argument("set_column: dimension mismatch");
    for (std::size_t i = 0; i < dim_; ++i) at(i, c) = v[i];
  }

  const std::vector<S>& coefficients() const { return coeffs_; }

  /// y[i] = sum over (j_1..j_k) of c^i_{j_1..j_k} x_1[j_1] ... x_k[j_k].
  /// Only tuples whose argument entries are all non-zero are visited.
  Vector<S> apply(const std::vector<Vector<S>>& args) const {
    check_args(args);
    Vector<S> y = zero_vector<S>(dim_);
    std::vector<std::vector<std::size_t>> support(arity_);
    for (std::size_t m = 0; m < arity_; ++m) {
      for (std::size_t j = 0; j < dim_; ++j)
        if (!Num<S>::is_zero(args[m][j])) support[m].push_back(j);
      if (support[m].empty()) return y;
    }
    std::vector<std::size_t> pos(arity_, 0);
    for (;;) {
      std::size_t c = 0;
      S w = Num<S>::one();
      for (std::size_t m = 0; m < arity_; ++m) {
        std::size_t j = support[m][pos[m]];
        c = c * dim_ + j;
        w *= args[m][j];
      }
      for (std::size_t i = 0; i < dim_; ++i) {
        const S& coef = coeffs_[i * cols_ + c];
        if (!Num<S>::is_zero(coef)) y[i] += coef * w;
      }
      std::size_t m = arity_;
      while (m > 0) {
        --m;
        if (++pos[m] < support[m].size()) break;
        pos[m] = 0;
        if (m == 0) return y;
      }
      if (arity_ == 0) return y;
    }
  }

  /// The same map computed as matrix times Kronecker product.
  Vector<S> apply_kronecker(const std::vector<Vector<S>>& args) const {
    check_args(args);
    Vector<S> x = kronecker(args);
    Vector<S> y = zero_vector<S>(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t c = 0; c < cols_; ++c) y[i] += coeffs_[i * cols_ + c] * x[c];
    return y;
  }

 private:
  static std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) r *= base;
    return r;
  }

  void check_args(const std::vector<Vector<S>>& args) const {
    if (args.size() != arity_)
      throw std::invalid_argument("apply: expected " + std::to_string(arity_) + " arguments, got " +
                                  std::to_string(args.size()));
    for (const auto& a : args)
      if (a.size() != dim_) throw std::invalid_argument("apply: argument has wrong dimension");
  }

  std::size_t dim_ = 0, arity_ = 0, cols_ = 1;
  std::vector<S> coeffs_;
};

}  // namespace treelearn
