#pragma once

#include "treelearn/mta.hpp"
#include "treelearn/table.hpp"

namespace treelearn {

/// Build the co-linear automaton of a closed, consistent table.  The
/// dimension is |B|; basis tree b_i is represented by the i-th unit vector.
/// Throws PreconditionError when the table is not closed or not consistent.
template <class S>
Mta<S> extract_cmta(ObservationTable<S>& tbl) {
  if (!tbl.is_closed()) throw PreconditionError("extract_cmta: table is not closed");
  if (!tbl.is_consistent()) throw PreconditionError("extract_cmta: table is not consistent");

  const auto& basis = tbl.basis();
  const std::size_t d = basis.size();
  Mta<S> a(tbl.alphabet(), d);

  for (std::size_t i = 0; i < d; ++i) a.output()[i] = tbl.cell(basis[i], 0);

  auto class_vector = [&](const Tree& t) {
    auto cls = tbl.classify(t);
    if (cls.is_independent()) throw PreconditionError("extract_cmta: unclassified row " + t.str());
    Vector<S> v = zero_vector<S>(d);
    if (cls.in_class()) v[cls.index] = cls.coeff;
    return v;
  };

  for (const auto& tok : tbl.alphabet().leaves) a.leaf(tok) = class_vector(Tree::leaf(tok));

  if (d == 0) return a;
  for (std::size_t k = 1; k <= tbl.alphabet().max_rank; ++k) {
    auto& m = a.node(k);
    std::vector<Tree> kids(k, basis[0]);
    for (std::size_t c = 0; c < m.columns(); ++c) {
      auto tuple = m.column_tuple(c);
      for (std::size_t j = 0; j < k; ++j) kids[j] = basis[tuple[j]];
      m.set_column(c, class_vector(Tree::node(kids)));
    }
  }
  return a;
}

}  // namespace treelearn
