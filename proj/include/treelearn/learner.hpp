#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <utility>

#include "treelearn/extractor.hpp"

namespace treelearn {

/// What the learner may ask: the value of a tree, or whether a hypothesis
/// is correct (nullopt) and otherwise a counterexample with its true value.
template <class S>
class TeacherOracle {
 public:
  virtual ~TeacherOracle() = default;
  virtual S smq(const Tree& t) = 0;
  virtual std::optional<std::pair<Tree, S>> seq(const Mta<S>& hypothesis) = 0;
};

template <class S>
struct LearnReport {
  Mta<S> hypothesis;
  std::size_t seq_count = 0;
  std::size_t smq_count = 0;
  std::size_t basis_size = 0;
  std::size_t column_count = 0;
  std::size_t max_counterexample_size = 0;
  double wall_time_ms = 0;
};

template <class S>
struct LearnOptions {
  /// Bound on table growth steps plus equivalence queries; 0 selects
  /// 10·|Σ₀| + 1000.
  std::size_t max_iterations = 0;
  /// Called with every closed, consistent table and the automaton extracted
  /// from it, before the equivalence query.
  std::function<void(ObservationTable<S>&, const Mta<S>&)> on_hypothesis;
};

template <class S>
LearnReport<S> learn(TeacherOracle<S>& oracle, const RankedAlphabet& alphabet, LearnOptions<S> options = {}) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t cap =
      options.max_iterations ? options.max_iterations : 10 * alphabet.leaves.size() + 1000;

  ObservationTable<S> tbl(alphabet, [&oracle](const Tree& t) { return oracle.smq(t); });
  std::size_t seq_rounds = 0;
  auto check_cap = [&](std::size_t growth) {
    if (growth + seq_rounds > cap)
      throw CapExceeded("learner exceeded its iteration cap of " + std::to_string(cap));
  };
  tbl.set_growth_hook(check_cap);

  LearnReport<S> report;
  std::vector<Tree> leaves;
  for (const auto& tok : alphabet.leaves) leaves.push_back(Tree::leaf(tok));
  tbl.complete(leaves);

  for (;;) {
    Mta<S> h = extract_cmta(tbl);
    if (options.on_hypothesis) options.on_hypothesis(tbl, h);
    ++seq_rounds;
    check_cap(tbl.growth());
    auto cex = oracle.seq(h);
    if (!cex) {
      report.hypothesis = std::move(h);
      break;
    }
    report.max_counterexample_size = std::max(report.max_counterexample_size, cex->first.size());
    tbl.complete({cex->first});
  }

  report.seq_count = seq_rounds;
  report.smq_count = tbl.smq_count();
  report.basis_size = tbl.basis().size();
  report.column_count = tbl.columns().size();
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace treelearn
