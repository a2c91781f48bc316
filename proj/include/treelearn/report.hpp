#pragma once

#include <string>

#include "json.hpp"
#include "treelearn/learner.hpp"

namespace treelearn {

template <class S>
nlohmann::json report_json(const LearnReport<S>& r) {
  return nlohmann::json{{"seq_count", r.seq_count},
                        {"smq_count", r.smq_count},
                        {"basis_size", r.basis_size},
                        {"column_count", r.column_count},
                        {"max_counterexample_size", r.max_counterexample_size},
                        {"wall_time_ms", r.wall_time_ms}};
}

/// The query bound n·(n + m·n + |Σ|·(n + m·n)^p) for a rank-n target with
/// largest counterexample size m.
inline double smq_bound(double n, double m, double sigma, unsigned p) {
  double rows = n + m * n, power = 1;
  for (unsigned i = 0; i < p; ++i) power *= rows;
  return n * (rows + sigma * power);
}

}  // namespace treelearn
