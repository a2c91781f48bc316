#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "treelearn/geneclusters.hpp"
#include "treelearn/grammar.hpp"
#include "treelearn/learner.hpp"
#include "treelearn/mta.hpp"
#include "treelearn/teacher.hpp"

namespace py = pybind11;
using namespace treelearn;

namespace {

std::optional<std::uint64_t> cost_or_none(EditCost c) {
  if (c.is_infinite()) return std::nullopt;
  return c.value();
}

class Grammar {
 public:
  explicit Grammar(const std::string& text) : g_(wcfg_from_string<Rational>(text)), ev_(g_) {}

  std::string weight(const std::string& tree) { return format_value(ev_.weight(parse_tree(tree))); }
  double weight_float(const std::string& tree) { return ev_.weight(parse_tree(tree)).get_d(); }
  bool invertible() const { return is_invertible(g_); }
  std::string normalized() const { return wcfg_to_string(wcfg_to_pcfg(g_)); }
  std::string to_automaton() const { return mta_to_string(wcfg_to_pmta(g_)); }
  std::string text() const { return wcfg_to_string(g_); }
  const Wcfg<Rational>& wcfg() const { return g_; }

 private:
  Wcfg<Rational> g_;
  GrammarEvaluator<Rational> ev_;
};

py::dict learn_grammar(const Grammar& target, std::size_t max_len, std::size_t max_iterations) {
  const auto& g = target.wcfg();
  const auto alphabet = g.alphabet();
  CandidateConfig cfg;
  cfg.strategy = Exhaustive{max_len};
  cfg.parses = ParseMode::All;
  SimulatedTeacher<Rational> teacher(grammar_target(g), candidates(cfg, alphabet), default_epsilon<Rational>(false));
  LearnOptions<Rational> opts;
  opts.max_iterations = max_iterations;
  auto r = learn<Rational>(teacher, alphabet, opts);
  py::dict out;
  out["automaton"] = mta_to_string(r.hypothesis);
  out["grammar"] = wcfg_to_string(pmta_to_wcfg(r.hypothesis));
  out["seq_count"] = r.seq_count;
  out["smq_count"] = r.smq_count;
  out["basis_size"] = r.basis_size;
  out["wall_time_ms"] = r.wall_time_ms;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Tree learning toolkit: co-linear tree automata, weighted grammars and gene-cluster trees";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<CapExceeded>(m, "CapExceeded", PyExc_RuntimeError);

  m.def("canonical", [](const std::string& t) { return parse_tree(t).str(); }, py::arg("tree"),
        "Parse a tree and return its canonical serialization.");
  m.def("yield_of", [](const std::string& t) { return yield(parse_tree(t)); }, py::arg("tree"));

  py::class_<Grammar>(m, "Grammar")
      .def(py::init<const std::string&>(), py::arg("text"))
      .def_static("load",
                  [](const std::string& path) {
                    std::ifstream in(path);
                    if (!in) throw InputError("cannot open '" + path + "'");
                    std::stringstream ss;
                    ss << in.rdbuf();
                    return Grammar(ss.str());
                  })
      .def("weight", &Grammar::weight, py::arg("tree"), "Exact weight as a decimal or fraction string.")
      .def("weight_float", &Grammar::weight_float, py::arg("tree"))
      .def("is_invertible", &Grammar::invertible)
      .def("normalized", &Grammar::normalized)
      .def("to_automaton", &Grammar::to_automaton)
      .def("__str__", &Grammar::text);

  m.def("learn", &learn_grammar, py::arg("target"), py::arg("max_len") = 4, py::arg("max_iterations") = 0,
        "Learn a target grammar with an exhaustive equivalence oracle over all parses of short strings.");

  m.def(
      "gene_tree",
      [](const std::vector<std::string>& s, std::optional<std::vector<std::vector<std::string>>> corpus) {
        WeightFunction w = zero_weights();
        if (corpus) {
          std::vector<std::pair<std::size_t, GeneString>> entries;
          for (const auto& x : *corpus) entries.emplace_back(1, x);
          w = SubstringFrequency(entries).function();
        }
        auto r = gene_tree(s, w);
        return py::make_tuple(r.tree.str(), r.score);
      },
      py::arg("genes"), py::arg("corpus") = py::none());

  m.def("swap_distance", [](const std::string& a, const std::string& b) {
    return cost_or_none(swap_distance(parse_tree(a), parse_tree(b)));
  });
  m.def("duplication_distance", [](const std::string& a, const std::string& b) {
    return cost_or_none(duplication_distance(parse_tree(a), parse_tree(b)));
  });
}
