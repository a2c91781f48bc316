#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "treelearn/geneclusters.hpp"
#include "treelearn/grammar.hpp"
#include "treelearn/learner.hpp"
#include "treelearn/mta.hpp"
#include "treelearn/report.hpp"
#include "treelearn/teacher.hpp"

namespace fs = std::filesystem;
using namespace treelearn;

namespace {

enum Exit { kOk = 0, kInput = 2, kCap = 3, kPrecondition = 4 };

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return in;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

bool fits_alphabet(const Tree& t, const RankedAlphabet& al) {
  if (max_arity(t) > al.max_rank) return false;
  for (const auto& tok : leaf_tokens(t))
    if (!al.has_leaf(tok)) return false;
  return true;
}

DistanceKind parse_distance(const std::string& name) {
  if (name == "swap") return DistanceKind::Swap;
  if (name == "duplication") return DistanceKind::Duplication;
  throw InputError("unknown distance '" + name + "'");
}

bool is_automaton_file(const std::string& path) { return fs::path(path).extension() == ".mta"; }

struct LearnArgs {
  std::string target;
  std::string distance;
  std::string q = "0.2";
  std::string seq = "exhaustive";
  std::size_t max_len = 4;
  std::size_t count = 100;
  std::uint64_t seed = 0;
  std::size_t max_dup = 1;
  std::string base;
  std::string parses = "all";
  std::string weights;
  std::string epsilon;
  bool exact = false;
  bool use_float = false;
  std::size_t max_iterations = 0;
  std::string out = "out";
  std::string dump_table;
};

struct EvalArgs {
  std::string model;
  std::string input;
  bool use_float = false;
};

struct ConvertArgs {
  std::string input;
  std::string output;
  bool pmta_to_wcfg = false;
  bool wcfg_to_pmta = false;
  bool wcfg_to_pcfg = false;
  bool use_float = false;
};

struct TreesArgs {
  std::string input;
  std::string weights;
  std::string distance;
  std::string against;
};

WeightFunction load_weights(const std::string& path) {
  if (path.empty()) return zero_weights();
  auto in = open_input(path);
  return SubstringFrequency(read_strings(in)).function();
}

std::vector<Tree> read_tree_file(const std::string& path) {
  auto in = open_input(path);
  std::vector<Tree> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    try {
      out.push_back(parse_tree(line));
    } catch (const InputError& e) {
      throw InputError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

template <class S>
int run_learn(const LearnArgs& args) {
  RankedAlphabet alphabet;
  typename SimulatedTeacher<S>::Target target;
  const bool corpus = !args.distance.empty();
  if (corpus) {
    auto in = open_input(args.target);
    auto oracle = std::make_shared<CorpusOracle<S>>(read_corpus<S>(in), Num<S>::parse(args.q),
                                                    parse_distance(args.distance));
    alphabet = oracle->alphabet();
    target = [oracle](const Tree& t) { return (*oracle)(t); };
  } else if (is_automaton_file(args.target)) {
    auto in = open_input(args.target);
    auto a = read_mta<S>(in);
    alphabet = a.alphabet();
    target = mta_target(a);
  } else {
    auto in = open_input(args.target);
    auto g = read_wcfg<S>(in);
    alphabet = g.alphabet();
    target = grammar_target(g);
  }

  CandidateConfig cfg;
  cfg.weights = load_weights(args.weights);
  if (args.parses == "all")
    cfg.parses = ParseMode::All;
  else if (args.parses == "optimal")
    cfg.parses = ParseMode::Optimal;
  else
    throw InputError("unknown parse mode '" + args.parses + "'");
  if (args.seq == "exhaustive") {
    cfg.strategy = Exhaustive{args.max_len};
  } else if (args.seq == "sampling") {
    cfg.strategy = RandomSampling{args.count, args.max_len, args.seed};
  } else if (args.seq == "duplications") {
    if (args.base.empty()) throw InputError("--seq duplications needs --base");
    cfg.strategy = Duplications{read_tree_file(args.base), args.max_dup};
  } else {
    throw InputError("unknown SEQ strategy '" + args.seq + "'");
  }

  S epsilon = args.epsilon.empty() ? default_epsilon<S>(corpus) : Num<S>::parse(args.epsilon);
  SimulatedTeacher<S> teacher(target, candidates(cfg, alphabet), epsilon);

  LearnOptions<S> opts;
  opts.max_iterations = args.max_iterations;
  std::string last_table;
  if (!args.dump_table.empty())
    opts.on_hypothesis = [&last_table](ObservationTable<S>& tbl, const Mta<S>&) {
      std::ostringstream os;
      tbl.dump(os);
      last_table = os.str();
    };

  auto report = learn<S>(teacher, alphabet, opts);

  fs::create_directories(args.out);
  const fs::path dir(args.out);
  write_file(dir / "hypothesis.mta", mta_to_string(report.hypothesis));
  auto wcfg = pmta_to_wcfg(report.hypothesis);
  write_file(dir / "hypothesis.wcfg", wcfg_to_string(wcfg));
  try {
    write_file(dir / "pcfg.wcfg", wcfg_to_string(wcfg_to_pcfg(wcfg)));
  } catch (const PreconditionError& e) {
    std::cerr << "treelearn: no normalized grammar: " << e.what() << "\n";
  }
  auto json = report_json(report);
  json["scalar"] = Num<S>::name;
  write_file(dir / "report.json", json.dump(2) + "\n");
  if (!args.dump_table.empty()) write_file(args.dump_table, last_table);
  std::cout << json.dump() << "\n";
  return kOk;
}

template <class S>
int run_eval(const EvalArgs& args) {
  std::function<S(const Tree&)> value;
  RankedAlphabet alphabet;
  {
    auto in = open_input(args.model);
    if (is_automaton_file(args.model)) {
      auto a = read_mta<S>(in);
      alphabet = a.alphabet();
      value = mta_target(a);
    } else {
      auto g = read_wcfg<S>(in);
      alphabet = g.alphabet();
      value = grammar_target(g);
    }
  }
  std::ifstream file;
  if (!args.input.empty() && args.input != "-") file = open_input(args.input);
  std::istream& in = args.input.empty() || args.input == "-" ? std::cin : file;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string text = trim(line);
    if (text.empty()) continue;
    std::optional<Tree> parsed;
    try {
      parsed = parse_tree(text);
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(lineno) + ": " + e.what());
    }
    const Tree& t = *parsed;
    S v = fits_alphabet(t, alphabet) ? value(t) : Num<S>::zero();
    std::cout << format_value(v) << "\t" << t.str() << "\n";
  }
  return kOk;
}

template <class S>
int run_convert(const ConvertArgs& args) {
  const int modes = args.pmta_to_wcfg + args.wcfg_to_pmta + args.wcfg_to_pcfg;
  if (modes != 1) throw InputError("choose exactly one of --pmta-to-wcfg, --wcfg-to-pmta, --wcfg-to-pcfg");
  auto in = open_input(args.input);
  std::string text;
  if (args.pmta_to_wcfg) {
    text = wcfg_to_string(pmta_to_wcfg(read_mta<S>(in)));
  } else if (args.wcfg_to_pmta) {
    text = mta_to_string(wcfg_to_pmta(read_wcfg<S>(in)));
  } else {
    auto g = read_wcfg<S>(in);
    text = is_pcfg(g) ? wcfg_to_string(g) : wcfg_to_string(wcfg_to_pcfg(g));
  }
  if (args.output.empty() || args.output == "-")
    std::cout << text;
  else
    write_file(args.output, text);
  return kOk;
}

int run_trees(const TreesArgs& args) {
  std::vector<std::pair<std::size_t, GeneString>> corpus;
  if (args.input.empty() || args.input == "-") {
    corpus = read_strings(std::cin);
  } else {
    auto in = open_input(args.input);
    corpus = read_strings(in);
  }
  WeightFunction w;
  if (args.weights.empty())
    w = SubstringFrequency(corpus).function();
  else if (args.weights == "zero")
    w = zero_weights();
  else
    w = load_weights(args.weights);

  std::optional<Tree> against;
  DistanceKind kind = DistanceKind::Swap;
  if (!args.distance.empty()) {
    kind = parse_distance(args.distance);
    if (args.against.empty()) throw InputError("--distance needs --against");
    against = parse_tree(args.against);
  }
  for (const auto& [count, s] : corpus) {
    auto scored = gene_tree(s, w);
    if (against)
      std::cout << distance(kind, scored.tree, *against).str() << "\t" << scored.tree.str() << "\n";
    else
      std::cout << scored.tree.str() << "\t" << scored.score << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn structurally unambiguous weighted grammars from simulated teachers"};
  app.require_subcommand(1);

  LearnArgs la;
  auto* learn_cmd = app.add_subcommand("learn", "Learn an automaton and grammar from a target");
  learn_cmd->add_option("--target", la.target, "Grammar (.wcfg), automaton (.mta) or corpus TSV")->required();
  learn_cmd->add_option("--distance", la.distance, "Treat the target as a corpus: swap or duplication");
  learn_cmd->add_option("--q", la.q, "Corpus decay factor in (0,1)");
  learn_cmd->add_option("--seq", la.seq, "exhaustive, sampling or duplications");
  learn_cmd->add_option("--max-len", la.max_len, "Longest candidate string");
  learn_cmd->add_option("--count", la.count, "Number of sampled strings");
  learn_cmd->add_option("--seed", la.seed, "Sampling seed");
  learn_cmd->add_option("--max-dup", la.max_dup, "Extra copies per leaf for duplications");
  learn_cmd->add_option("--base", la.base, "Base trees for duplications, one per line");
  learn_cmd->add_option("--parses", la.parses, "Candidate trees per string: all or optimal");
  learn_cmd->add_option("--weights", la.weights, "Strings file scoring substrings for optimal parses");
  learn_cmd->add_option("--epsilon", la.epsilon, "Equivalence tolerance");
  auto* exact_flag = learn_cmd->add_flag("--exact", la.exact, "Exact rational arithmetic");
  learn_cmd->add_flag("--float", la.use_float, "Double precision arithmetic")->excludes(exact_flag);
  learn_cmd->add_option("--max-iterations", la.max_iterations, "Iteration cap (0 picks a default)");
  learn_cmd->add_option("--out", la.out, "Output directory");
  learn_cmd->add_option("--dump-table", la.dump_table, "Write the final observation table as TSV");

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate trees under a grammar or automaton");
  eval_cmd->add_option("model", ea.model, "Grammar (.wcfg) or automaton (.mta)")->required();
  eval_cmd->add_option("input", ea.input, "Trees, one per line (default stdin)");
  eval_cmd->add_flag("--float", ea.use_float, "Double precision arithmetic");

  ConvertArgs ca;
  auto* convert_cmd = app.add_subcommand("convert", "Convert between automata and grammars");
  convert_cmd->add_option("input", ca.input, "Input file")->required();
  convert_cmd->add_option("-o,--output", ca.output, "Output file (default stdout)");
  convert_cmd->add_flag("--pmta-to-wcfg", ca.pmta_to_wcfg, "Positive automaton to grammar");
  convert_cmd->add_flag("--wcfg-to-pmta", ca.wcfg_to_pmta, "Grammar to positive automaton");
  convert_cmd->add_flag("--wcfg-to-pcfg", ca.wcfg_to_pcfg, "Normalize a grammar");
  convert_cmd->add_flag("--float", ca.use_float, "Double precision arithmetic");

  TreesArgs ta;
  auto* trees_cmd = app.add_subcommand("trees", "Build gene-cluster trees from a strings corpus");
  trees_cmd->add_option("input", ta.input, "Strings file (default stdin)");
  trees_cmd->add_option("--weights", ta.weights,
                        "Strings file scoring substrings, or 'zero' (default: the input corpus)");
  trees_cmd->add_option("--distance", ta.distance, "Print distances: swap or duplication");
  trees_cmd->add_option("--against", ta.against, "Tree to measure distances against");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kInput;
  }

  try {
    if (*learn_cmd) return la.use_float ? run_learn<double>(la) : run_learn<Rational>(la);
    if (*eval_cmd) return ea.use_float ? run_eval<double>(ea) : run_eval<Rational>(ea);
    if (*convert_cmd) return ca.use_float ? run_convert<double>(ca) : run_convert<Rational>(ca);
    if (*trees_cmd) return run_trees(ta);
  } catch (const InputError& e) {
    std::cerr << "treelearn: " << e.what() << "\n";
    return kInput;
  } catch (const CapExceeded& e) {
    std::cerr << "treelearn: " << e.what() << "\n";
    return kCap;
  } catch (const PreconditionError& e) {
    std::cerr << "treelearn: " << e.what() << "\n";
    return kPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "treelearn: " << e.what() << "\n";
    return kInput;
  }
  return kOk;
}
