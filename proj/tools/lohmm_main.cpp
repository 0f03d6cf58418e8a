// Command-line surface for the LOHMM toolkit.
//
// Exit codes: 0 success; 1 semantic failure (validation report, zero
// likelihood, dead state, ...); 2 usage or syntax errors.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lohmm/classify.hpp"
#include "lohmm/error.hpp"
#include "lohmm/inference.hpp"
#include "lohmm/learning.hpp"
#include "lohmm/model.hpp"
#include "lohmm/moore.hpp"
#include "lohmm/parser.hpp"
#include "lohmm/pcfg.hpp"
#include "lohmm/printer.hpp"
#include "lohmm/sampling.hpp"

namespace {

using namespace lohmm;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Thrown after messages have already been printed.
struct CliFailure {
  int code;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Reads the named file, or standard input when the path is empty or "-".
std::string read_input(const std::string& path) {
  if (path.empty() || path == "-") {
    std::ostringstream os;
    os << std::cin.rdbuf();
    return os.str();
  }
  return read_file(path);
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write file '" << path << "'\n";
    throw CliFailure{1};
  }
  out << text;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

// Prints the validation report; throws CliFailure{1} when invalid.
template <typename M>
void validate_or_fail(M& m) {
  ValidationReport report = validate(m);
  print_warnings(report.warnings);
  if (!report.ok()) {
    for (const std::string& e : report.errors) std::cerr << "error: " << e << "\n";
    throw CliFailure{1};
  }
}

Model load_model(const std::string& path) {
  std::string text = read_input(path);
  if (is_moore_source(text))
    throw ModelError("this command needs a Mealy-form model, but the input "
                     "carries a 'moore.' directive");
  Model m = parse_model(text);
  validate_or_fail(m);
  return m;
}

// The --seq argument names a file when one exists, otherwise it is parsed as
// an inline sequence (a missing final '.' is tolerated there).
std::vector<std::vector<Term>> load_sequences(const std::string& arg) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) return parse_sequences(read_file(arg));
  std::string text = arg;
  size_t last = text.find_last_not_of(" \t\r\n");
  if (last != std::string::npos && text[last] != '.') text += ".";
  return parse_sequences(text);
}

std::string join_terms(const std::vector<Term>& terms) {
  std::string out;
  for (size_t i = 0; i < terms.size(); ++i) {
    if (i) out += ", ";
    out += to_string(terms[i]);
  }
  return out;
}

// --- subcommand payload structs ---------------------------------------------

struct TrainFlags {
  double pseudocount = 1.0;
  double tolerance = 0.1;
  int max_iterations = 200;
  bool exact = false;
  int jobs = 1;

  TrainOptions options() const {
    TrainOptions o;
    o.pseudocount = pseudocount;
    o.tolerance = tolerance;
    o.max_iterations = max_iterations;
    o.mode = exact ? NumericMode::Exact : NumericMode::Scaled;
    o.jobs = jobs;
    return o;
  }
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--pseudocount", f.pseudocount,
                  "Pseudocount added to every expected count (default 1)");
  cmd->add_option("--tolerance", f.tolerance,
                  "Stop when the log-likelihood gain drops below this (default 0.1)");
  cmd->add_option("--max-iterations", f.max_iterations,
                  "Iteration cap (default 200)");
  cmd->add_flag("--exact", f.exact, "Use unscaled probabilities instead of scaling");
  cmd->add_option("--jobs", f.jobs, "Worker threads (default 1)");
}

int run_validate(const std::string& model_path) {
  std::string text = read_input(model_path);
  if (is_moore_source(text)) {
    MooreModel m = parse_moore_model(text);
    validate_or_fail(m);
    std::cout << "valid Moore-form model: " << m.transitions.size()
              << " transitions, " << m.emissions.size() << " emission clauses, "
              << (m.termination == Termination::EndTerminated ? "end-terminated"
                                                              : "fixed-length")
              << "\n";
    return 0;
  }
  Model m = parse_model(text);
  validate_or_fail(m);
  std::cout << "valid model: " << m.transitions.size() << " transitions ("
            << [&] {
                 int priors = 0;
                 for (const AbstractTransition& tr : m.transitions)
                   priors += tr.is_prior() ? 1 : 0;
                 return priors;
               }()
            << " priors), "
            << (m.termination == Termination::EndTerminated ? "end-terminated"
                                                            : "fixed-length")
            << "\n";
  return 0;
}

int run_eval(const std::string& model_path, const std::string& seq_arg, bool exact,
             bool tabular) {
  NumericMode mode = exact ? NumericMode::Exact : NumericMode::Scaled;
  std::vector<std::vector<Term>> seqs = load_sequences(seq_arg);
  std::string text = read_input(model_path);
  bool any_zero = false;
  auto report = [&](size_t i, double lik, double loglik) {
    if (tabular)
      std::cout << i + 1 << "\t" << format_sig9(lik) << "\t" << format_sig9(loglik)
                << "\n";
    else
      std::cout << "sequence " << i + 1 << ": likelihood " << format_sig9(lik)
                << " log-likelihood " << format_sig9(loglik) << "\n";
    if (loglik == kNegInf) any_zero = true;
  };
  if (is_moore_source(text)) {
    MooreModel m = parse_moore_model(text);
    validate_or_fail(m);
    for (size_t i = 0; i < seqs.size(); ++i) {
      LikelihoodResult r = moore_forward(m, seqs[i], mode);
      report(i, r.likelihood, r.log_likelihood);
    }
  } else {
    Model m = parse_model(text);
    validate_or_fail(m);
    for (size_t i = 0; i < seqs.size(); ++i) {
      ForwardResult r = forward(m, seqs[i], mode);
      report(i, r.likelihood, r.log_likelihood);
    }
  }
  return any_zero ? 1 : 0;
}

int run_viterbi(const std::string& model_path, const std::string& seq_arg,
                bool abstract_mode) {
  Model m = load_model(model_path);
  std::vector<std::vector<Term>> seqs = load_sequences(seq_arg);
  bool any_zero = false;
  for (size_t i = 0; i < seqs.size(); ++i) {
    try {
      if (abstract_mode) {
        AbstractViterbiResult r = viterbi_abstract(m, seqs[i]);
        std::cout << "sequence " << i + 1 << ": probability "
                  << format_sig9(r.probability) << " log-probability "
                  << format_sig9(r.log_probability) << "\n";
        std::cout << "states: " << join_terms(r.states) << "\n";
        std::cout << "transitions:";
        for (int t : r.transitions) std::cout << " " << t + 1;
        std::cout << "\n";
      } else {
        ViterbiResult r = viterbi(m, seqs[i]);
        std::cout << "sequence " << i + 1 << ": probability "
                  << format_sig9(r.probability) << " log-probability "
                  << format_sig9(r.log_probability) << "\n";
        std::cout << "path: " << join_terms(r.path) << "\n";
      }
    } catch (const ZeroLikelihoodError&) {
      std::cout << "sequence " << i + 1 << ": no path (probability 0)\n";
      any_zero = true;
    }
  }
  return any_zero ? 1 : 0;
}

int run_train(const std::string& model_path, const std::string& seq_arg,
              const TrainFlags& flags, bool trace, const std::string& out_path) {
  Model m = load_model(model_path);
  std::vector<std::vector<Term>> seqs = load_sequences(seq_arg);
  TrainResult result = train(m, seqs, flags.options());
  print_warnings(result.warnings);
  if (trace) {
    for (size_t i = 0; i < result.log_likelihood_trace.size(); ++i)
      std::cerr << "iteration " << i << ": log-likelihood "
                << format_sig9(result.log_likelihood_trace[i]) << "\n";
  }
  std::cerr << "trained for " << result.iterations
            << " iterations, final log-likelihood "
            << format_sig9(result.log_likelihood_trace.back()) << "\n";
  write_output(out_path, print_model(result.model));
  return 0;
}

int run_sample(const std::string& model_path, int length, int count,
               std::uint64_t seed, int max_steps, bool with_states,
               const std::string& out_path) {
  Model m = load_model(model_path);
  Rng rng(seed);
  std::ostringstream out;
  for (int i = 0; i < count; ++i) {
    SampleResult r = length > 0 ? sample_fixed(m, length, rng)
                                : sample_until_end(m, rng, max_steps);
    if (with_states) out << "% states: " << join_terms(r.states) << "\n";
    out << print_sequence(r.observations) << "\n";
  }
  write_output(out_path, out.str());
  return 0;
}

std::string sanitize_label(const std::string& label) {
  std::string out;
  for (char c : label)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')
               ? c
               : '_';
  return out.empty() ? "_" : out;
}

int run_classify_fit(const std::string& model_path, const std::string& corpus_path,
                     const TrainFlags& flags, const std::string& prefix) {
  Model tmpl = load_model(model_path);
  std::vector<LabeledSequence> corpus = parse_labeled_sequences(read_file(corpus_path));
  Classifier c = fit_classifier(tmpl, corpus, flags.options());

  std::ostringstream manifest;
  std::vector<std::string> files;
  for (size_t k = 0; k < c.labels.size(); ++k) {
    std::string file = prefix + "." + sanitize_label(c.labels[k]) + ".lohmm";
    for (size_t j = 0; j < files.size(); ++j)
      if (files[j] == file) file = prefix + "." + std::to_string(k) + ".lohmm";
    files.push_back(file);
    write_output(file, print_model(c.models[k]));
    manifest << c.labels[k] << "\t" << format_double(std::exp(c.log_prior[k])) << "\t"
             << file << "\n";
    std::cout << "class " << c.labels[k] << ": prior "
              << format_sig9(std::exp(c.log_prior[k])) << ", model " << file << "\n";
  }
  write_output(prefix + ".classifier", manifest.str());
  std::cout << "manifest: " << prefix << ".classifier\n";
  return 0;
}

Classifier load_classifier(const std::string& manifest_path) {
  Classifier c;
  std::istringstream in(read_file(manifest_path));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    size_t t1 = line.find('\t');
    size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      throw ParseError("expected '<label> TAB <prior> TAB <model file>'", lineno);
    std::string label = line.substr(0, t1);
    double prior = 0.0;
    try {
      prior = std::stod(line.substr(t1 + 1, t2 - t1 - 1));
    } catch (const std::exception&) {
      throw ParseError("malformed prior", lineno);
    }
    std::string file = line.substr(t2 + 1);
    while (!file.empty() && (file.back() == '\r' || file.back() == ' ')) file.pop_back();
    Model m = parse_model(read_file(file));
    validate_or_fail(m);
    c.labels.push_back(label);
    c.models.push_back(std::move(m));
    c.log_prior.push_back(std::log(prior));
  }
  if (c.labels.empty()) throw ParseError("empty classifier manifest");
  return c;
}

int run_classify_predict(const std::string& manifest_path, const std::string& seq_arg,
                         bool scores) {
  Classifier c = load_classifier(manifest_path);
  std::vector<std::vector<Term>> seqs = load_sequences(seq_arg);
  if (scores) std::cout << "classes: " << [&] {
    std::string s;
    for (size_t k = 0; k < c.labels.size(); ++k)
      s += (k ? ", " : "") + c.labels[k];
    return s;
  }() << "\n";
  bool any_zero = false;
  for (size_t i = 0; i < seqs.size(); ++i) {
    try {
      Prediction p = predict(c, seqs[i]);
      std::cout << "sequence " << i + 1 << ": " << p.label;
      if (scores) {
        std::cout << " scores:";
        for (double s : p.scores) std::cout << " " << format_sig9(s);
      }
      std::cout << "\n";
    } catch (const ZeroLikelihoodError&) {
      std::cout << "sequence " << i + 1 << ": no class assigns positive probability\n";
      any_zero = true;
    }
  }
  return any_zero ? 1 : 0;
}

int run_classify_cv(const std::string& model_path, const std::string& corpus_path,
                    const TrainFlags& flags, bool loo, int folds,
                    std::uint64_t seed) {
  Model tmpl = load_model(model_path);
  std::vector<LabeledSequence> corpus = parse_labeled_sequences(read_file(corpus_path));
  CvOptions cv;
  cv.leave_one_out = loo;
  cv.folds = folds;
  cv.seed = seed;
  CvResult r = cross_validate(tmpl, corpus, flags.options(), cv);
  print_warnings(r.warnings);
  if (r.total > 0)
    std::cout << "accuracy: " << format_sig9(r.accuracy) << " (" << r.correct << "/"
              << r.total << ")\n";
  else
    std::cout << "accuracy: undefined (no fold could be evaluated)\n";
  std::cout << "folds run: " << r.folds_run << " skipped: " << r.folds_skipped << "\n";
  std::cout << "confusion (true class -> predicted):\n";
  for (size_t i = 0; i < r.labels.size(); ++i) {
    std::cout << "  " << r.labels[i] << ":";
    for (size_t j = 0; j < r.labels.size(); ++j)
      std::cout << " " << r.labels[j] << "=" << r.confusion[i][j];
    std::cout << "\n";
  }
  for (size_t f = 0; f < r.fold_test_log.size(); ++f)
    std::cout << "fold " << f + 1 << " test log-likelihood "
              << format_sig9(r.fold_test_log[f]) << "\n";
  return 0;
}

int run_compare(const std::string& model_a, const std::string& model_b,
                const std::string& seq_arg, const TrainFlags& flags, bool loo,
                int folds, bool as_is, std::uint64_t seed) {
  Model a = load_model(model_a);
  Model b = load_model(model_b);
  std::vector<std::vector<Term>> corpus = load_sequences(seq_arg);
  CompareOptions opt;
  if (as_is)
    opt.scheme = CompareScheme::AsIs;
  else if (loo || folds <= 0)
    opt.scheme = CompareScheme::LeaveOneOut;
  else
    opt.scheme = CompareScheme::KFold;
  opt.folds = folds;
  opt.seed = seed;
  opt.train = flags.options();
  CompareResult r = compare_models(a, b, corpus, opt);
  print_warnings(r.warnings);
  std::cout << "sequences: " << corpus.size() << " compared: " << r.comparisons
            << " excluded: " << r.excluded << "\n";
  std::cout << "wins a: " << r.wins_a << " wins b: " << r.wins_b
            << " ties: " << r.ties << "\n";
  std::cout << "win rate a: " << format_sig9(r.win_rate_a) << "\n";
  std::cout << "sum log ratio: " << format_sig9(r.sum_log_ratio) << "\n";
  if (!as_is)
    std::cout << "train log-likelihood a: " << format_sig9(r.train_log_a)
              << " b: " << format_sig9(r.train_log_b) << "\n";
  std::cout << "test log-likelihood a: " << format_sig9(r.test_log_a)
            << " b: " << format_sig9(r.test_log_b) << "\n";
  return 0;
}

int run_pcfg2lohmm(const std::string& grammar_path, const std::string& out_path) {
  Pcfg g = parse_pcfg(read_input(grammar_path));
  Model m = pcfg_to_lohmm(g);
  write_output(out_path, print_model(m));
  return 0;
}

int run_mealy2moore(const std::string& model_path, const std::string& out_path,
                    std::uint64_t prior_cap) {
  Model m = load_model(model_path);
  MooreModel moore = mealy_to_moore(m, prior_cap);
  write_output(out_path, print_moore_model(moore));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Logical hidden Markov model toolkit"};
  app.require_subcommand(1);

  // validate
  std::string v_model;
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "Parse and validate a model file");
  validate_cmd->add_option("--model,model", v_model,
                           "Model file (default: standard input)");

  // eval
  std::string e_model, e_seq;
  bool e_exact = false, e_tabular = false;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "Forward likelihood of observation sequences");
  eval_cmd->add_option("--model", e_model, "Model file (default: standard input)");
  eval_cmd->add_option("--seq", e_seq, "Sequence file, or an inline sequence")
      ->required();
  eval_cmd->add_flag("--exact", e_exact, "Unscaled probabilities");
  eval_cmd->add_flag("--tabular", e_tabular, "Tab-separated output");

  // viterbi
  std::string d_model, d_seq;
  bool d_abstract = false;
  CLI::App* viterbi_cmd =
      app.add_subcommand("viterbi", "Most likely state sequence for observations");
  viterbi_cmd->add_option("--model", d_model, "Model file (default: standard input)");
  viterbi_cmd->add_option("--seq", d_seq, "Sequence file, or an inline sequence")
      ->required();
  viterbi_cmd->add_flag("--abstract", d_abstract,
                        "Decode abstract transitions instead of summing them");

  // train
  std::string t_model, t_seq, t_out = "-";
  TrainFlags t_flags;
  bool t_trace = false;
  CLI::App* train_cmd = app.add_subcommand("train", "Fit parameters with EM");
  train_cmd->add_option("--model", t_model, "Model file (default: standard input)");
  train_cmd->add_option("--seq", t_seq, "Sequence file, or an inline sequence")
      ->required();
  add_train_flags(train_cmd, t_flags);
  train_cmd->add_flag("--trace", t_trace, "Per-iteration log-likelihoods on stderr");
  train_cmd->add_option("-o,--out", t_out, "Output model file (default: stdout)");

  // sample
  std::string s_model, s_out;
  int s_length = 0, s_count = 1, s_max_steps = 10000;
  std::uint64_t s_seed = 0;
  bool s_states = false;
  CLI::App* sample_cmd = app.add_subcommand("sample", "Draw observation sequences");
  sample_cmd->add_option("--model", s_model, "Model file (default: standard input)");
  sample_cmd->add_option("--length", s_length,
                         "Emissions per sequence (default: run until 'end')");
  sample_cmd->add_option("--count", s_count, "Number of sequences (default 1)");
  sample_cmd->add_option("--seed", s_seed, "Random seed (default 0)");
  sample_cmd->add_option("--max-steps", s_max_steps,
                         "Step cap when running until 'end' (default 10000)");
  sample_cmd->add_flag("--with-states", s_states,
                       "Print the hidden states as a comment line");
  sample_cmd->add_option("-o,--out", s_out, "Output file (default: stdout)");

  // classify fit|predict|cv
  CLI::App* classify_cmd =
      app.add_subcommand("classify", "Plug-in multiclass sequence classification");
  classify_cmd->require_subcommand(1);
  std::string cf_model, cf_corpus, cf_prefix;
  TrainFlags cf_flags;
  CLI::App* fit_cmd =
      classify_cmd->add_subcommand("fit", "Train one model per class");
  fit_cmd->add_option("--model", cf_model, "Template model file (default: stdin)");
  fit_cmd->add_option("--corpus", cf_corpus, "Labeled corpus file")->required();
  fit_cmd->add_option("--out-prefix", cf_prefix, "Prefix for written model files")
      ->required();
  add_train_flags(fit_cmd, cf_flags);

  std::string cp_manifest, cp_seq;
  bool cp_scores = false;
  CLI::App* predict_cmd =
      classify_cmd->add_subcommand("predict", "Classify sequences");
  predict_cmd->add_option("--classifier", cp_manifest, "Manifest written by fit")
      ->required();
  predict_cmd->add_option("--seq", cp_seq, "Sequence file, or an inline sequence")
      ->required();
  predict_cmd->add_flag("--scores", cp_scores, "Print per-class log scores");

  std::string cv_model, cv_corpus;
  TrainFlags cv_flags;
  bool cv_loo = false;
  int cv_folds = 10;
  std::uint64_t cv_seed = 0;
  CLI::App* cv_cmd = classify_cmd->add_subcommand("cv", "Cross-validated accuracy");
  cv_cmd->add_option("--model", cv_model, "Template model file (default: stdin)");
  cv_cmd->add_option("--corpus", cv_corpus, "Labeled corpus file")->required();
  cv_cmd->add_flag("--loo", cv_loo, "Leave-one-out instead of k-fold");
  cv_cmd->add_option("--folds", cv_folds, "Fold count for k-fold (default 10)");
  cv_cmd->add_option("--seed", cv_seed, "Shuffle seed (default 0)");
  add_train_flags(cv_cmd, cv_flags);

  // compare
  std::string cm_a, cm_b, cm_seq;
  TrainFlags cm_flags;
  bool cm_loo = false, cm_as_is = false;
  int cm_folds = 0;
  std::uint64_t cm_seed = 0;
  CLI::App* compare_cmd = app.add_subcommand(
      "compare", "Held-out log-likelihood comparison of two model structures");
  compare_cmd->add_option("--model-a", cm_a, "First model file")->required();
  compare_cmd->add_option("--model-b", cm_b, "Second model file")->required();
  compare_cmd->add_option("--seq", cm_seq, "Sequence file, or an inline sequence")
      ->required();
  compare_cmd->add_flag("--loo", cm_loo, "Leave-one-out retraining (default)");
  compare_cmd->add_option("--folds", cm_folds, "Use k-fold retraining instead");
  compare_cmd->add_flag("--as-is", cm_as_is, "Score the given models, no retraining");
  compare_cmd->add_option("--seed", cm_seed, "Fold shuffle seed (default 0)");
  add_train_flags(compare_cmd, cm_flags);

  // pcfg2lohmm
  std::string g_grammar, g_out = "-";
  CLI::App* pcfg_cmd = app.add_subcommand(
      "pcfg2lohmm", "Compile a Greibach-normal-form grammar into a model");
  pcfg_cmd->add_option("--grammar,grammar", g_grammar,
                       "Grammar file (default: standard input)");
  pcfg_cmd->add_option("-o,--out", g_out, "Output model file (default: stdout)");

  // mealy2moore
  std::string mm_model, mm_out = "-";
  std::uint64_t mm_cap = 100000;
  CLI::App* moore_cmd = app.add_subcommand(
      "mealy2moore", "Convert a model to Moore form (observations on states)");
  moore_cmd->add_option("--model,model", mm_model,
                        "Model file (default: standard input)");
  moore_cmd->add_option("-o,--out", mm_out, "Output model file (default: stdout)");
  moore_cmd->add_option("--prior-cap", mm_cap,
                        "Abort when the constructed prior exceeds this many states");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*validate_cmd) return run_validate(v_model);
    if (*eval_cmd) return run_eval(e_model, e_seq, e_exact, e_tabular);
    if (*viterbi_cmd) return run_viterbi(d_model, d_seq, d_abstract);
    if (*train_cmd) return run_train(t_model, t_seq, t_flags, t_trace, t_out);
    if (*sample_cmd)
      return run_sample(s_model, s_length, s_count, s_seed, s_max_steps, s_states,
                        s_out);
    if (*classify_cmd) {
      if (*fit_cmd) return run_classify_fit(cf_model, cf_corpus, cf_flags, cf_prefix);
      if (*predict_cmd) return run_classify_predict(cp_manifest, cp_seq, cp_scores);
      if (*cv_cmd)
        return run_classify_cv(cv_model, cv_corpus, cv_flags, cv_loo, cv_folds,
                               cv_seed);
    }
    if (*compare_cmd)
      return run_compare(cm_a, cm_b, cm_seq, cm_flags, cm_loo, cm_folds, cm_as_is,
                         cm_seed);
    if (*pcfg_cmd) return run_pcfg2lohmm(g_grammar, g_out);
    if (*moore_cmd) return run_mealy2moore(mm_model, mm_out, mm_cap);
  } catch (const CliFailure& f) {
    return f.code;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
