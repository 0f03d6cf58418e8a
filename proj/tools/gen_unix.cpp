// Generates the UNIX-session fixture models over a configurable directory
// domain:
//
//   unix-U.lohmm    second-order-style model whose transitions share directory
//                   variables between body and head (323 transitions)
//   unix-N.lohmm    the same structure with all body/head sharing removed
//                   (159 transitions)
//   unix-gen.lohmm  a small session generator in the same vocabulary whose cd
//                   target repeats the preceding mkdir argument 80% of the
//                   time (with the default 5 directories)
//
// Observations mirror the successor state, so sampled sequences are directly
// evaluable under U and N.  All per-body probabilities are uniform in U and N.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lohmm/model.hpp"
#include "lohmm/printer.hpp"

namespace {

using namespace lohmm;

Term v(const std::string& name) { return Term::var(name, 0); }
Term c(const std::string& name) { return Term::constant(name); }
Term com_atom() { return Term::atom("com"); }

Alphabet base_alphabet(int dirs) {
  Alphabet sigma;
  std::vector<std::string> dir_constants;
  for (int i = 1; i <= dirs; ++i) dir_constants.push_back("d" + std::to_string(i));
  std::string err = sigma.add_domain("dir", dir_constants, true);
  if (err.empty()) err = sigma.add_identifier("dir");
  if (err.empty())
    err = sigma.add_domain("lastcom",
                           {"start", "com", "mkdir", "ls", "cd", "cp", "mv"}, true);
  if (err.empty()) err = sigma.add_predicate("com", {});
  if (err.empty()) err = sigma.add_predicate("mkdir", {"dir", "lastcom"});
  if (err.empty()) err = sigma.add_predicate("ls", {"dir", "lastcom"});
  if (err.empty()) err = sigma.add_predicate("cd", {"dir", "lastcom"});
  if (err.empty()) err = sigma.add_predicate("cp", {"dir", "dir", "lastcom"});
  if (err.empty()) err = sigma.add_predicate("mv", {"dir", "dir", "lastcom"});
  if (!err.empty()) {
    std::cerr << "internal error: " << err << "\n";
    std::exit(1);
  }
  return sigma;
}

struct Builder {
  Model m;
  std::vector<Term> heads;  // heads of the block being assembled
  Term body = start_atom();

  void begin(Term b) {
    body = std::move(b);
    heads.clear();
  }
  void head(Term h) { heads.push_back(std::move(h)); }
  // Closes the block: every head gets probability 1/n and, except for priors,
  // emits itself (the end atom included, closing the sequence).
  void commit() {
    bool prior = body == start_atom();
    double p = 1.0 / static_cast<double>(heads.size());
    for (Term& h : heads) {
      std::optional<Term> obs;
      if (!prior) obs = h;
      m.transitions.push_back(AbstractTransition{p, std::move(h), body, std::move(obs), 0});
    }
    heads.clear();
  }
};

const std::vector<std::string> kAllCommands = {"mkdir", "ls", "cd", "cp", "mv"};

Model build_u(int dirs) {
  Builder b;
  b.m.sigma = base_alphabet(dirs);

  b.begin(start_atom());
  b.head(com_atom());
  b.head(Term::atom("mkdir", {v("Dir"), c("start")}));
  b.commit();

  b.begin(com_atom());
  b.head(com_atom());
  b.head(Term::atom("mkdir", {v("Dir"), c("com")}));
  b.head(end_atom());
  b.commit();

  for (const std::string last : {"start", "com"}) {
    b.begin(Term::atom("mkdir", {v("Dir"), c(last)}));
    b.head(Term::atom("mkdir", {v("Dir"), c("com")}));
    b.head(Term::atom("mkdir", {v("New"), c("com")}));
    b.head(com_atom());
    b.head(end_atom());
    b.head(Term::atom("ls", {v("Dir"), c("mkdir")}));
    b.head(Term::atom("ls", {v("New"), c("mkdir")}));
    b.head(Term::atom("cd", {v("Dir"), c("mkdir")}));
    b.head(Term::atom("cd", {v("New"), c("mkdir")}));
    b.head(Term::atom("cp", {v("New"), v("Dir"), c("mkdir")}));
    b.head(Term::atom("cp", {v("Dir"), v("New"), c("mkdir")}));
    b.head(Term::atom("cp", {v("New"), v("New2"), c("mkdir")}));
    b.head(Term::atom("mv", {v("New"), v("Dir"), c("mkdir")}));
    b.head(Term::atom("mv", {v("Dir"), v("New"), c("mkdir")}));
    b.head(Term::atom("mv", {v("New"), v("New2"), c("mkdir")}));
    b.commit();
  }

  for (const std::string c1 : {"cd", "ls"}) {
    for (const std::string& last : kAllCommands) {
      b.begin(Term::atom(c1, {v("Dir"), c(last)}));
      b.head(Term::atom("mkdir", {v("Dir"), c("com")}));
      b.head(Term::atom("mkdir", {v("New"), c("com")}));
      b.head(com_atom());
      b.head(end_atom());
      b.head(Term::atom("ls", {v("Dir"), c(c1)}));
      b.head(Term::atom("ls", {v("New"), c(c1)}));
      b.head(Term::atom("cd", {v("Dir"), c(c1)}));
      b.head(Term::atom("cd", {v("New"), c(c1)}));
      b.head(Term::atom("cp", {v("New"), v("Dir"), c(c1)}));
      b.head(Term::atom("cp", {v("Dir"), v("New"), c(c1)}));
      b.head(Term::atom("cp", {v("New"), v("New2"), c(c1)}));
      b.head(Term::atom("mv", {v("New"), v("Dir"), c(c1)}));
      b.head(Term::atom("mv", {v("Dir"), v("New"), c(c1)}));
      b.head(Term::atom("mv", {v("New"), v("New2"), c(c1)}));
      b.commit();
    }
  }

  for (const std::string c2 : {"cp", "mv"}) {
    for (const std::string& last : kAllCommands) {
      b.begin(Term::atom(c2, {v("From"), v("To"), c(last)}));
      b.head(Term::atom("mkdir", {v("New"), c("com")}));
      b.head(com_atom());
      b.head(end_atom());
      b.head(Term::atom("ls", {v("From"), c(c2)}));
      b.head(Term::atom("ls", {v("To"), c(c2)}));
      b.head(Term::atom("ls", {v("New"), c(c2)}));
      b.head(Term::atom("cd", {v("From"), c(c2)}));
      b.head(Term::atom("cd", {v("To"), c(c2)}));
      b.head(Term::atom("cd", {v("New"), c(c2)}));
      b.head(Term::atom("cp", {v("From"), v("New"), c(c2)}));
      b.head(Term::atom("cp", {v("New"), v("To"), c(c2)}));
      b.head(Term::atom("cp", {v("New"), v("New2"), c(c2)}));
      b.head(Term::atom("mv", {v("From"), v("New"), c(c2)}));
      b.head(Term::atom("mv", {v("New"), v("To"), c(c2)}));
      b.head(Term::atom("mv", {v("New"), v("New2"), c(c2)}));
      b.commit();
    }
  }
  return std::move(b.m);
}

Model build_n(int dirs) {
  Builder b;
  b.m.sigma = base_alphabet(dirs);

  b.begin(start_atom());
  b.head(com_atom());
  b.head(Term::atom("mkdir", {v("New"), c("start")}));
  b.commit();

  b.begin(com_atom());
  b.head(com_atom());
  b.head(Term::atom("mkdir", {v("New"), c("com")}));
  b.head(end_atom());
  b.commit();

  auto no_share_heads = [&](const std::string& tag) {
    b.head(Term::atom("mkdir", {v("New"), c("com")}));
    b.head(com_atom());
    b.head(end_atom());
    b.head(Term::atom("ls", {v("New"), c(tag)}));
    b.head(Term::atom("cd", {v("New"), c(tag)}));
    b.head(Term::atom("cp", {v("New"), v("New2"), c(tag)}));
    b.head(Term::atom("mv", {v("New"), v("New2"), c(tag)}));
  };

  for (const std::string last : {"start", "com"}) {
    b.begin(Term::atom("mkdir", {v("Dir"), c(last)}));
    no_share_heads("mkdir");
    b.commit();
  }
  for (const std::string c1 : {"cd", "ls"}) {
    for (const std::string& last : kAllCommands) {
      b.begin(Term::atom(c1, {v("Dir"), c(last)}));
      no_share_heads(c1);
      b.commit();
    }
  }
  for (const std::string c2 : {"cp", "mv"}) {
    for (const std::string& last : kAllCommands) {
      b.begin(Term::atom(c2, {v("From"), v("To"), c(last)}));
      no_share_heads(c2);
      b.commit();
    }
  }
  return std::move(b.m);
}

// Sessions of the form mkdir, cd, [ls], mkdir, cd, ..., end where the cd
// argument equals the preceding mkdir argument with probability
// 0.75 + 0.25/dirs (0.8 for the default 5).
Model build_gen(int dirs) {
  Model m;
  m.sigma = base_alphabet(dirs);
  auto add = [&](double p, Term h, Term body) {
    std::optional<Term> obs;
    if (!(body == start_atom())) obs = h;
    m.transitions.push_back(AbstractTransition{p, std::move(h), std::move(body), std::move(obs), 0});
  };

  add(1.0, Term::atom("mkdir", {v("D"), c("start")}), start_atom());
  for (const std::string last : {"start", "com"}) {
    Term body = Term::atom("mkdir", {v("Dir"), c(last)});
    add(0.75, Term::atom("cd", {v("Dir"), c("mkdir")}), body);
    add(0.25, Term::atom("cd", {v("New"), c("mkdir")}), body);
  }
  {
    Term body = Term::atom("cd", {v("Dir"), c("mkdir")});
    add(0.5, Term::atom("mkdir", {v("New"), c("com")}), body);
    add(0.2, Term::atom("ls", {v("Dir"), c("cd")}), body);
    add(0.3, end_atom(), body);
  }
  {
    Term body = Term::atom("ls", {v("Dir"), c("cd")});
    add(0.6, Term::atom("mkdir", {v("New"), c("com")}), body);
    add(0.4, end_atom(), body);
  }
  return m;
}

void write_model(Model m, const std::string& path) {
  ValidationReport report = validate(m);
  for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
  if (!report.ok()) {
    for (const std::string& e : report.errors)
      std::cerr << "error: " << path << ": " << e << "\n";
    std::exit(1);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write '" << path << "'\n";
    std::exit(1);
  }
  out << print_model(m);
  std::cout << path << ": " << m.transitions.size() << " transitions\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the UNIX-session fixture models"};
  int dirs = 5;
  std::string out_dir = ".";
  app.add_option("--dirs", dirs, "Number of directory constants (default 5)")
      ->check(CLI::PositiveNumber);
  app.add_option("--out-dir", out_dir, "Output directory (default .)");
  CLI11_PARSE(app, argc, argv);

  write_model(build_u(dirs), out_dir + "/unix-U.lohmm");
  write_model(build_n(dirs), out_dir + "/unix-N.lohmm");
  write_model(build_gen(dirs), out_dir + "/unix-gen.lohmm");
  return 0;
}
