#include <string>
#include <vector>

#include "doctest.h"
#include "lohmm/error.hpp"
#include "lohmm/model.hpp"
#include "lohmm/parser.hpp"
#include "lohmm/printer.hpp"
#include "support/fixtures.hpp"

using namespace lohmm;
using namespace lohmm::testing;

namespace {

const char* kCoinText = R"(
domain file = { f1, f2 }.
predicate st(file).
predicate out(file).

1.0 : st(F) <- start.
0.6 : st(F) <- st(F) emits out(F).
0.4 : st(_) <- st(F) emits out(F).
)";

}  // namespace

TEST_CASE("parse_model reads declarations and transitions") {
  Model m = parse_model(kCoinText);
  CHECK_FALSE(m.validated);
  REQUIRE(m.transitions.size() == 3);
  CHECK(m.transitions[0].is_prior());
  CHECK(m.transitions[0].p == 1.0);
  CHECK_FALSE(m.transitions[0].obs.has_value());
  CHECK(m.transitions[1].p == 0.6);
  CHECK(to_string(m.transitions[1].head) == "st(F)");
  CHECK(to_string(*m.transitions[1].obs) == "out(F)");
  CHECK(m.sigma.domain("file") == std::vector<std::string>{"f1", "f2"});
}

TEST_CASE("anonymous variables are materialized fresh, never shared") {
  Model m = parse_model(kCoinText);
  const AbstractTransition& tr = m.transitions[2];
  std::vector<VarRef> head_vars = vars_of(tr.head);
  REQUIRE(head_vars.size() == 1);
  // The head's variable is not the body's F: the two are independent.
  for (const VarRef& v : vars_of(tr.body)) CHECK_FALSE(v == head_vars[0]);

  Model two = parse_model(
      "domain d = { x }.\n"
      "predicate p(d, d).\n"
      "predicate q(d).\n"
      "1.0 : p(_, _) <- start.\n"
      "1.0 : p(_, _) <- p(A, B) emits q(A).\n");
  std::vector<VarRef> vars = vars_of(two.transitions[0].head);
  REQUIRE(vars.size() == 2);  // two distinct fresh variables, not one
  CHECK_FALSE(vars[0] == vars[1]);
}

TEST_CASE("parse_model reports errors with line numbers") {
  // Unknown predicate.
  CHECK_THROWS_AS(parse_model("domain d = { x }.\n1.0 : p(x) <- start.\n"),
                  ParseError);
  // Constant outside the declared domain.
  CHECK_THROWS_AS(parse_model("domain d = { x }.\npredicate p(d).\n"
                              "1.0 : p(y) <- start.\n"),
                  ParseError);
  // Wrong arity.
  CHECK_THROWS_AS(parse_model("domain d = { x }.\npredicate p(d).\n"
                              "1.0 : p(x, x) <- start.\n"),
                  ParseError);
  // Duplicate domain declaration.
  CHECK_THROWS_AS(parse_model("domain d = { x }.\ndomain d = { y }.\n"), ParseError);
  // Missing final dot.
  CHECK_THROWS_AS(parse_model("domain d = { x }.\npredicate p(d).\n"
                              "1.0 : p(x) <- start\n"),
                  ParseError);
  // Malformed probability.
  CHECK_THROWS_AS(parse_model("domain d = { x }.\npredicate p(d).\n"
                              "p : p(x) <- start.\n"),
                  ParseError);

  try {
    parse_model("domain d = { x }.\npredicate p(d).\n1.0 : p(y) <- start.\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("comments and an empty transition section are tolerated") {
  Model m = parse_model("% nothing but declarations\ndomain d = { x }.\n"
                        "predicate p(d).\n");
  CHECK(m.transitions.empty());
  // Parsing succeeded; only validation complains about the missing priors.
  CHECK_FALSE(validate(m).ok());
}

TEST_CASE("model files round-trip through print and parse") {
  for (const char* name :
       {"coin-files.lohmm", "fig1.lohmm", "anbncn.lohmm", "hmm3.lohmm",
        "unix-gen.lohmm"}) {
    CAPTURE(name);
    Model m = parse_model(read_file(fixture_path(name)));
    std::string once = print_model(m);
    Model back = parse_model(once);
    CHECK(print_model(back) == once);  // bit-stable after one normalization
    REQUIRE(back.transitions.size() == m.transitions.size());
    for (size_t i = 0; i < m.transitions.size(); ++i) {
      CHECK(back.transitions[i].p == m.transitions[i].p);
      CHECK(to_string(back.transitions[i].head) == to_string(m.transitions[i].head));
      CHECK(to_string(back.transitions[i].body) == to_string(m.transitions[i].body));
    }
  }
}

TEST_CASE("selection declarations survive a round-trip unformatted") {
  Model m = parse_model(
      "domain file = { f1, f2 }.\n"
      "predicate st(file).\n"
      "predicate out(file).\n"
      "selection st/1 arg 1 { f1: 0.477961235, f2: 0.522038765 }.\n"
      "1.0 : st(F) <- start.\n"
      "0.6 : st(F) <- st(F) emits out(F).\n"
      "0.4 : st(_) <- st(F) emits out(F).\n");
  REQUIRE(m.selection_decls.size() == 1);
  CHECK(m.selection_decls[0].key.pred.name == "st");
  CHECK(m.selection_decls[0].key.arg == 1);
  std::string once = print_model(m);
  Model back = parse_model(once);
  REQUIRE(back.selection_decls.size() == 1);
  CHECK(back.selection_decls[0].entries[0].second == 0.477961235);
  CHECK(print_model(back) == once);
}

TEST_CASE("end-terminated models are recognized by their end heads") {
  Model fixed = make_model(kCoinText);
  CHECK(fixed.termination == Termination::FixedLength);
  Model ended = load_fixture("anbncn.lohmm");
  CHECK(ended.termination == Termination::EndTerminated);
}

TEST_CASE("parse_sequences reads one sequence per line") {
  auto seqs = parse_sequences("out(f1), out(f2).\nout(f1).\n\n% note\nend.\n");
  REQUIRE(seqs.size() == 3);
  CHECK(seqs[0].size() == 2);
  CHECK(to_string(seqs[0][1]) == "out(f2)");
  CHECK(seqs[1].size() == 1);
  CHECK(seqs[2][0] == end_atom());

  CHECK_THROWS_AS(parse_sequences("out(F).\n"), ParseError);   // non-ground
  CHECK_THROWS_AS(parse_sequences("out(f1)\n"), ParseError);   // missing dot
}

TEST_CASE("parse_labeled_sequences splits on the first tab") {
  auto corpus = parse_labeled_sequences("yes\tout(f1), out(f1).\nno\tout(f2).\n");
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[0].label == "yes");
  CHECK(corpus[0].obs.size() == 2);
  CHECK(corpus[1].label == "no");
  CHECK_THROWS_AS(parse_labeled_sequences("yes out(f1).\n"), ParseError);
}

TEST_CASE("parse_pcfg reads grammars and round-trips bit-exactly") {
  Pcfg g = parse_pcfg(read_file(fixture_path("g3.pcfg")));
  CHECK(g.start == "S");
  CHECK(g.nonterminals == std::vector<std::string>{"S", "B"});
  CHECK(g.terminals == std::vector<std::string>{"a", "b"});
  REQUIRE(g.productions.size() == 4);
  CHECK(g.productions[0].p == 0.6);
  CHECK(g.productions[0].lhs == "S");
  CHECK(g.productions[0].rhs == std::vector<std::string>{"a", "B"});

  std::string once = print_pcfg(g);
  CHECK(print_pcfg(parse_pcfg(once)) == once);

  CHECK_THROWS_AS(parse_pcfg("1.0 : S -> a.\n"), ParseError);        // no start
  CHECK_THROWS_AS(parse_pcfg("start S.\nq : S -> a.\n"), ParseError);  // bad prob
}

TEST_CASE("moore sources are recognized by the directive, not by substrings") {
  CHECK(is_moore_source("moore.\ndomain d = { x }.\n"));
  CHECK_FALSE(is_moore_source(kCoinText));
  CHECK_FALSE(is_moore_source("% moore.\ndomain d = { x }.\n"));
}
