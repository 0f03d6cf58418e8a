#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "lohmm/error.hpp"
#include "lohmm/model.hpp"
#include "lohmm/parser.hpp"
#include "lohmm/sampling.hpp"
#include "support/fixtures.hpp"

using namespace lohmm;
using namespace lohmm::testing;

namespace {

// Parses and validates; returns the report (model discarded).
ValidationReport try_validate(const std::string& text) {
  Model m = parse_model(text);
  return validate(m);
}

bool rejected(const std::string& text) {
  try {
    return !try_validate(text).ok();
  } catch (const ParseError&) {
    return true;
  }
}

bool some_error_contains(const ValidationReport& report, const std::string& needle) {
  for (const std::string& e : report.errors)
    if (e.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("every shipped fixture validates") {
  for (const char* name :
       {"coin-files.lohmm", "fig1.lohmm", "anbncn.lohmm", "hmm3.lohmm",
        "unix-U.lohmm", "unix-N.lohmm", "unix-gen.lohmm"}) {
    CAPTURE(name);
    Model m = parse_model(read_file(fixture_path(name)));
    ValidationReport report = validate(m);
    CHECK(report.errors.empty());
    CHECK(m.validated);
  }
}

TEST_CASE("validation groups transitions into body-variance classes") {
  Model m = load_fixture("coin-files.lohmm");
  REQUIRE(m.classes.size() == 2);  // start and st(F)
  CHECK(m.classes[0] == std::vector<int>{0});
  CHECK(m.classes[1] == std::vector<int>{1, 2});
  CHECK(m.body_class == std::vector<int>{0, 1, 1});
  CHECK(is_variant(m.class_body[1], m.transitions[1].body));
}

TEST_CASE("a body set that is not glb-closed is rejected") {
  ValidationReport report = try_validate(
      "domain file = { hmm1, lohmm1 }.\n"
      "domain user = { tex, other }.\n"
      "predicate emacs(file, user).\n"
      "predicate emacs(file).\n"
      "1.0 : emacs(F, U) <- start.\n"
      "1.0 : emacs(F, U) <- emacs(hmm1, User) emits emacs(F).\n"
      "1.0 : emacs(F, U) <- emacs(File, tex) emits emacs(F).\n");
  CHECK_FALSE(report.ok());
  CHECK(some_error_contains(report, "emacs(hmm1, User)"));
  CHECK(some_error_contains(report, "emacs(File, tex)"));
  CHECK(some_error_contains(report, "greatest lower bound"));

  // Adding the glb as a body of its own repairs the model.
  ValidationReport fixed = try_validate(
      "domain file = { hmm1, lohmm1 }.\n"
      "domain user = { tex, other }.\n"
      "predicate emacs(file, user).\n"
      "predicate emacs(file).\n"
      "1.0 : emacs(F, U) <- start.\n"
      "1.0 : emacs(F, U) <- emacs(hmm1, User) emits emacs(F).\n"
      "1.0 : emacs(F, U) <- emacs(File, tex) emits emacs(F).\n"
      "1.0 : emacs(F, U) <- emacs(hmm1, tex) emits emacs(F).\n");
  CHECK(fixed.ok());
}

TEST_CASE("per-body probability mass must sum to one") {
  CHECK(rejected(
      "domain file = { f1 }.\npredicate st(file).\npredicate out(file).\n"
      "1.0 : st(F) <- start.\n"
      "0.8 : st(F) <- st(F) emits out(F).\n"
      "0.4 : st(F) <- st(F) emits out(F).\n"));
  CHECK(rejected(  // priors too
      "domain file = { f1 }.\npredicate st(file).\npredicate out(file).\n"
      "0.6 : st(F) <- start.\n0.3 : st(F) <- start.\n"
      "1.0 : st(F) <- st(F) emits out(F).\n"));
  CHECK(rejected(  // probabilities outside [0, 1]
      "domain file = { f1 }.\npredicate st(file).\npredicate out(file).\n"
      "1.0 : st(F) <- start.\n"
      "1.4 : st(F) <- st(F) emits out(F).\n"
      "-0.4 : st(F) <- st(F) emits out(F).\n"));
}

TEST_CASE("reserved start and end atoms keep their roles") {
  // A prior must not emit.
  CHECK(rejected("domain file = { f1 }.\npredicate st(file).\npredicate out(file).\n"
                 "1.0 : st(F) <- start emits out(F).\n"
                 "1.0 : st(F) <- st(F) emits out(F).\n"));
  // start is not a head.
  CHECK(rejected("domain file = { f1 }.\npredicate st(file).\npredicate out(file).\n"
                 "1.0 : st(F) <- start.\n"
                 "0.5 : start <- st(F) emits out(F).\n"
                 "0.5 : st(F) <- st(F) emits out(F).\n"));
  // end is not a body.
  CHECK(rejected("domain file = { f1 }.\npredicate st(file).\npredicate out(file).\n"
                 "1.0 : st(F) <- start.\n"
                 "1.0 : end <- st(F) emits end.\n"
                 "1.0 : st(F) <- end emits out(F).\n"));
  // A model without priors is rejected.
  CHECK(rejected("domain file = { f1 }.\npredicate st(file).\npredicate out(file).\n"
                 "1.0 : st(F) <- st(F) emits out(F).\n"));
}

TEST_CASE("zero-probability transitions are pruned with a warning") {
  Model m = parse_model(
      "domain file = { f1, f2 }.\npredicate st(file).\npredicate out(file).\n"
      "1.0 : st(F) <- start.\n"
      "0.6 : st(F) <- st(F) emits out(F).\n"
      "0.4 : st(_) <- st(F) emits out(F).\n"
      "0.0 : out(F) <- st(F) emits out(F).\n");
  ValidationReport report = validate(m);
  CHECK(report.ok());
  CHECK_FALSE(report.warnings.empty());
  CHECK(m.transitions.size() == 3);
}

TEST_CASE("free head and observation variables need enumerable types") {
  // No finite domain at all.
  ValidationReport report = try_validate(
      "domain nat.\nfunctor s(nat) : nat.\npredicate p(nat).\n"
      "1.0 : p(X) <- start.\n"
      "1.0 : p(s(X)) <- p(X) emits p(X).\n");
  CHECK_FALSE(report.ok());
  CHECK(some_error_contains(report, "constant"));
}

TEST_CASE("selection declarations are checked against their domains") {
  const std::string header =
      "domain file = { f1, f2 }.\npredicate st(file).\npredicate out(file).\n";
  const std::string body =
      "1.0 : st(F) <- start.\n"
      "0.6 : st(F) <- st(F) emits out(F).\n"
      "0.4 : st(_) <- st(F) emits out(F).\n";
  CHECK(try_validate(header + "selection st/1 arg 1 { f1: 0.3, f2: 0.7 }.\n" + body).ok());
  // Sum must be one.
  CHECK(rejected(header + "selection st/1 arg 1 { f1: 0.3, f2: 0.3 }.\n" + body));
  // Every domain element must appear.
  CHECK(rejected(header + "selection st/1 arg 1 { f1: 1.0 }.\n" + body));
  // Identifier positions have no declarable selection.
  CHECK(rejected(
      "domain d = { x, y }.\nidentifier d.\npredicate p(d).\npredicate o(d).\n"
      "selection p/1 arg 1 { x: 0.3, y: 0.7 }.\n"
      "1.0 : p(_) <- start.\n"
      "1.0 : p(_) <- p(X) emits o(X).\n"));
}

TEST_CASE("step_distribution on the coin model matches the hand enumeration") {
  Model m = load_fixture("coin-files.lohmm");
  std::vector<StepEntry> steps = step_distribution(m, seq("st(f1)")[0]);
  REQUIRE(steps.size() == 2);
  CHECK(steps[0].next == seq("st(f1)")[0]);
  REQUIRE(steps[0].obs.has_value());
  CHECK(*steps[0].obs == seq("out(f1)")[0]);
  CHECK(steps[0].p == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(steps[1].next == seq("st(f2)")[0]);
  CHECK(*steps[1].obs == seq("out(f1)")[0]);
  CHECK(steps[1].p == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("step_distribution sums to one on every reachable state") {
  for (const char* name : {"coin-files.lohmm", "fig1.lohmm", "hmm3.lohmm"}) {
    CAPTURE(name);
    Model m = load_fixture(name);
    ReachableSets sets = reachable_sets(m, 3);
    for (size_t t = 1; t < sets.states.size(); ++t) {
      for (const Term& state : sets.states[t]) {
        double total = 0.0;
        for (const StepEntry& e : step_distribution(m, state)) total += e.p;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("step_distribution reproduces the classical product on arity-0 models") {
  Model m = load_fixture("hmm3.lohmm");
  std::vector<StepEntry> steps = step_distribution(m, Term::atom("h1"));
  REQUIRE(steps.size() == 6);
  const double expected[] = {0.18, 0.12, 0.28, 0.07, 0.15, 0.2};
  const char* nexts[] = {"h1", "h1", "h2", "h2", "h3", "h3"};
  const char* symbols[] = {"o1", "o2", "o1", "o2", "o1", "o2"};
  for (int i = 0; i < 6; ++i) {
    CHECK(steps[i].next == Term::atom(nexts[i]));
    CHECK(*steps[i].obs == Term::atom(symbols[i]));
    CHECK(steps[i].p == expected[i]);
  }
}

TEST_CASE("step_distribution fails loudly on dead states, end is absorbing") {
  Model m = load_fixture("anbncn.lohmm");
  CHECK(step_distribution(m, end_atom()).empty());
  // unstack(zero, zero) is not reachable and matches no body.
  Term dead = Term::atom("unstack", {Term::constant("zero"), Term::constant("zero")});
  CHECK(max_specific(m, dead).empty());
  CHECK_THROWS_AS(step_distribution(m, dead), ModelError);
}

TEST_CASE("maximal specificity prefers the most specific matching bodies") {
  Model fig1 = load_fixture("fig1.lohmm");
  Term tex_state = seq("emacs(hmm1, tex)")[0];
  Term other_state = seq("emacs(hmm1, other)")[0];
  // Both emacs(F, U) and emacs(F, tex) match; the latter wins.
  std::vector<int> on_tex = max_specific(fig1, tex_state);
  REQUIRE(on_tex.size() == 3);
  for (int idx : on_tex) CHECK(to_string(fig1.transitions[idx].body) == "emacs(F, tex)");
  // Only the general body matches emacs(hmm1, other).
  std::vector<int> on_other = max_specific(fig1, other_state);
  REQUIRE(on_other.size() == 2);
  for (int idx : on_other) CHECK(to_string(fig1.transitions[idx].body) == "emacs(F, U)");

  Model anbncn = load_fixture("anbncn.lohmm");
  // unstack(s(zero), s(s(zero))) matches both unstack bodies; the body
  // unstack(s(zero), s(Y)) is strictly more specific and must win alone.
  Term state = Term::atom(
      "unstack",
      {Term::compound("s", {Term::constant("zero")}),
       Term::compound("s", {Term::compound("s", {Term::constant("zero")})})});
  std::vector<int> survivors = max_specific(anbncn, state);
  REQUIRE(survivors.size() == 1);
  CHECK(to_string(anbncn.transitions[survivors[0]].body) == "unstack(s(zero), s(Y))");
}

TEST_CASE("selection_prob multiplies per-variable draw probabilities") {
  Model fig1 = load_fixture("fig1.lohmm");
  Term ground = seq("emacs(hmm1, tex)")[0];
  Term by_file = Term::atom("emacs", {Term::var("F"), Term::constant("tex")});
  Term by_both = Term::atom("emacs", {Term::var("F"), Term::var("E")});
  CHECK(selection_prob(fig1, ground, by_file) == doctest::Approx(0.4).epsilon(1e-12));
  // Declared 0.4 on hmm1 times uniform 0.5 on the user argument.
  CHECK(selection_prob(fig1, ground, by_both) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(selection_prob(fig1, ground, ground) == 1.0);
  CHECK_THROWS_AS(selection_prob(fig1, seq("ls(tex)")[0], by_file), ModelError);

  // Selection over all ground instances of an abstract atom is normalized.
  double total = 0.0;
  for (const Term& g : ground_instances(by_both, fig1.sigma))
    total += selection_prob(fig1, g, by_both);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("expand_priors and expand_step report weights and draws") {
  Model m = load_fixture("coin-files.lohmm");
  double total = 0.0;
  int prior_draws = 0;
  expand_priors(m, [&](int idx, const Term& state, double w,
                       const std::vector<SelDraw>& draws) {
    CHECK(idx == 0);
    CHECK(state.is_ground());
    total += w;
    prior_draws += static_cast<int>(draws.size());
  });
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(prior_draws == 2);  // one free variable per prior grounding

  double step_total = 0.0;
  int with_head_draw = 0;
  expand_step(m, seq("st(f1)")[0], seq("out(f1)")[0],
              [&](int idx, const Term& head, double w,
                  const std::vector<SelDraw>& head_draws,
                  const std::vector<SelDraw>& obs_draws) {
                CHECK((idx == 1 || idx == 2));
                CHECK(head.is_ground());
                CHECK(obs_draws.empty());  // the observation is forced by the body
                if (!head_draws.empty()) ++with_head_draw;
                step_total += w;
              });
  // 0.6 keeps the file; 0.4 redraws it uniformly: out(f1) keeps mass 1.
  CHECK(step_total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(with_head_draw == 2);  // both groundings of st(_) record their draw
}

TEST_CASE("refresh_parameters rebuilds the selection tables in place") {
  Model m = load_fixture("coin-files.lohmm");
  SelectionDecl biased;
  biased.key = SelectionKey{SymbolKey{"st", 1}, 1};
  biased.entries = {{"f1", 0.9}, {"f2", 0.1}};
  m.selection_decls = {biased};
  CHECK(refresh_parameters(m).empty());
  double f1_mass = 0.0;
  expand_priors(m, [&](int, const Term& state, double w, const std::vector<SelDraw>&) {
    if (state == seq("st(f1)")[0]) f1_mass += w;
  });
  CHECK(f1_mass == doctest::Approx(0.9).epsilon(1e-12));
}
