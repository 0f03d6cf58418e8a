#include <algorithm>
#include <map>
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

bool layer_contains(const std::vector<Term>& layer, const Term& t) {
  return std::find(layer.begin(), layer.end(), t) != layer.end();
}

}  // namespace

TEST_CASE("the random source is deterministic and well-ranged") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 1000; ++i) {
    double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(a.below(7) == b.below(7));
    CHECK(a.below(7) < 7);
    CHECK(b.below(7) < 7);  // keep the two streams aligned
  }
  bool diverged = false;
  for (int i = 0; i < 16 && !diverged; ++i) diverged = a.raw() != c.raw();
  CHECK(diverged);
}

TEST_CASE("sample_fixed is reproducible and shaped T+1 / T") {
  Model m = load_fixture("fig1.lohmm");
  Rng r1(7), r2(7), r3(8);
  SampleResult a = sample_fixed(m, 6, r1);
  SampleResult b = sample_fixed(m, 6, r2);
  REQUIRE(a.states.size() == 7);
  REQUIRE(a.observations.size() == 6);
  CHECK(a.states == b.states);
  CHECK(a.observations == b.observations);

  bool any_difference = false;
  for (int trial = 0; trial < 8 && !any_difference; ++trial)
    any_difference = sample_fixed(m, 6, r3).observations != a.observations;
  CHECK(any_difference);
}

TEST_CASE("sampled trajectories stay inside the reachable layers") {
  for (const char* name : {"coin-files.lohmm", "fig1.lohmm", "hmm3.lohmm"}) {
    CAPTURE(name);
    Model m = load_fixture(name);
    const int length = 5;
    ReachableSets sets = reachable_sets(m, length + 1);
    Rng rng(123);
    for (int trial = 0; trial < 20; ++trial) {
      SampleResult s = sample_fixed(m, length, rng);
      for (int t = 0; t <= length; ++t) {
        CHECK(s.states[t].is_ground());
        CHECK(layer_contains(sets.states[t + 1], s.states[t]));
      }
      for (int t = 0; t < length; ++t)
        CHECK(layer_contains(sets.observations[t + 1], s.observations[t]));
    }
  }
}

TEST_CASE("a deterministic chain admits exactly one trajectory") {
  Model m = make_model(
      "domain d = { x, y }.\npredicate p(d).\npredicate o(d).\n"
      "1.0 : p(x) <- start.\n"
      "1.0 : p(y) <- p(x) emits o(x).\n"
      "1.0 : p(x) <- p(y) emits o(y).\n");
  for (std::uint64_t seedval : {1ull, 99ull, 123456ull}) {
    Rng rng(seedval);
    SampleResult s = sample_fixed(m, 4, rng);
    CHECK(s.observations == seq("o(x), o(y), o(x), o(y)"));
  }
}

TEST_CASE("walking into a dead state reports a model error") {
  Model m = make_model(
      "domain d = { x }.\npredicate a.\npredicate b.\npredicate o(d).\n"
      "1.0 : a <- start.\n"
      "1.0 : b <- a emits o(x).\n");
  Rng rng(5);
  SampleResult one = sample_fixed(m, 1, rng);  // one step is still fine
  CHECK(one.states.back() == Term::atom("b"));
  CHECK_THROWS_AS(sample_fixed(m, 2, rng), ModelError);
}

TEST_CASE("fixed-length sampling of an end-terminated model can die early") {
  Model m = load_fixture("anbncn.lohmm");
  Rng rng(11);
  bool absorbed = false;
  for (int trial = 0; trial < 50 && !absorbed; ++trial) {
    try {
      sample_fixed(m, 30, rng);
    } catch (const ModelError&) {
      absorbed = true;  // the walk reached `end` before 30 emissions
    }
  }
  CHECK(absorbed);
}

TEST_CASE("sample_until_end runs to absorption and respects the grammar") {
  Model m = load_fixture("anbncn.lohmm");
  Rng rng(2026);
  for (int trial = 0; trial < 25; ++trial) {
    SampleResult s = sample_until_end(m, rng);
    REQUIRE_FALSE(s.observations.empty());
    CHECK(s.states.back() == end_atom());
    CHECK(s.observations.back() == end_atom());
    CHECK(s.states.size() == s.observations.size() + 1);
    int n = static_cast<int>(s.observations.size()) - 1;
    REQUIRE(n >= 3);
    CHECK(n % 3 == 0);
    std::map<std::string, int> freq;
    for (int t = 0; t < n; ++t) freq[s.observations[t].name] += 1;
    CHECK(freq["a"] == n / 3);
    CHECK(freq["b"] == n / 3);
    CHECK(freq["c"] == n / 3);
    // a^n comes first, then b^n, then c^n.
    for (int t = 0; t < n; ++t) {
      const char* want = t < n / 3 ? "a" : t < 2 * n / 3 ? "b" : "c";
      CHECK(s.observations[t].name == want);
    }
  }
}

TEST_CASE("sample_until_end gives up on models that never terminate") {
  Model m = load_fixture("coin-files.lohmm");
  Rng rng(3);
  CHECK_THROWS_AS(sample_until_end(m, rng, 50), ModelError);
}

TEST_CASE("sampled symbol frequencies track the model distribution") {
  Model m = load_fixture("coin-files.lohmm");
  Rng rng(7777);
  int f1 = 0;
  const int kTrials = 10000;
  for (int i = 0; i < kTrials; ++i) {
    SampleResult s = sample_fixed(m, 1, rng);
    if (s.observations[0] == seq("out(f1)")[0]) ++f1;
  }
  // The first emission reveals the prior state, a fair draw over two files.
  double freq = static_cast<double>(f1) / kTrials;
  CHECK(freq > 0.48);
  CHECK(freq < 0.52);
}

TEST_CASE("reachable_sets layers are exact on the shipped models") {
  Model coin = load_fixture("coin-files.lohmm");
  ReachableSets sets = reachable_sets(coin, 3);
  REQUIRE(sets.states.size() == 4);
  REQUIRE(sets.observations.size() == 3);
  CHECK(sets.states[0] == std::vector<Term>{start_atom()});
  CHECK(sets.observations[0].empty());  // priors emit nothing
  for (int t = 1; t <= 3; ++t)
    CHECK(sets.states[t] == std::vector<Term>{seq("st(f1)")[0], seq("st(f2)")[0]});
  for (int t = 1; t <= 2; ++t)
    CHECK(sets.observations[t] == std::vector<Term>{seq("out(f1)")[0], seq("out(f2)")[0]});

  Model fig1 = load_fixture("fig1.lohmm");
  ReachableSets desk = reachable_sets(fig1, 2);
  CHECK(desk.states[1].size() == 6);  // four emacs configurations, two ls
  CHECK(desk.states[2].size() == 8);  // plus latex on either file, tex only
}

TEST_CASE("reachable_sets enforces its state cap") {
  Model m = load_fixture("anbncn.lohmm");
  CHECK_THROWS_AS(reachable_sets(m, 8, 3), ModelError);
  ReachableSets sets = reachable_sets(m, 8);
  CHECK(sets.states.size() == 9);
}
