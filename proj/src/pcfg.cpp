#include "lohmm/pcfg.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "lohmm/error.hpp"

namespace lohmm {

namespace {

bool is_nonterminal(const std::string& s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

}  // namespace

ValidationReport validate_pcfg(const Pcfg& g) {
  ValidationReport report;
  auto err = [&](std::string s) { report.errors.push_back(std::move(s)); };
  if (g.start.empty()) {
    err("grammar declares no start symbol");
    return report;
  }
  if (!is_nonterminal(g.start)) err("start symbol '" + g.start + "' is not a nonterminal");
  if (g.productions.empty()) err("grammar declares no productions");

  std::map<std::string, double> sums;
  for (const Production& pr : g.productions) {
    std::string where = "production at line " + std::to_string(pr.line);
    if (!is_nonterminal(pr.lhs)) {
      err(where + ": left-hand side '" + pr.lhs + "' is not a nonterminal");
      continue;
    }
    if (!(pr.p >= 0.0 && pr.p <= 1.0) || !std::isfinite(pr.p))
      err(where + ": probability must lie in [0, 1]");
    sums[pr.lhs] += pr.p;
  }
  for (const std::string& nt : g.nonterminals) {
    auto it = sums.find(nt);
    if (it == sums.end()) {
      err("nonterminal '" + nt + "' has no productions");
      continue;
    }
    if (std::abs(it->second - 1.0) > 1e-9) {
      std::ostringstream os;
      os << "productions of '" << nt << "' have probabilities summing to "
         << it->second << ", expected 1";
      err(os.str());
    }
  }
  if (std::find(g.nonterminals.begin(), g.nonterminals.end(), g.start) ==
      g.nonterminals.end())
    err("start symbol '" + g.start + "' does not occur in the grammar");
  return report;
}

bool is_gnf(const Pcfg& g) {
  for (const Production& pr : g.productions) {
    if (pr.rhs.empty()) return false;
    if (is_nonterminal(pr.rhs[0])) return false;
    for (size_t i = 1; i < pr.rhs.size(); ++i)
      if (!is_nonterminal(pr.rhs[i])) return false;
  }
  return true;
}

namespace {

std::string stack_constant(const std::string& nonterminal) {
  std::string out = "n";
  for (char c : nonterminal) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

Term stack_list(const std::vector<Term>& items, Term tail) {
  Term out = std::move(tail);
  for (auto it = items.rbegin(); it != items.rend(); ++it)
    out = Term::compound(kConsFunctor, {*it, out});
  return out;
}

Term stack_atom(Term list) { return Term::atom("stack", {std::move(list)}); }

}  // namespace

Model pcfg_to_lohmm(const Pcfg& g) {
  ValidationReport vr = validate_pcfg(g);
  if (!vr.ok()) throw ModelError("invalid grammar: " + vr.errors.front());
  if (!is_gnf(g))
    throw ModelError(
        "the grammar is not in Greibach normal form (every right-hand side "
        "must be one terminal followed by nonterminals); convert it first");

  Model m;
  std::vector<std::string> constants;
  std::set<std::string> seen;
  for (const std::string& nt : g.nonterminals) {
    std::string c = stack_constant(nt);
    if (!seen.insert(c).second)
      throw ModelError("nonterminals '" + nt +
                       "' and another one map to the same stack constant '" + c + "'");
    constants.push_back(c);
  }
  for (const std::string& t : g.terminals) {
    if (t == "end" || t == "start")
      throw ModelError("terminal '" + t + "' collides with a reserved symbol");
    if (!seen.insert(t).second)
      throw ModelError("terminal '" + t + "' collides with a stack constant");
  }

  std::string e = m.sigma.add_domain("ntsym", constants, true);
  if (e.empty()) e = m.sigma.add_domain("symlist", {kNilConstant}, true);
  if (e.empty()) e = m.sigma.add_functor(kConsFunctor, {"ntsym", "symlist"}, "symlist");
  if (e.empty()) e = m.sigma.add_predicate("stack", {"symlist"});
  for (const std::string& t : g.terminals)
    if (e.empty()) e = m.sigma.add_predicate(t, {});
  if (!e.empty()) throw ModelError("grammar encoding failed: " + e);

  Term var_s = Term::var("S");
  m.transitions.push_back(AbstractTransition{
      1.0, stack_atom(stack_list({Term::constant(stack_constant(g.start))},
                                 Term::constant(kNilConstant))),
      start_atom(), std::nullopt, 0});
  for (const Production& pr : g.productions) {
    std::vector<Term> pushed;
    for (size_t i = 1; i < pr.rhs.size(); ++i)
      pushed.push_back(Term::constant(stack_constant(pr.rhs[i])));
    Term body = stack_atom(stack_list({Term::constant(stack_constant(pr.lhs))}, var_s));
    Term head = stack_atom(stack_list(pushed, var_s));
    m.transitions.push_back(
        AbstractTransition{pr.p, head, body, Term::atom(pr.rhs[0]), pr.line});
  }
  m.transitions.push_back(AbstractTransition{
      1.0, end_atom(), stack_atom(Term::constant(kNilConstant)), end_atom(), 0});

  ValidationReport mr = validate(m);
  if (!mr.ok())
    throw ModelError("grammar encoding produced an invalid model: " + mr.errors.front());
  return m;
}

namespace {

struct DerivationSearch {
  const Pcfg& g;
  const std::vector<std::string>& word;
  std::map<std::string, std::vector<const Production*>> by_lhs;
  int max_steps;
  bool gnf;
  double total = 0.0;
  bool truncated = false;

  // A symbol's minimal terminal yield: 1 for terminals always; for
  // nonterminals 1 under GNF (every production emits a terminal), otherwise
  // 0 (nullable productions are possible in general grammars).
  size_t min_yield(const std::vector<std::string>& stack) const {
    if (gnf) return stack.size();
    size_t n = 0;
    for (const std::string& s : stack)
      if (!is_nonterminal(s)) ++n;
    return n;
  }

  void expand(std::vector<std::string>& stack, size_t matched, double p, int steps) {
    // Consume leading terminals against the word.
    while (!stack.empty() && !is_nonterminal(stack.back())) {
      if (matched >= word.size() || stack.back() != word[matched]) return;
      stack.pop_back();
      ++matched;
      if (matched + min_yield(stack) > word.size()) return;
    }
    if (stack.empty()) {
      if (matched == word.size()) total += p;
      return;
    }
    if (steps >= max_steps) {
      truncated = true;
      return;
    }
    std::string nt = stack.back();
    auto it = by_lhs.find(nt);
    if (it == by_lhs.end()) return;
    for (const Production* pr : it->second) {
      if (pr->p == 0.0) continue;
      std::vector<std::string> next = stack;
      next.pop_back();
      for (auto rit = pr->rhs.rbegin(); rit != pr->rhs.rend(); ++rit)
        next.push_back(*rit);
      if (matched + min_yield(next) > word.size()) continue;
      expand(next, matched, p * pr->p, steps + 1);
    }
  }
};

}  // namespace

StringProbability pcfg_string_prob(const Pcfg& g, const std::vector<std::string>& word,
                                   int max_steps) {
  ValidationReport vr = validate_pcfg(g);
  if (!vr.ok()) throw ModelError("invalid grammar: " + vr.errors.front());
  if (max_steps <= 0) max_steps = 4 * static_cast<int>(word.size()) + 64;

  DerivationSearch search{g, word, {}, max_steps, is_gnf(g)};
  for (const Production& pr : g.productions) search.by_lhs[pr.lhs].push_back(&pr);

  // The sentential form is a stack with the leftmost symbol on top (back).
  std::vector<std::string> stack{g.start};
  search.expand(stack, 0, 1.0, 0);
  return StringProbability{search.total, search.truncated};
}

}  // namespace lohmm
