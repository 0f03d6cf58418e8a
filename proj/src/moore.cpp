#include "lohmm/moore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "lohmm/error.hpp"

namespace lohmm {

namespace {
constexpr double kSumTolerance = 1e-9;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool is_end_state(const Term& t) { return !t.is_var() && t.name == "end"; }

}  // namespace

ValidationReport validate(MooreModel& m) {
  ValidationReport report;
  m.validated = false;
  auto err = [&](std::string s) { report.errors.push_back(std::move(s)); };

  if (m.sigma.constant_index.empty())
    err("alphabet declares no constants (at least one finite domain is required)");

  std::vector<AbstractTransition> kept;
  for (const AbstractTransition& tr : m.transitions) {
    if (tr.p == 0.0) {
      report.warnings.push_back("pruning zero-probability transition at line " +
                                std::to_string(tr.line));
      continue;
    }
    kept.push_back(tr);
  }
  m.transitions = std::move(kept);
  if (m.transitions.empty()) err("model declares no transitions");
  if (m.emissions.empty()) err("model declares no emission clauses");

  for (const AbstractTransition& tr : m.transitions) {
    std::string where = "transition at line " + std::to_string(tr.line);
    if (!std::isfinite(tr.p) || tr.p < 0.0 || tr.p > 1.0) {
      err(where + ": probability must lie in [0, 1]");
      continue;
    }
    if (tr.obs) {
      err(where + ": transitions of a Moore model carry no observation");
      continue;
    }
    if (tr.head.name == "start" && tr.head.arity() == 0) {
      err(where + ": 'start' cannot be a transition head");
      continue;
    }
    if (tr.body.name == "end") {
      err(where + ": 'end' is absorbing and cannot be a transition body");
      continue;
    }
    std::map<VarRef, std::string> var_types;
    std::string e = typecheck_atom(tr.body, m.sigma, var_types);
    if (e.empty()) e = typecheck_atom(tr.head, m.sigma, var_types);
    if (!e.empty()) err(where + ": " + e);
  }

  for (size_t i = 0; i < m.emissions.size(); ++i) {
    const AbstractEmission& em = m.emissions[i];
    std::string where = "emission at line " + std::to_string(em.line);
    std::map<VarRef, std::string> var_types;
    std::string e = typecheck_atom(em.state, m.sigma, var_types);
    if (e.empty()) e = typecheck_atom(em.obs, m.sigma, var_types);
    if (!e.empty()) err(where + ": " + e);
    if (em.obs.name == "start") err(where + ": 'start' cannot be observed");
    for (size_t j = 0; j < i; ++j) {
      if (is_variant(em.state, m.emissions[j].state))
        err(where + ": state pattern duplicates the emission at line " +
            std::to_string(m.emissions[j].line));
    }
  }

  if (!report.errors.empty()) return report;

  group_body_classes(m.transitions, &m.body_class, &m.classes, &m.class_body);
  for (size_t c = 0; c < m.classes.size(); ++c) {
    double sum = 0.0;
    for (int i : m.classes[c]) sum += m.transitions[i].p;
    if (std::abs(sum - 1.0) > kSumTolerance) {
      std::ostringstream os;
      os << "transitions from body '" << to_string(m.class_body[c])
         << "' have probabilities summing to " << sum << ", expected 1";
      err(os.str());
    }
  }

  bool has_prior = false;
  for (const AbstractTransition& tr : m.transitions) has_prior |= tr.is_prior();
  if (!has_prior) err("model declares no start transitions");

  std::string e = check_body_glb(m.class_body);
  if (!e.empty()) err(e);

  build_selection_tables(m.sigma, m.selection_decls, &m.selection, &report.errors);
  if (!report.errors.empty()) return report;

  m.head_meta.assign(m.transitions.size(), {});
  for (size_t i = 0; i < m.transitions.size(); ++i) {
    const AbstractTransition& tr = m.transitions[i];
    e = free_var_meta(tr.head, vars_of(tr.body), m.sigma, m.selection, &m.head_meta[i]);
    if (!e.empty())
      err("transition at line " + std::to_string(tr.line) + ": " + e);
  }
  m.emission_meta.assign(m.emissions.size(), {});
  for (size_t i = 0; i < m.emissions.size(); ++i) {
    const AbstractEmission& em = m.emissions[i];
    e = free_var_meta(em.obs, vars_of(em.state), m.sigma, m.selection,
                      &m.emission_meta[i]);
    if (!e.empty()) err("emission at line " + std::to_string(em.line) + ": " + e);
  }
  if (!report.errors.empty()) return report;

  m.termination = Termination::FixedLength;
  for (const AbstractTransition& tr : m.transitions)
    if (is_end_state(tr.head)) m.termination = Termination::EndTerminated;

  m.validated = true;
  return report;
}

double moore_emission_prob(const MooreModel& m, const Term& state, const Term& obs) {
  if (!m.validated) throw ModelError("emission probabilities require a validated model");
  // Maximally specific emission clauses for this state.
  std::vector<int> cand;
  for (size_t i = 0; i < m.emissions.size(); ++i)
    if (match(m.emissions[i].state, state)) cand.push_back(static_cast<int>(i));
  int chosen = -1;
  for (int i : cand) {
    bool beaten = false;
    for (int j : cand) {
      if (i == j) continue;
      if (match(m.emissions[i].state, m.emissions[j].state) &&
          !is_variant(m.emissions[i].state, m.emissions[j].state)) {
        beaten = true;
        break;
      }
    }
    if (!beaten) {
      if (chosen >= 0)
        throw ModelError("emission clauses at lines " +
                         std::to_string(m.emissions[chosen].line) + " and " +
                         std::to_string(m.emissions[i].line) +
                         " are both maximally specific for state '" +
                         to_string(state) + "'");
      chosen = i;
    }
  }
  if (chosen < 0) return 0.0;

  const AbstractEmission& em = m.emissions[chosen];
  auto sigma_s = match(em.state, state);
  Term pattern = apply(em.obs, *sigma_s);
  auto theta = match(pattern, obs);
  if (!theta) return 0.0;
  double prod = 1.0;
  for (const FreeVarMeta& fm : m.emission_meta[chosen]) {
    const Term* val = theta->lookup(fm.var);
    int di = val && val->is_constant() ? m.sigma.domain_index(fm.type, val->name) : -1;
    if (di < 0) return 0.0;
    prod *= fm.probs[di];
  }
  return prod;
}

namespace {

using MooreLayer = std::map<Term, double, TermOrder>;

void check_moore_observations(const MooreModel& m, const std::vector<Term>& obs) {
  if (!m.validated) throw ModelError("evaluation requires a validated model");
  for (const Term& o : obs) {
    if (!o.is_ground())
      throw ModelError("observation '" + to_string(o) + "' is not ground");
    std::map<VarRef, std::string> var_types;
    std::string e = typecheck_atom(o, m.sigma, var_types);
    if (!e.empty()) throw ModelError("observation '" + to_string(o) + "': " + e);
  }
  if (m.termination == Termination::EndTerminated) {
    if (obs.empty() || !(obs.back() == end_atom()))
      throw ModelError(
          "the model is end-terminated: sequences must close with the 'end' "
          "observation");
  }
}

}  // namespace

LikelihoodResult moore_forward(const MooreModel& m, const std::vector<Term>& obs,
                               NumericMode mode) {
  check_moore_observations(m, obs);
  const size_t T = obs.size();
  TermOrder ord = m.order();
  LikelihoodResult res{0.0, kNegInf};
  if (T == 0) {
    if (m.termination == Termination::FixedLength) {
      // No emission consumed; the empty sequence has probability one.
      return LikelihoodResult{1.0, 0.0};
    }
    return res;
  }

  MooreLayer layer(ord);
  double log_scale = 0.0;
  for (size_t t = 1; t <= T; ++t) {
    MooreLayer next(ord);
    if (t == 1) {
      for (size_t idx = 0; idx < m.transitions.size(); ++idx) {
        if (!m.transitions[idx].is_prior()) continue;
        std::vector<const FreeVarMeta*> fv;
        for (const FreeVarMeta& fm : m.head_meta[idx]) fv.push_back(&fm);
        enumerate_free_vars(m.sigma, m.transitions[idx].head, m.transitions[idx].p, fv,
                            [&](const Term& g, double w) { next[g] += w; });
      }
    } else {
      for (const auto& [state, a] : layer) {
        if (is_end_state(state)) continue;  // absorbing
        for (int c : max_specific_classes(m.class_body, state)) {
          for (int idx : m.classes[c]) {
            const AbstractTransition& tr = m.transitions[idx];
            if (tr.is_prior()) continue;
            auto sb = match(tr.body, state);
            std::vector<const FreeVarMeta*> fv;
            for (const FreeVarMeta& fm : m.head_meta[idx]) fv.push_back(&fm);
            enumerate_free_vars(m.sigma, apply(tr.head, *sb), a * tr.p, fv,
                                [&](const Term& g, double w) { next[g] += w; });
          }
        }
      }
    }
    // Fold in the emission of O_t and rescale.
    double c = 0.0;
    for (auto it = next.begin(); it != next.end();) {
      double e = moore_emission_prob(m, it->first, obs[t - 1]);
      if (e <= 0.0) {
        it = next.erase(it);
        continue;
      }
      it->second *= e;
      c += it->second;
      ++it;
    }
    if (c <= 0.0) return res;
    if (mode == NumericMode::Scaled) {
      for (auto& [state, a] : next) a /= c;
      log_scale += std::log(c);
    }
    layer = std::move(next);
  }

  double share = 0.0;
  double total = 0.0;
  for (const auto& [state, a] : layer) {
    total += a;
    if (m.termination == Termination::FixedLength || is_end_state(state)) share += a;
  }
  if (share <= 0.0) return res;
  if (mode == NumericMode::Scaled) {
    res.log_likelihood = log_scale + std::log(share);
    res.likelihood = std::exp(res.log_likelihood);
  } else {
    res.likelihood = share;
    res.log_likelihood = std::log(share);
  }
  return res;
}

namespace {

// The stored form of an observation atom: arity-0 atoms become constants,
// others become functor terms; variables in `erase` turn into '#'.
Term stored_observation(const Term& obs, const std::vector<VarRef>& erase) {
  if (obs.arity() == 0) return Term::constant(obs.name);
  std::vector<Term> args;
  args.reserve(obs.args.size());
  for (const Term& a : obs.args) {
    bool erased = false;
    if (a.is_var()) {
      for (const VarRef& v : erase) {
        if (v.name == a.name && v.scope == a.scope) {
          erased = true;
          break;
        }
      }
    }
    if (erased) {
      args.push_back(Term::constant("#"));
    } else if (a.is_compound()) {
      args.push_back(stored_observation(a, erase));
    } else {
      args.push_back(a);
    }
  }
  return Term::compound(obs.name, std::move(args));
}

std::string fresh_type_name(const Alphabet& sigma, std::string base) {
  while (sigma.has_type(base)) base += "x";
  return base;
}

}  // namespace

MooreModel mealy_to_moore(const Model& m, std::size_t prior_cap) {
  if (!m.validated) throw ModelError("conversion requires a validated model");
  MooreModel out;
  out.sigma = m.sigma;

  // Collect state and observation predicates in first-appearance order.
  std::vector<SymbolKey> state_preds;
  std::vector<SymbolKey> obs_preds;
  auto note = [](std::vector<SymbolKey>& list, const SymbolKey& k) {
    if (std::find(list.begin(), list.end(), k) == list.end()) list.push_back(k);
  };
  for (const AbstractTransition& tr : m.transitions) {
    if (!tr.is_prior()) note(state_preds, SymbolKey{tr.body.name, tr.body.arity()});
    note(state_preds, SymbolKey{tr.head.name, tr.head.arity()});
    if (tr.obs) note(obs_preds, SymbolKey{tr.obs->name, tr.obs->arity()});
  }

  // Observation symbols become storable terms of a fresh type.
  std::string emitsym = fresh_type_name(out.sigma, "emitsym");
  std::vector<std::string> emit_constants;
  for (const SymbolKey& k : obs_preds)
    if (k.arity == 0) emit_constants.push_back(k.name);
  // The '#' placeholder occupies stored positions whose value is redrawn at
  // emission time; it lives in no domain, so the domain may otherwise be
  // empty.
  std::string e = out.sigma.add_domain(emitsym, emit_constants, !emit_constants.empty());
  for (const SymbolKey& k : obs_preds) {
    if (!e.empty()) break;
    if (k.arity > 0) {
      auto sig = m.sigma.predicates.find(k);
      if (sig == m.sigma.predicates.end())
        throw ModelError("observation predicate " + to_string(k) + " is not declared");
      e = out.sigma.add_functor(k.name, sig->second, emitsym);
    }
  }
  if (!e.empty()) throw ModelError("conversion failed: " + e);

  // Extend every state predicate with the stored-observation argument.
  for (const SymbolKey& k : state_preds) {
    if (k.name == "end" && k.arity == 0) {
      // The reserved end state is extended like any other, but its predicate
      // must be registered directly because 'end' cannot be declared.
      SymbolKey ext{"end", 1};
      if (out.sigma.predicates.count(ext))
        throw ModelError("conversion failed: end/1 already declared");
      out.sigma.predicate_order.push_back(ext);
      out.sigma.predicates.emplace(ext, std::vector<std::string>{emitsym});
      continue;
    }
    auto sig = m.sigma.predicates.find(k);
    if (sig == m.sigma.predicates.end())
      throw ModelError("state predicate " + to_string(k) + " is not declared");
    std::vector<std::string> args = sig->second;
    args.push_back(emitsym);
    e = out.sigma.add_predicate(k.name, args);
    if (!e.empty()) throw ModelError("conversion failed: " + e);
  }

  // Selection declarations on state predicates move to the extended arity;
  // declarations on pure observation predicates stay as they are.
  out.selection_decls.clear();
  for (const SelectionDecl& d : m.selection_decls) {
    bool is_state =
        std::find(state_preds.begin(), state_preds.end(), d.key.pred) != state_preds.end();
    bool is_obs =
        std::find(obs_preds.begin(), obs_preds.end(), d.key.pred) != obs_preds.end();
    if (is_obs) out.selection_decls.push_back(d);
    if (is_state) {
      SelectionDecl moved = d;
      moved.key.pred.arity += 1;
      out.selection_decls.push_back(std::move(moved));
    }
  }

  // Transitions and emission clauses.
  std::vector<AbstractTransition> converted;
  std::vector<AbstractEmission> emissions;
  int fresh = 0;
  for (size_t i = 0; i < m.transitions.size(); ++i) {
    const AbstractTransition& tr = m.transitions[i];
    if (tr.is_prior()) continue;
    std::vector<VarRef> erase;
    for (const FreeVarMeta& fm : m.meta[i].obs_free) erase.push_back(fm.var);
    Term stored = stored_observation(*tr.obs, erase);
    std::vector<Term> head_args = tr.head.args;
    head_args.push_back(stored);
    Term ext_head = Term::atom(tr.head.name, std::move(head_args));
    std::vector<Term> body_args = tr.body.args;
    body_args.push_back(Term::var("_m" + std::to_string(++fresh)));
    Term ext_body = Term::atom(tr.body.name, std::move(body_args));
    converted.push_back(AbstractTransition{tr.p, ext_head, ext_body, std::nullopt, tr.line});

    AbstractEmission em{*tr.obs, ext_head, tr.line};
    bool dup = false;
    for (const AbstractEmission& prev : emissions) {
      Term a = Term::compound("em", {prev.obs, prev.state});
      Term b = Term::compound("em", {em.obs, em.state});
      if (is_variant(a, b)) {
        dup = true;
        break;
      }
    }
    if (!dup) emissions.push_back(std::move(em));
  }

  // The prior of the Moore model is the joint distribution of the first
  // Mealy state and the stored pattern of its entry observation; the
  // emission probability of the first symbol is deliberately left out (the
  // first Moore emission supplies it).
  TermOrder ord(out.sigma);
  std::map<Term, double, TermOrder> prior(ord);
  std::map<Term, double, TermOrder> alpha0(m.order());
  expand_priors(m, [&](int, const Term& g, double w, const std::vector<SelDraw>&) {
    alpha0[g] += w;
  });
  for (const auto& [q0, a0] : alpha0) {
    for (int idx : max_specific(m, q0)) {
      const AbstractTransition& tr = m.transitions[idx];
      std::vector<VarRef> erase;
      for (const FreeVarMeta& fm : m.meta[idx].obs_free) erase.push_back(fm.var);
      Term stored = stored_observation(*tr.obs, erase);
      auto sb = match(tr.body, q0);
      std::vector<Term> ext_args = apply(tr.head, *sb).args;
      ext_args.push_back(apply(stored, *sb));
      Term ext = Term::atom(tr.head.name, std::move(ext_args));
      std::vector<const FreeVarMeta*> fv;
      for (const FreeVarMeta& fm : m.meta[idx].head_free) fv.push_back(&fm);
      enumerate_free_vars(m.sigma, ext, a0 * tr.p, fv,
                          [&](const Term& g, double w) { prior[g] += w; });
      if (prior.size() > prior_cap)
        throw ModelError("conversion failed: more than " + std::to_string(prior_cap) +
                         " prior states");
    }
  }

  for (const auto& [state, p] : prior)
    out.transitions.push_back(AbstractTransition{p, state, start_atom(), std::nullopt, 0});
  for (AbstractTransition& tr : converted) out.transitions.push_back(std::move(tr));
  out.emissions = std::move(emissions);

  ValidationReport vr = validate(out);
  if (!vr.ok()) throw ModelError("conversion produced an invalid model: " + vr.errors.front());
  return out;
}

}  // namespace lohmm
