#include "lohmm/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "lohmm/error.hpp"

namespace lohmm {

namespace {
constexpr double kSumTolerance = 1e-9;
}

std::string to_string(const SelectionKey& k) {
  return to_string(k.pred) + " arg " + std::to_string(k.arg);
}

namespace {

// First top-level argument position (1-based) where `v` stands as the whole
// argument of `atom`, if any.  This is the position whose categorical governs
// the variable's selection draw.
std::optional<SelectionKey> governing_slot(const Term& atom, const VarRef& v) {
  for (int i = 0; i < atom.arity(); ++i) {
    const Term& a = atom.args[i];
    if (a.is_var() && a.name == v.name && a.scope == v.scope)
      return SelectionKey{SymbolKey{atom.name, atom.arity()}, i + 1};
  }
  return std::nullopt;
}

bool contains(const std::vector<VarRef>& vs, const VarRef& v) {
  return std::find(vs.begin(), vs.end(), v) != vs.end();
}

}  // namespace

std::string free_var_meta(const Term& atom, const std::vector<VarRef>& bound_elsewhere,
                          const Alphabet& sigma,
                          const std::map<SelectionKey, std::vector<double>>& selection,
                          std::vector<FreeVarMeta>* out) {
  out->clear();
  std::map<VarRef, std::string> var_types;
  std::string err = typecheck_atom(atom, sigma, var_types);
  if (!err.empty()) return err;
  for (const VarRef& v : vars_of(atom)) {
    if (contains(bound_elsewhere, v)) continue;
    FreeVarMeta fm;
    fm.var = v;
    fm.type = var_types.at(v);
    fm.slot = governing_slot(atom, v);
    fm.identifier = sigma.is_identifier_type(fm.type);
    if (!sigma.type_is_enumerable(fm.type))
      return "variable " + v.name + " of '" + to_string(atom) +
             "' requires a selection draw over type '" + fm.type +
             "', which is not a finite constant domain";
    const auto& dom = sigma.domain(fm.type);
    auto it = fm.slot && !fm.identifier ? selection.find(*fm.slot) : selection.end();
    if (it != selection.end()) {
      fm.probs = it->second;
    } else {
      fm.probs.assign(dom.size(), 1.0 / static_cast<double>(dom.size()));
    }
    out->push_back(std::move(fm));
  }
  return "";
}

void group_body_classes(const std::vector<AbstractTransition>& transitions,
                        std::vector<int>* body_class,
                        std::vector<std::vector<int>>* classes,
                        std::vector<Term>* class_body) {
  body_class->assign(transitions.size(), -1);
  classes->clear();
  class_body->clear();
  for (size_t i = 0; i < transitions.size(); ++i) {
    const Term& b = transitions[i].body;
    int cls = -1;
    for (size_t c = 0; c < class_body->size(); ++c) {
      if (is_variant((*class_body)[c], b)) {
        cls = static_cast<int>(c);
        break;
      }
    }
    if (cls < 0) {
      cls = static_cast<int>(class_body->size());
      class_body->push_back(b);
      classes->emplace_back();
    }
    (*body_class)[i] = cls;
    (*classes)[cls].push_back(static_cast<int>(i));
  }
}

std::string check_body_glb(const std::vector<Term>& class_body) {
  ScopeCounter scopes;
  for (size_t i = 0; i < class_body.size(); ++i) {
    for (size_t j = i + 1; j < class_body.size(); ++j) {
      Term bj = rename_apart(class_body[j], scopes.fresh());
      auto u = mgu(class_body[i], bj);
      if (!u) continue;
      Term g = apply(class_body[i], *u);
      bool covered = false;
      for (const Term& b : class_body) {
        if (is_variant(b, g)) {
          covered = true;
          break;
        }
      }
      if (!covered)
        return "bodies '" + to_string(class_body[i]) + "' and '" +
               to_string(class_body[j]) + "' overlap at '" + to_string(g) +
               "' but no body covers the overlap (body set is not closed "
               "under greatest lower bounds)";
    }
  }
  return "";
}

void build_selection_tables(const Alphabet& sigma,
                            const std::vector<SelectionDecl>& decls,
                            std::map<SelectionKey, std::vector<double>>* out,
                            std::vector<std::string>* errors_out) {
  std::vector<std::string>& errors = *errors_out;
  out->clear();
  std::set<SelectionKey> seen;
  for (const SelectionDecl& d : decls) {
    std::string where = "selection " + to_string(d.key);
    if (!seen.insert(d.key).second) {
      errors.push_back(where + " declared twice");
      continue;
    }
    auto pit = sigma.predicates.find(d.key.pred);
    if (pit == sigma.predicates.end()) {
      errors.push_back(where + ": unknown predicate " + to_string(d.key.pred));
      continue;
    }
    if (d.key.arg < 1 || d.key.arg > d.key.pred.arity) {
      errors.push_back(where + ": argument position out of range");
      continue;
    }
    const std::string& type = pit->second[d.key.arg - 1];
    if (sigma.is_identifier_type(type)) {
      errors.push_back(where + ": position has identifier type '" + type +
                       "', whose selection is fixed uniform");
      continue;
    }
    if (!sigma.type_is_enumerable(type)) {
      errors.push_back(where + ": type '" + type + "' is not a finite constant domain");
      continue;
    }
    const auto& dom = sigma.domain(type);
    std::vector<double> probs(dom.size(), -1.0);
    bool bad = false;
    for (const auto& [c, p] : d.entries) {
      int idx = sigma.domain_index(type, c);
      if (idx < 0) {
        errors.push_back(where + ": constant '" + c + "' is not in the domain of '" + type + "'");
        bad = true;
        break;
      }
      if (probs[idx] >= 0.0) {
        errors.push_back(where + ": constant '" + c + "' listed twice");
        bad = true;
        break;
      }
      if (!(p >= 0.0) || !std::isfinite(p)) {
        errors.push_back(where + ": probability of '" + c + "' must be a finite nonnegative number");
        bad = true;
        break;
      }
      probs[idx] = p;
    }
    if (bad) continue;
    for (size_t i = 0; i < dom.size(); ++i) {
      if (probs[i] < 0.0) {
        errors.push_back(where + ": constant '" + dom[i] + "' of type '" + type +
                         "' is missing (declared selections must cover the whole domain)");
        bad = true;
        break;
      }
    }
    if (bad) continue;
    double sum = 0.0;
    for (double p : probs) sum += p;
    if (std::abs(sum - 1.0) > kSumTolerance) {
      std::ostringstream os;
      os << where << ": probabilities sum to " << sum << ", expected 1";
      errors.push_back(os.str());
      continue;
    }
    out->emplace(d.key, std::move(probs));
  }
}

namespace {

std::string build_meta(Model& m) {
  m.meta.assign(m.transitions.size(), TransitionMeta{});
  for (size_t i = 0; i < m.transitions.size(); ++i) {
    const AbstractTransition& tr = m.transitions[i];
    std::vector<VarRef> bound = vars_of(tr.body);
    std::string err =
        free_var_meta(tr.head, bound, m.sigma, m.selection, &m.meta[i].head_free);
    if (!err.empty())
      return "transition at line " + std::to_string(tr.line) + ": " + err;
    if (tr.obs) {
      for (const VarRef& v : vars_of(tr.head))
        if (!contains(bound, v)) bound.push_back(v);
      err = free_var_meta(*tr.obs, bound, m.sigma, m.selection, &m.meta[i].obs_free);
      if (!err.empty())
        return "transition at line " + std::to_string(tr.line) + ": " + err;
    }
  }
  return "";
}

}  // namespace

ValidationReport validate(Model& m) {
  ValidationReport report;
  m.validated = false;
  auto err = [&](std::string s) { report.errors.push_back(std::move(s)); };

  if (m.sigma.constant_index.empty())
    err("alphabet declares no constants (at least one finite domain is required)");
  for (const std::string& t : m.sigma.type_order) {
    const TypeInfo& info = m.sigma.types.at(t);
    if (info.identifier && !m.sigma.type_is_enumerable(t))
      err("identifier type '" + t + "' must be a finite constant domain");
  }

  // Zero-probability transitions are dropped before anything structural.
  std::vector<AbstractTransition> kept;
  kept.reserve(m.transitions.size());
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

  for (const AbstractTransition& tr : m.transitions) {
    std::string where = "transition at line " + std::to_string(tr.line);
    if (!std::isfinite(tr.p) || tr.p < 0.0 || tr.p > 1.0) {
      err(where + ": probability must lie in [0, 1]");
      continue;
    }
    if (tr.head.name == "start" && tr.head.arity() == 0) {
      err(where + ": 'start' cannot be a transition head");
      continue;
    }
    if (tr.body.name == "end" && tr.body.arity() == 0) {
      err(where + ": 'end' is absorbing and cannot be a transition body");
      continue;
    }
    if (tr.is_prior() && tr.obs) {
      err(where + ": start transitions carry no observation");
      continue;
    }
    if (!tr.is_prior() && !tr.obs) {
      err(where + ": missing observation");
      continue;
    }
    if (tr.obs && tr.obs->name == "start") {
      err(where + ": 'start' cannot be observed");
      continue;
    }
    std::map<VarRef, std::string> var_types;
    std::string e = typecheck_atom(tr.body, m.sigma, var_types);
    if (e.empty()) e = typecheck_atom(tr.head, m.sigma, var_types);
    if (e.empty() && tr.obs) e = typecheck_atom(*tr.obs, m.sigma, var_types);
    if (!e.empty()) err(where + ": " + e);
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

  e = build_meta(m);
  if (!e.empty()) err(e);
  if (!report.errors.empty()) return report;

  m.termination = Termination::FixedLength;
  for (const AbstractTransition& tr : m.transitions)
    if (tr.head.name == "end" && tr.head.arity() == 0)
      m.termination = Termination::EndTerminated;

  m.validated = true;
  return report;
}

std::string refresh_parameters(Model& m) {
  if (!m.validated) return "model has not been validated";
  std::vector<std::string> errors;
  build_selection_tables(m.sigma, m.selection_decls, &m.selection, &errors);
  if (!errors.empty()) return errors.front();
  return build_meta(m);
}

double selection_prob(const Model& m, const Term& ground_atom, const Term& abstract_atom) {
  if (!m.validated) throw ModelError("selection probability requires a validated model");
  if (!ground_atom.is_ground())
    throw ModelError("selection probability target '" + to_string(ground_atom) +
                     "' is not ground");
  auto theta = match(abstract_atom, ground_atom);
  if (!theta)
    throw ModelError("abstract atom '" + to_string(abstract_atom) +
                     "' does not subsume '" + to_string(ground_atom) + "'");
  std::vector<FreeVarMeta> fms;
  std::string err = free_var_meta(abstract_atom, {}, m.sigma, m.selection, &fms);
  if (!err.empty()) throw ModelError(err);
  double prod = 1.0;
  for (const FreeVarMeta& fm : fms) {
    const Term* val = theta->lookup(fm.var);
    if (!val) throw ModelError("variable " + fm.var.name + " left unbound");
    int idx = val->is_constant() ? m.sigma.domain_index(fm.type, val->name) : -1;
    if (idx < 0)
      throw ModelError("value '" + to_string(*val) + "' for variable " + fm.var.name +
                       " lies outside the domain of type '" + fm.type + "'");
    prod *= fm.probs[idx];
  }
  return prod;
}

std::vector<int> max_specific_classes(const std::vector<Term>& class_body,
                                      const Term& state) {
  std::vector<int> cand;
  for (size_t c = 0; c < class_body.size(); ++c)
    if (match(class_body[c], state)) cand.push_back(static_cast<int>(c));
  std::vector<int> out;
  for (int c : cand) {
    bool beaten = false;
    for (int d : cand) {
      if (d == c) continue;
      // c is beaten when its body is strictly more general than d's.
      if (match(class_body[c], class_body[d]) &&
          !is_variant(class_body[c], class_body[d])) {
        beaten = true;
        break;
      }
    }
    if (!beaten) out.push_back(c);
  }
  for (size_t a = 0; a + 1 < out.size(); ++a) {
    for (size_t b = a + 1; b < out.size(); ++b) {
      if (!is_variant(class_body[out[a]], class_body[out[b]]))
        throw ModelError("maximally specific bodies '" + to_string(class_body[out[a]]) +
                         "' and '" + to_string(class_body[out[b]]) +
                         "' for state '" + to_string(state) +
                         "' are not variants; conflict resolution is ill-defined");
    }
  }
  return out;
}

namespace {

// Depth-first enumeration of groundings for `free_vars`, first-occurrence
// order with the last variable varying fastest.  `draws` carries the pinned
// prefix and is extended/restored around each recursion level.
void enumerate_groundings(
    const Alphabet& sigma, const Term& partial, double w,
    const std::vector<const FreeVarMeta*>& free_vars, size_t level,
    std::map<VarRef, Term>& bindings, std::vector<SelDraw>& draws,
    const std::function<void(const Term&, double, const std::vector<SelDraw>&)>& sink) {
  if (level == free_vars.size()) {
    Substitution s;
    s.map = bindings;
    sink(apply(partial, s), w, draws);
    return;
  }
  const FreeVarMeta& fm = *free_vars[level];
  const auto& dom = sigma.domain(fm.type);
  bool counted = fm.slot.has_value() && !fm.identifier;
  for (size_t i = 0; i < dom.size(); ++i) {
    if (fm.probs[i] == 0.0) continue;
    bindings[fm.var] = Term::constant(dom[i]);
    if (counted) draws.push_back(SelDraw{*fm.slot, static_cast<int>(i)});
    enumerate_groundings(sigma, partial, w * fm.probs[i], free_vars, level + 1,
                         bindings, draws, sink);
    if (counted) draws.pop_back();
    bindings.erase(fm.var);
  }
}

}  // namespace

void enumerate_free_vars(const Alphabet& sigma, const Term& partial, double w,
                         const std::vector<const FreeVarMeta*>& free_vars,
                         const std::function<void(const Term&, double)>& sink) {
  std::map<VarRef, Term> bindings;
  std::vector<SelDraw> draws;
  enumerate_groundings(sigma, partial, w, free_vars, 0, bindings, draws,
                       [&](const Term& g, double gw, const std::vector<SelDraw>&) {
                         sink(g, gw);
                       });
}

std::vector<int> max_specific(const Model& m, const Term& state) {
  if (!m.validated) throw ModelError("conflict resolution requires a validated model");
  if (!state.is_ground())
    throw ModelError("state '" + to_string(state) + "' is not ground");
  std::vector<int> out;
  for (int c : max_specific_classes(m.class_body, state))
    for (int i : m.classes[c]) out.push_back(i);
  std::sort(out.begin(), out.end());
  return out;
}

void expand_step(const Model& m, const Term& state, const Term& obs,
                 const StepVisitor& fn) {
  for (int idx : max_specific(m, state)) {
    const AbstractTransition& tr = m.transitions[idx];
    if (!tr.obs) continue;  // prior transitions never fire mid-sequence
    const TransitionMeta& meta = m.meta[idx];
    auto sb = match(tr.body, state);
    Term obs_pattern = apply(*tr.obs, *sb);
    auto theta = match(obs_pattern, obs);
    if (!theta) continue;

    double w = tr.p;
    std::vector<SelDraw> draws;        // head draws pinned by the observation
    std::vector<SelDraw> obs_draws;
    std::vector<const FreeVarMeta*> unpinned;
    bool dead = false;
    for (const FreeVarMeta& fm : meta.head_free) {
      const Term* val = theta->lookup(fm.var);
      if (!val) {
        unpinned.push_back(&fm);
        continue;
      }
      int di = val->is_constant() ? m.sigma.domain_index(fm.type, val->name) : -1;
      if (di < 0 || fm.probs[di] == 0.0) {
        dead = true;
        break;
      }
      w *= fm.probs[di];
      if (fm.slot && !fm.identifier) draws.push_back(SelDraw{*fm.slot, di});
    }
    if (dead) continue;
    for (const FreeVarMeta& fm : meta.obs_free) {
      const Term* val = theta->lookup(fm.var);
      int di = val && val->is_constant() ? m.sigma.domain_index(fm.type, val->name) : -1;
      if (di < 0 || fm.probs[di] == 0.0) {
        dead = true;
        break;
      }
      w *= fm.probs[di];
      if (fm.slot && !fm.identifier) obs_draws.push_back(SelDraw{*fm.slot, di});
    }
    if (dead) continue;

    Term head = apply(apply(tr.head, *sb), *theta);
    std::map<VarRef, Term> bindings;
    enumerate_groundings(m.sigma, head, w, unpinned, 0, bindings, draws,
                         [&](const Term& gh, double gw, const std::vector<SelDraw>& hd) {
                           fn(idx, gh, gw, hd, obs_draws);
                         });
  }
}

void expand_priors(const Model& m, const PriorVisitor& fn) {
  if (!m.validated) throw ModelError("prior expansion requires a validated model");
  for (size_t idx = 0; idx < m.transitions.size(); ++idx) {
    const AbstractTransition& tr = m.transitions[idx];
    if (!tr.is_prior()) continue;
    std::vector<const FreeVarMeta*> fv;
    for (const FreeVarMeta& fm : m.meta[idx].head_free) fv.push_back(&fm);
    std::map<VarRef, Term> bindings;
    std::vector<SelDraw> draws;
    enumerate_groundings(m.sigma, tr.head, tr.p, fv, 0, bindings, draws,
                         [&](const Term& gh, double w, const std::vector<SelDraw>& hd) {
                           fn(static_cast<int>(idx), gh, w, hd);
                         });
  }
}

std::vector<StepEntry> step_distribution(const Model& m, const Term& state) {
  if (!m.validated) throw ModelError("step distribution requires a validated model");
  TermOrder ord = m.order();
  auto key_less = [&ord](const std::pair<Term, std::optional<Term>>& a,
                         const std::pair<Term, std::optional<Term>>& b) {
    if (int c = ord.compare(a.first, b.first); c != 0) return c < 0;
    if (a.second.has_value() != b.second.has_value()) return !a.second.has_value();
    if (!a.second) return false;
    return ord.compare(*a.second, *b.second) < 0;
  };
  std::map<std::pair<Term, std::optional<Term>>, double, decltype(key_less)> acc(key_less);

  if (state == start_atom()) {
    expand_priors(m, [&](int, const Term& gh, double w, const std::vector<SelDraw>&) {
      acc[{gh, std::nullopt}] += w;
    });
  } else if (state == end_atom()) {
    return {};
  } else {
    std::vector<int> cands = max_specific(m, state);
    if (cands.empty())
      throw ModelError("dead state '" + to_string(state) +
                       "': no transition body matches");
    for (int idx : cands) {
      const AbstractTransition& tr = m.transitions[idx];
      const TransitionMeta& meta = m.meta[idx];
      auto sb = match(tr.body, state);
      Term head = apply(tr.head, *sb);
      Term obs = apply(*tr.obs, *sb);
      std::vector<const FreeVarMeta*> hv;
      for (const FreeVarMeta& fm : meta.head_free) hv.push_back(&fm);
      std::map<VarRef, Term> hb;
      std::vector<SelDraw> hd;
      enumerate_groundings(
          m.sigma, head, tr.p, hv, 0, hb, hd,
          [&](const Term& gh, double hw, const std::vector<SelDraw>&) {
            // Ground the observation under the same head bindings, then
            // enumerate its remaining free variables.
            Substitution s;
            s.map = hb;
            Term obs2 = apply(obs, s);
            std::vector<const FreeVarMeta*> ov;
            for (const FreeVarMeta& fm : meta.obs_free) ov.push_back(&fm);
            std::map<VarRef, Term> ob;
            std::vector<SelDraw> od;
            enumerate_groundings(m.sigma, obs2, hw, ov, 0, ob, od,
                                 [&](const Term& go, double w, const std::vector<SelDraw>&) {
                                   acc[{gh, go}] += w;
                                 });
          });
    }
  }

  std::vector<StepEntry> out;
  out.reserve(acc.size());
  for (const auto& [key, p] : acc) out.push_back(StepEntry{key.first, key.second, p});
  return out;
}

}  // namespace lohmm
