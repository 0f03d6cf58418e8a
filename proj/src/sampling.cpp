#include "lohmm/sampling.hpp"

#include <set>
#include <sstream>

#include "lohmm/error.hpp"

namespace lohmm {

namespace {

// Inverse-CDF draw over the candidate transitions, in index order.  The
// probabilities of one conflict class sum to one; tiny rounding is absorbed
// by falling back to the last candidate.
int draw_transition(const Model& m, const std::vector<int>& candidates, Rng& rng) {
  double total = 0.0;
  for (int i : candidates) total += m.transitions[i].p;
  double u = rng.uniform() * total;
  double acc = 0.0;
  for (int i : candidates) {
    acc += m.transitions[i].p;
    if (u < acc) return i;
  }
  return candidates.back();
}

// Sequential selection draws for the free variables of one atom, in
// first-occurrence order, each over its domain in declaration order.
void draw_values(const Model& m, const std::vector<FreeVarMeta>& fv, Rng& rng,
                 Substitution& s) {
  for (const FreeVarMeta& fm : fv) {
    const auto& dom = m.sigma.domain(fm.type);
    double u = rng.uniform();
    double acc = 0.0;
    size_t chosen = dom.size() - 1;
    for (size_t i = 0; i < dom.size(); ++i) {
      acc += fm.probs[i];
      if (u < acc) {
        chosen = i;
        break;
      }
    }
    s.map.insert_or_assign(fm.var, Term::constant(dom[chosen]));
  }
}

std::string partial_text(const std::vector<Term>& obs) {
  std::ostringstream os;
  for (size_t i = 0; i < obs.size(); ++i) {
    if (i) os << ", ";
    os << obs[i];
  }
  return os.str();
}

SampleResult run_walk(const Model& m, Rng& rng, bool until_end, int limit) {
  if (!m.validated) throw ModelError("sampling requires a validated model");
  SampleResult out;

  std::vector<int> priors;
  for (size_t i = 0; i < m.transitions.size(); ++i)
    if (m.transitions[i].is_prior()) priors.push_back(static_cast<int>(i));
  int idx = draw_transition(m, priors, rng);
  Substitution s;
  draw_values(m, m.meta[idx].head_free, rng, s);
  Term state = apply(m.transitions[idx].head, s);
  out.states.push_back(state);

  while (true) {
    if (until_end) {
      if (state == end_atom()) return out;
      if (static_cast<int>(out.observations.size()) >= limit)
        throw ModelError("sampling cap of " + std::to_string(limit) +
                         " steps exceeded before reaching end; partial sequence: " +
                         partial_text(out.observations));
    } else if (static_cast<int>(out.observations.size()) == limit) {
      return out;
    }
    std::vector<int> candidates = max_specific(m, state);
    if (candidates.empty())
      throw ModelError("walk died in state '" + to_string(state) + "' after " +
                       std::to_string(out.observations.size()) +
                       " emissions; partial sequence: " + partial_text(out.observations));
    idx = draw_transition(m, candidates, rng);
    const AbstractTransition& tr = m.transitions[idx];
    Substitution sb = *match(tr.body, state);
    draw_values(m, m.meta[idx].head_free, rng, sb);
    Term next = apply(tr.head, sb);
    draw_values(m, m.meta[idx].obs_free, rng, sb);
    Term obs = apply(*tr.obs, sb);
    out.states.push_back(next);
    out.observations.push_back(obs);
    state = next;
  }
}

}  // namespace

SampleResult sample_fixed(const Model& m, int length, Rng& rng) {
  return run_walk(m, rng, false, length);
}

SampleResult sample_until_end(const Model& m, Rng& rng, int cap) {
  return run_walk(m, rng, true, cap);
}

ReachableSets reachable_sets(const Model& m, int horizon, std::size_t state_cap) {
  if (!m.validated) throw ModelError("reachability requires a validated model");
  ReachableSets out;
  TermOrder ord = m.order();
  std::set<Term, TermOrder> frontier(ord);
  frontier.insert(start_atom());
  out.states.push_back({start_atom()});

  for (int step = 1; step <= horizon; ++step) {
    std::set<Term, TermOrder> next(ord);
    std::set<Term, TermOrder> emitted(ord);
    for (const Term& state : frontier) {
      for (const AbstractTransition& tr : m.transitions) {
        auto sb = match(tr.body, state);
        if (!sb) continue;
        for_each_grounding(apply(tr.head, *sb), m.sigma,
                           [&](const Term& g, const Substitution&) { next.insert(g); });
        if (next.size() > state_cap)
          throw ModelError("reachable state set exceeds " + std::to_string(state_cap) +
                           " states at step " + std::to_string(step));
        if (tr.obs) {
          for_each_grounding(apply(*tr.obs, *sb), m.sigma,
                             [&](const Term& g, const Substitution&) { emitted.insert(g); });
          if (emitted.size() > state_cap)
            throw ModelError("emittable observation set exceeds " +
                             std::to_string(state_cap) + " atoms at step " +
                             std::to_string(step));
        }
      }
    }
    out.states.emplace_back(next.begin(), next.end());
    out.observations.emplace_back(emitted.begin(), emitted.end());
    frontier = std::move(next);
  }
  return out;
}

}  // namespace lohmm
