#include "lohmm/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lohmm/error.hpp"

namespace lohmm {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void check_observations(const Model& m, const std::vector<Term>& obs) {
  if (!m.validated) throw ModelError("evaluation requires a validated model");
  for (size_t t = 0; t < obs.size(); ++t) {
    const Term& o = obs[t];
    if (!o.is_ground())
      throw ModelError("observation '" + to_string(o) + "' is not ground");
    if (o == end_atom()) {
      // `end` is reserved for the closing position of end-terminated input.
      if (m.termination != Termination::EndTerminated || t + 1 != obs.size())
        throw ModelError(
            "the reserved 'end' observation may only close a sequence under "
            "an end-terminated model");
      continue;
    }
    std::map<VarRef, std::string> var_types;
    std::string err = typecheck_atom(o, m.sigma, var_types);
    if (!err.empty()) throw ModelError("observation '" + to_string(o) + "': " + err);
  }
  if (m.termination == Termination::EndTerminated) {
    if (obs.empty() || !(obs.back() == end_atom()))
      throw ModelError(
          "the model is end-terminated: sequences must close with the 'end' "
          "observation");
  }
}

namespace {

Layer make_layer(const Model& m) { return Layer(m.order()); }

// Shared forward recursion.  Returns the trellis with alpha filled; the
// caller derives the likelihood.
void run_forward(const Model& m, const std::vector<Term>& obs, NumericMode mode,
                 Trellis& tr) {
  const size_t T = obs.size();
  tr.mode = mode;
  tr.alpha.assign(T + 1, make_layer(m));
  tr.beta.clear();
  tr.scale.clear();
  if (mode == NumericMode::Scaled) tr.scale.assign(T + 1, 0.0);

  Layer& first = tr.alpha[0];
  expand_priors(m, [&](int, const Term& g, double w, const std::vector<SelDraw>&) {
    first[g] += w;
  });
  bool alive = true;
  for (size_t t = 0; t <= T; ++t) {
    if (t > 0 && alive) {
      const Layer& prev = tr.alpha[t - 1];
      Layer& cur = tr.alpha[t];
      for (const auto& [state, a] : prev) {
        expand_step(m, state, obs[t - 1],
                    [&](int, const Term& g, double w, const std::vector<SelDraw>&,
                        const std::vector<SelDraw>&) { cur[g] += a * w; });
      }
    }
    if (!alive) {
      tr.alpha[t].clear();
      continue;
    }
    if (mode == NumericMode::Scaled) {
      double c = 0.0;
      for (const auto& [state, a] : tr.alpha[t]) c += a;
      tr.scale[t] = c;
      if (c <= 0.0) {
        alive = false;
        tr.alpha[t].clear();
        continue;
      }
      for (auto& [state, a] : tr.alpha[t]) a /= c;
    } else {
      double c = 0.0;
      for (const auto& [state, a] : tr.alpha[t]) c += a;
      if (c <= 0.0) {
        alive = false;
        tr.alpha[t].clear();
      }
    }
  }
}

// Mass of the final layer that counts toward the likelihood: everything for
// fixed-length models, the absorbed `end` share for end-terminated ones.
double final_share(const Model& m, const Layer& last) {
  if (m.termination == Termination::FixedLength) {
    double s = 0.0;
    for (const auto& [state, a] : last) s += a;
    return s;
  }
  auto it = last.find(end_atom());
  return it == last.end() ? 0.0 : it->second;
}

}  // namespace

ForwardResult forward(const Model& m, const std::vector<Term>& obs, NumericMode mode) {
  check_observations(m, obs);
  ForwardResult res;
  run_forward(m, obs, mode, res.trellis);
  const Trellis& tr = res.trellis;
  const size_t T = obs.size();
  if (tr.alpha[T].empty()) {
    res.likelihood = 0.0;
    res.log_likelihood = kNegInf;
    return res;
  }
  if (mode == NumericMode::Scaled) {
    double log_l = 0.0;
    for (double c : tr.scale) log_l += std::log(c);
    double share = final_share(m, tr.alpha[T]);
    if (share <= 0.0) {
      res.likelihood = 0.0;
      res.log_likelihood = kNegInf;
      return res;
    }
    log_l += std::log(share);
    res.log_likelihood = log_l;
    res.likelihood = std::exp(log_l);
  } else {
    double p = final_share(m, tr.alpha[T]);
    res.likelihood = p;
    res.log_likelihood = p > 0.0 ? std::log(p) : kNegInf;
  }
  return res;
}

void backward(const Model& m, const std::vector<Term>& obs, Trellis& tr) {
  check_observations(m, obs);
  const size_t T = obs.size();
  if (tr.alpha.size() != T + 1)
    throw ModelError("trellis does not match the observation sequence");
  if (tr.alpha[T].empty())
    throw ZeroLikelihoodError("cannot run the backward pass: the sequence has zero likelihood");

  tr.beta.assign(T + 1, make_layer(m));
  for (const auto& [state, a] : tr.alpha[T]) {
    bool counted = m.termination == Termination::FixedLength || state == end_atom();
    tr.beta[T][state] = counted ? 1.0 : 0.0;
  }
  for (size_t t = T; t-- > 0;) {
    const Layer& next_beta = tr.beta[t + 1];
    double div = tr.mode == NumericMode::Scaled ? tr.scale[t + 1] : 1.0;
    for (const auto& [state, a] : tr.alpha[t]) {
      double sum = 0.0;
      expand_step(m, state, obs[t],
                  [&](int, const Term& g, double w, const std::vector<SelDraw>&,
                      const std::vector<SelDraw>&) {
                    auto it = next_beta.find(g);
                    if (it != next_beta.end()) sum += w * it->second;
                  });
      tr.beta[t][state] = sum / div;
    }
  }
}

namespace {

struct BackPointer {
  Term prev;
  int transition = -1;
};

}  // namespace

ViterbiResult viterbi(const Model& m, const std::vector<Term>& obs) {
  check_observations(m, obs);
  const size_t T = obs.size();
  TermOrder ord = m.order();

  std::vector<std::map<Term, double, TermOrder>> delta(T + 1, std::map<Term, double, TermOrder>(ord));
  std::vector<std::map<Term, Term, TermOrder>> psi(T + 1, std::map<Term, Term, TermOrder>(ord));

  {
    // Parallel priors into the same ground state are summed, like any other
    // ground edge.
    Layer first = Layer(ord);
    expand_priors(m, [&](int, const Term& g, double w, const std::vector<SelDraw>&) {
      first[g] += w;
    });
    for (const auto& [state, w] : first)
      if (w > 0.0) delta[0][state] = std::log(w);
  }

  for (size_t t = 1; t <= T; ++t) {
    for (const auto& [prev_state, score] : delta[t - 1]) {
      // Aggregate the parallel abstract transitions of each ground edge.
      Layer edges = Layer(ord);
      expand_step(m, prev_state, obs[t - 1],
                  [&](int, const Term& g, double w, const std::vector<SelDraw>&,
                      const std::vector<SelDraw>&) { edges[g] += w; });
      for (const auto& [next_state, w] : edges) {
        if (w <= 0.0) continue;
        double cand = score + std::log(w);
        auto it = delta[t].find(next_state);
        if (it == delta[t].end()) {
          delta[t].emplace(next_state, cand);
          psi[t].insert_or_assign(next_state, prev_state);
        } else if (cand > it->second) {
          it->second = cand;
          psi[t].insert_or_assign(next_state, prev_state);
        }
      }
    }
  }

  // Pick the best admissible final state.
  const Term* best = nullptr;
  double best_score = kNegInf;
  for (const auto& [state, score] : delta[T]) {
    if (m.termination == Termination::EndTerminated && !(state == end_atom()))
      continue;
    if (best == nullptr || score > best_score) {
      best = &state;
      best_score = score;
    }
  }
  if (best == nullptr)
    throw ZeroLikelihoodError("no state path explains the observation sequence");

  ViterbiResult res;
  res.log_probability = best_score;
  res.probability = std::exp(best_score);
  res.path.resize(T + 1);
  Term cur = *best;
  for (size_t t = T; t > 0; --t) {
    res.path[t] = cur;
    cur = psi[t].at(cur);
  }
  res.path[0] = cur;
  return res;
}

AbstractViterbiResult viterbi_abstract(const Model& m, const std::vector<Term>& obs) {
  check_observations(m, obs);
  const size_t T = obs.size();
  TermOrder ord = m.order();

  std::vector<std::map<Term, double, TermOrder>> delta(T + 1, std::map<Term, double, TermOrder>(ord));
  std::vector<std::map<Term, BackPointer, TermOrder>> back(
      T + 1, std::map<Term, BackPointer, TermOrder>(ord));

  expand_priors(m, [&](int idx, const Term& g, double w, const std::vector<SelDraw>&) {
    if (w <= 0.0) return;
    double cand = std::log(w);
    auto it = delta[0].find(g);
    if (it == delta[0].end()) {
      delta[0].emplace(g, cand);
      back[0].insert_or_assign(g, BackPointer{start_atom(), idx});
    } else if (cand > it->second) {
      it->second = cand;
      back[0].insert_or_assign(g, BackPointer{start_atom(), idx});
    }
  });

  for (size_t t = 1; t <= T; ++t) {
    for (const auto& [prev_state, score] : delta[t - 1]) {
      expand_step(m, prev_state, obs[t - 1],
                  [&](int idx, const Term& g, double w, const std::vector<SelDraw>&,
                      const std::vector<SelDraw>&) {
                    if (w <= 0.0) return;
                    double cand = score + std::log(w);
                    auto it = delta[t].find(g);
                    if (it == delta[t].end()) {
                      delta[t].emplace(g, cand);
                      back[t].insert_or_assign(g, BackPointer{prev_state, idx});
                    } else if (cand > it->second) {
                      it->second = cand;
                      back[t].insert_or_assign(g, BackPointer{prev_state, idx});
                    }
                  });
    }
  }

  const Term* best = nullptr;
  double best_score = kNegInf;
  for (const auto& [state, score] : delta[T]) {
    if (m.termination == Termination::EndTerminated && !(state == end_atom()))
      continue;
    if (best == nullptr || score > best_score) {
      best = &state;
      best_score = score;
    }
  }
  if (best == nullptr)
    throw ZeroLikelihoodError("no derivation explains the observation sequence");

  AbstractViterbiResult res;
  res.log_probability = best_score;
  res.probability = std::exp(best_score);
  res.states.resize(T + 2);
  res.transitions.resize(T + 1);
  Term cur = *best;
  for (size_t t = T + 1; t > 0; --t) {
    res.states[t] = cur;
    const BackPointer& bp = back[t - 1].at(cur);
    res.transitions[t - 1] = bp.transition;
    cur = bp.prev;
  }
  res.states[0] = cur;  // the literal start state
  return res;
}

}  // namespace lohmm
