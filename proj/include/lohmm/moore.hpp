#pragma once

#include <cstddef>
#include <vector>

#include "lohmm/inference.hpp"
#include "lohmm/model.hpp"

namespace lohmm {

// One abstract emission clause `emission obs <- state.` with probability 1;
// the actual emission probability comes from the selection distribution over
// the observation's free variables.
struct AbstractEmission {
  Term obs;
  Term state;
  int line = 0;
};

// A Moore-style model: states carry their entry observation pattern as an
// extra argument, transitions emit nothing, and observations are produced by
// per-state emission clauses.
struct MooreModel {
  Alphabet sigma;
  std::vector<SelectionDecl> selection_decls;
  std::vector<AbstractTransition> transitions;  // obs absent on every entry
  std::vector<AbstractEmission> emissions;

  // Derived by validate().
  bool validated = false;
  Termination termination = Termination::FixedLength;
  std::map<SelectionKey, std::vector<double>> selection;
  std::vector<int> body_class;
  std::vector<std::vector<int>> classes;
  std::vector<Term> class_body;
  std::vector<std::vector<FreeVarMeta>> head_meta;      // per transition
  std::vector<std::vector<FreeVarMeta>> emission_meta;  // per emission clause

  TermOrder order() const { return TermOrder(sigma); }
};

ValidationReport validate(MooreModel& m);

// Probability that `state` emits the ground observation `obs`: the selection
// probability of the observation under the maximally specific emission
// clause whose state pattern matches.  Zero when nothing matches.
double moore_emission_prob(const MooreModel& m, const Term& state, const Term& obs);

struct LikelihoodResult {
  double likelihood = 0.0;
  double log_likelihood = 0.0;
};

// Forward evaluation of a Moore model: the prior distribution already names
// the first state, whose emission consumes O_1; subsequent steps interleave
// a transition and an emission.
LikelihoodResult moore_forward(const MooreModel& m, const std::vector<Term>& obs,
                               NumericMode mode = NumericMode::Scaled);

// Converts a transition-emitting model into an equivalent Moore model:
// every state predicate gains one argument storing the observation pattern
// under which the state was entered (free observation variables become the
// '#' placeholder, so only the determined part is stored); each original
// transition contributes an emission clause for its head; and the prior
// becomes the joint distribution of the first state and its entry pattern.
// Observation symbols are materialized as constants/functors of a fresh
// `emitsym` type so they can be stored inside states.  Likelihoods are
// preserved exactly.  Throws ModelError if the construction fails (name
// collisions, non-groundable priors, or more than `prior_cap` prior states).
MooreModel mealy_to_moore(const Model& m, std::size_t prior_cap = 100000);

}  // namespace lohmm
