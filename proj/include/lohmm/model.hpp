#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lohmm/alphabet.hpp"
#include "lohmm/subst.hpp"
#include "lohmm/term.hpp"

namespace lohmm {

// A (predicate, argument position) pair naming one selection categorical.
// Argument positions are 1-based, matching the file syntax.
struct SelectionKey {
  SymbolKey pred;
  int arg = 0;

  bool operator==(const SelectionKey& o) const { return arg == o.arg && pred == o.pred; }
  bool operator<(const SelectionKey& o) const {
    if (!(pred == o.pred)) return pred < o.pred;
    return arg < o.arg;
  }
};

std::string to_string(const SelectionKey& k);

// A selection declaration as written in a model file: explicit probabilities
// for the constants a variable at this position may take.
struct SelectionDecl {
  SelectionKey key;
  std::vector<std::pair<std::string, double>> entries;
  int line = 0;
};

// One abstract transition `p : head <- body emits obs.`  Priors have the
// reserved body `start` and carry no observation.
struct AbstractTransition {
  double p = 0.0;
  Term head;
  Term body;
  std::optional<Term> obs;
  int line = 0;

  bool is_prior() const { return body.is_compound() && body.name == "start" && body.arity() == 0; }
};

enum class Termination { FixedLength, EndTerminated };

// Per-variable selection data, resolved against the model's declarations:
// `probs` holds the draw probability of each constant of `type` (domain
// order), already folding in declared categoricals, identifier flags and the
// uniform default.
struct FreeVarMeta {
  VarRef var;
  std::string type;
  std::optional<SelectionKey> slot;  // governing top-level position, if any
  bool identifier = false;
  std::vector<double> probs;
};

// Derived per-transition data filled in by validate().
struct TransitionMeta {
  std::vector<FreeVarMeta> head_free;  // vars(head) minus vars(body), first-occurrence order
  std::vector<FreeVarMeta> obs_free;   // vars(obs) minus vars(body) minus vars(head)
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

struct Model {
  Alphabet sigma;
  std::vector<SelectionDecl> selection_decls;
  std::vector<AbstractTransition> transitions;  // priors and regular, file order

  // Everything below is derived by validate() and preserved by re-estimation.
  bool validated = false;
  Termination termination = Termination::FixedLength;
  std::map<SelectionKey, std::vector<double>> selection;  // aligned with domain order
  std::vector<int> body_class;                 // transition index -> class id
  std::vector<std::vector<int>> classes;       // class id -> transition indices
  std::vector<Term> class_body;                // class id -> representative body
  std::vector<TransitionMeta> meta;

  TermOrder order() const { return TermOrder(sigma); }
};

// Semantic validation.  On success (no errors) fills in the derived fields
// and sets m.validated; zero-probability transitions are pruned with a
// warning.  Checks, in particular: transitions typecheck against the
// alphabet; priors exist and carry no observation; `start` appears only as a
// prior body and `end` only as a head (or observation); probabilities lie in
// [0, 1] and sum to one within 1e-9 over each body-variant class; the body
// set is closed under greatest lower bounds (so maximally specific matches
// are unique up to variance); selection declarations sit on enumerable,
// non-identifier positions and cover their domain exactly with probabilities
// summing to one; every variable that requires a selection draw ranges over
// an enumerable type; and the alphabet declares at least one constant.
ValidationReport validate(Model& m);

// The probability that the selection distribution refines `abstract_atom` to
// `ground_atom`: the product, over the distinct variables of the abstract
// atom, of the draw probability of the constant each variable is bound to.
// Throws ModelError if the abstract atom does not subsume the ground one or
// a variable is bound to a value outside its domain.
double selection_prob(const Model& m, const Term& ground_atom, const Term& abstract_atom);

// Indices of the maximally specific transitions for a ground state: those
// whose body matches `state` while no strictly more specific body in the
// model also matches.  The surviving bodies are pairwise variants; if the
// model violates that (impossible after validation), a ModelError is thrown.
std::vector<int> max_specific(const Model& m, const Term& state);

// One entry of the ground one-step distribution from a state.
struct StepEntry {
  Term next;
  std::optional<Term> obs;  // absent for the prior step from `start`
  double p = 0.0;
};

// The full ground joint distribution of (next state, observation) one step
// from `state`, aggregated over transitions and selection groundings and
// sorted canonically.  For the reserved `end` state the result is empty; for
// any other state with no matching transition a ModelError is thrown.
std::vector<StepEntry> step_distribution(const Model& m, const Term& state);

// One recorded selection draw: categorical `key` chose domain element `index`.
struct SelDraw {
  SelectionKey key;
  int index = 0;
};

// Enumerates the decomposition of one trellis step from ground state `state`
// that emits exactly the ground observation `obs`.  For every contributing
// combination of a maximally specific transition and a grounding of its free
// variables, calls fn(transition_index, ground_head, weight, head_draws,
// obs_draws) where weight = p * mu(head grounding) * mu(obs grounding) and
// the draw lists cover only positions with a governing categorical on a
// non-identifier type (the ones re-estimated by learning).
using StepVisitor = std::function<void(int, const Term&, double,
                                       const std::vector<SelDraw>&,
                                       const std::vector<SelDraw>&)>;
void expand_step(const Model& m, const Term& state, const Term& obs,
                 const StepVisitor& fn);

// Enumerates the ground prior states: for every prior transition and head
// grounding, calls fn(transition_index, ground_state, weight, head_draws).
using PriorVisitor = std::function<void(int, const Term&, double,
                                        const std::vector<SelDraw>&)>;
void expand_priors(const Model& m, const PriorVisitor& fn);

// Resolved selection data for the distinct free variables of `atom` that are
// not in `bound_elsewhere`, in first-occurrence order.  Fails (returns an
// error message) if some such variable's type is not enumerable.
std::string free_var_meta(const Term& atom, const std::vector<VarRef>& bound_elsewhere,
                          const Alphabet& sigma,
                          const std::map<SelectionKey, std::vector<double>>& selection,
                          std::vector<FreeVarMeta>* out);

// Recomputes the selection-dependent derived tables (aligned categoricals and
// per-transition variable metadata) after a parameter update that leaves the
// transition structure untouched.  Requires a previously validated model;
// returns an error message or "".
std::string refresh_parameters(Model& m);

// Building blocks shared with the Moore-style variant of the model.

// Groups transitions into body-variance classes in order of first appearance.
void group_body_classes(const std::vector<AbstractTransition>& transitions,
                        std::vector<int>* body_class,
                        std::vector<std::vector<int>>* classes,
                        std::vector<Term>* class_body);

// Checks the glb-closure property over the body set; "" when it holds.
std::string check_body_glb(const std::vector<Term>& class_body);

// Aligns selection declarations with the domains they draw from; appends any
// problems to `errors`.
void build_selection_tables(const Alphabet& sigma,
                            const std::vector<SelectionDecl>& decls,
                            std::map<SelectionKey, std::vector<double>>* out,
                            std::vector<std::string>* errors);

// Ids of the classes whose body matches `state`, filtered to the maximally
// specific ones.  Throws ModelError if the survivors are not pairwise
// variants (the glb-closure check rules this out for validated models).
std::vector<int> max_specific_classes(const std::vector<Term>& class_body,
                                      const Term& state);

// Calls sink once per grounding of `free_vars` applied to `partial`, with the
// accumulated selection probability; first-occurrence order, last variable
// fastest.
void enumerate_free_vars(const Alphabet& sigma, const Term& partial, double w,
                         const std::vector<const FreeVarMeta*>& free_vars,
                         const std::function<void(const Term&, double)>& sink);

inline Term start_atom() { return Term::atom("start"); }
inline Term end_atom() { return Term::atom("end"); }

}  // namespace lohmm
