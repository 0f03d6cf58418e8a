#pragma once

#include <map>
#include <vector>

#include "lohmm/model.hpp"

namespace lohmm {

// Scaled mode normalizes each trellis layer to sum one and accumulates the
// log-likelihood from the scaling factors; Exact mode stores raw joint
// probabilities (useful for short sequences and for checking invariants).
enum class NumericMode { Scaled, Exact };

using Layer = std::map<Term, double, TermOrder>;

struct Trellis {
  NumericMode mode = NumericMode::Scaled;
  std::vector<Layer> alpha;   // layers 0..T; layer 0 holds the prior states
  std::vector<Layer> beta;    // filled by backward(); same shape as alpha
  std::vector<double> scale;  // c_0..c_T in Scaled mode, else empty
};

struct ForwardResult {
  double likelihood = 0.0;      // may underflow to 0 in Exact mode
  double log_likelihood = 0.0;  // -infinity when the likelihood is zero
  Trellis trellis;
};

// Checks that every observation is a ground, well-typed atom, and that
// end-terminated models see the reserved `end` observation exactly at the
// final position.  Throws ModelError on violation.
void check_observations(const Model& m, const std::vector<Term>& obs);

// Evaluation: layer 0 is the ground prior distribution (no observation
// consumed); observations O_1..O_T are consumed at steps 1..T.  For
// end-terminated models the likelihood is the mass that has been absorbed
// into `end` at the final layer; for fixed-length models it is the whole
// final layer.
ForwardResult forward(const Model& m, const std::vector<Term>& obs,
                      NumericMode mode = NumericMode::Scaled);

// Fills tr.beta.  In Exact mode sum_S alpha_t(S) * beta_t(S) equals the
// likelihood at every t; in Scaled mode the products of the normalized
// layers are constant across t (1 for fixed-length models).
// Throws ZeroLikelihoodError if the trellis carries no probability mass.
void backward(const Model& m, const std::vector<Term>& obs, Trellis& tr);

// Most probable ground state path S_0..S_T.  Parallel abstract transitions
// between the same pair of ground states are summed into a single edge
// weight.  Ties break toward the canonically smaller predecessor.
struct ViterbiResult {
  std::vector<Term> path;        // T+1 ground states
  double probability = 0.0;      // may underflow for long sequences
  double log_probability = 0.0;
};
ViterbiResult viterbi(const Model& m, const std::vector<Term>& obs);

// Most probable single derivation: one committed abstract transition per
// step, no summing of parallel edges.  The state list starts with the
// literal `start` state, so it has T+2 entries and transitions has T+1
// (indices into m.transitions; entry 0 is the chosen prior).
struct AbstractViterbiResult {
  std::vector<Term> states;
  std::vector<int> transitions;
  double probability = 0.0;
  double log_probability = 0.0;
};
AbstractViterbiResult viterbi_abstract(const Model& m, const std::vector<Term>& obs);

}  // namespace lohmm
