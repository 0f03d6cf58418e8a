#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lohmm/inference.hpp"
#include "lohmm/model.hpp"

namespace lohmm {

// Expected sufficient statistics of one E step: per-transition use counts and
// per-categorical selection counts.  Selection entries exist exactly for the
// statically active positions (those some free variable draws from), zeroed
// at construction, so merging is shape-stable.
struct ExpectedCounts {
  std::vector<double> xi;  // aligned with Model::transitions
  std::map<SelectionKey, std::vector<double>> sel;
  double log_likelihood = 0.0;
  int sequences_used = 0;
  int sequences_skipped = 0;

  void merge(const ExpectedCounts& other);
};

// Zero-initialized counts of the right shape for `m`.
ExpectedCounts zero_counts(const Model& m);

// Adds the expected counts of one observation sequence.  Throws
// ZeroLikelihoodError if the sequence has no probability under the model.
void accumulate_counts(const Model& m, const std::vector<Term>& obs,
                       NumericMode mode, ExpectedCounts& into);

struct TrainOptions {
  double pseudocount = 1.0;
  double tolerance = 0.1;
  int max_iterations = 200;
  std::uint64_t seed = 0;  // unused by EM itself; threaded through for CV callers
  NumericMode mode = NumericMode::Scaled;
  bool error_on_zero = false;  // zero-likelihood sequences abort instead of skip
  int jobs = 1;
};

// Smoothed maximum-likelihood update: each transition gets
// (pseudocount + xi) normalized over its body-variant class, and each active
// selection categorical gets (pseudocount + count) normalized over its
// domain.  A class or categorical with zero total evidence and zero
// pseudocount keeps its parameters, with a warning.
Model reestimate(const Model& m, const ExpectedCounts& counts, double pseudocount,
                 std::vector<std::string>* warnings);

struct TrainResult {
  Model model;
  std::vector<double> log_likelihood_trace;  // one entry per E step
  int iterations = 0;                        // number of M steps applied
  std::vector<std::string> warnings;
};

// Baum-Welch expectation-maximization.  Stops after the summed corpus
// log-likelihood improves by less than `tolerance` between consecutive E
// steps, or after max_iterations M steps.  The returned model is the one the
// final trace entry was measured on.
TrainResult train(const Model& m, const std::vector<std::vector<Term>>& corpus,
                  const TrainOptions& options);

}  // namespace lohmm
