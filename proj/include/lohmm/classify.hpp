#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lohmm/learning.hpp"
#include "lohmm/model.hpp"

namespace lohmm {

/// One training or evaluation example: a class label and its observation
/// sequence.
struct LabeledSequence {
  std::string label;
  std::vector<Term> obs;
};

/// A plug-in sequence classifier: one model per class plus log class priors
/// estimated from label frequencies.
struct Classifier {
  std::vector<std::string> labels;  // first-appearance order
  std::vector<Model> models;        // aligned with labels
  std::vector<double> log_prior;    // aligned with labels
};

/// Trains one copy of `tmpl` per distinct label on that label's sequences and
/// estimates class priors by relative frequency. Labels are kept in order of
/// first appearance. Throws ModelError (tagged with the class label) if the
/// corpus is empty or training fails for a class.
Classifier fit_classifier(const Model& tmpl, const std::vector<LabeledSequence>& corpus,
                          const TrainOptions& options = {});

/// Result of classifying one sequence. `scores[i]` is the joint log
/// probability log P(obs | class i) + log P(class i); -infinity marks classes
/// under which the sequence is impossible.
struct Prediction {
  int label_index = -1;
  std::string label;
  std::vector<double> scores;
};

/// Scores `obs` under every class model and returns the argmax (first
/// maximum on ties). Throws ZeroLikelihoodError when every class assigns
/// probability zero.
Prediction predict(const Classifier& c, const std::vector<Term>& obs);

/// Cross-validation settings. With `leave_one_out` each sequence forms its
/// own test fold; otherwise the corpus is shuffled with `seed` and dealt
/// round-robin into `folds` folds, stratified by class.
struct CvOptions {
  bool leave_one_out = false;
  int folds = 10;
  std::uint64_t seed = 0;
};

/// Result of one cross-validation run. `accuracy` is NaN when every fold was
/// skipped. `confusion[i][j]` counts sequences of true class i predicted as
/// class j (classes in `labels` order); sequences with zero likelihood under
/// every class are counted in `zero_likelihood` and as errors, not in the
/// confusion matrix. `fold_test_log[f]` sums, over the classified test
/// sequences of fold f, the joint log probability under the true class.
struct CvResult {
  int correct = 0;
  int total = 0;
  int folds_run = 0;
  int folds_skipped = 0;
  int zero_likelihood = 0;
  double accuracy = 0.0;
  std::vector<std::string> labels;
  std::vector<std::vector<int>> confusion;
  std::vector<double> fold_test_log;
  std::vector<std::string> warnings;
};

/// Estimates classification accuracy by cross-validation: for every fold a
/// classifier is fitted on the remaining data and scored on the fold. Folds
/// whose training split lacks one of the corpus's classes are skipped with a
/// warning.
CvResult cross_validate(const Model& tmpl, const std::vector<LabeledSequence>& corpus,
                        const TrainOptions& train_options, const CvOptions& cv);

/// How compare_models obtains the models it scores each sequence with.
enum class CompareScheme {
  LeaveOneOut,  // retrain both templates on the corpus minus the sequence
  KFold,        // retrain per fold on the complementary folds
  AsIs,         // score with the given models, no retraining
};

struct CompareOptions {
  CompareScheme scheme = CompareScheme::LeaveOneOut;
  int folds = 10;            // for KFold
  std::uint64_t seed = 0;    // fold shuffle
  TrainOptions train;        // per-fold training settings; train.jobs > 1
                             // parallelizes across folds
};

/// Head-to-head comparison of two models on a corpus.
struct CompareResult {
  int wins_a = 0;
  int wins_b = 0;
  int ties = 0;
  int excluded = 0;     // zero likelihood under both models
  int comparisons = 0;  // wins_a + wins_b + ties
  double win_rate_a = 0.0;
  double sum_log_ratio = 0.0;   // sum of log P_a - log P_b over finite pairs
  double train_log_a = 0.0;     // summed training log-likelihoods over folds
  double train_log_b = 0.0;
  double test_log_a = 0.0;      // summed held-out log-likelihoods (finite only)
  double test_log_b = 0.0;
  std::vector<std::string> warnings;
};

/// Compares two model structures by held-out log likelihood. Under
/// LeaveOneOut/KFold both templates are retrained on each training split and
/// each held-out sequence scores a win for the model with the strictly
/// higher log likelihood (zero likelihood under one model is a win for the
/// other; under both, the sequence is excluded). `win_rate_a` is the mean of
/// the zero-one win indicator for `a` over all compared sequences.
CompareResult compare_models(const Model& a, const Model& b,
                             const std::vector<std::vector<Term>>& corpus,
                             const CompareOptions& options = {});

}  // namespace lohmm
