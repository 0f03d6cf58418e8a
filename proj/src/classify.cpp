#include "lohmm/classify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <thread>

#include "lohmm/error.hpp"
#include "lohmm/inference.hpp"
#include "lohmm/sampling.hpp"

namespace lohmm {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

Classifier fit_classifier(const Model& tmpl, const std::vector<LabeledSequence>& corpus,
                          const TrainOptions& options) {
  if (!tmpl.validated) throw ModelError("classification requires a validated model");
  if (corpus.empty()) throw ModelError("cannot fit a classifier on an empty corpus");

  Classifier c;
  std::map<std::string, int> index;
  std::vector<std::vector<std::vector<Term>>> by_class;
  for (const LabeledSequence& ls : corpus) {
    auto [it, inserted] = index.emplace(ls.label, static_cast<int>(c.labels.size()));
    if (inserted) {
      c.labels.push_back(ls.label);
      by_class.emplace_back();
    }
    by_class[it->second].push_back(ls.obs);
  }

  for (size_t k = 0; k < c.labels.size(); ++k) {
    try {
      TrainResult tr = train(tmpl, by_class[k], options);
      c.models.push_back(std::move(tr.model));
    } catch (const ModelError& e) {
      throw ModelError("class '" + c.labels[k] + "': " + e.what());
    }
    c.log_prior.push_back(std::log(static_cast<double>(by_class[k].size()) /
                                   static_cast<double>(corpus.size())));
  }
  return c;
}

Prediction predict(const Classifier& c, const std::vector<Term>& obs) {
  if (c.labels.empty()) throw ModelError("the classifier has no classes");
  Prediction pred;
  pred.scores.reserve(c.labels.size());
  for (size_t k = 0; k < c.labels.size(); ++k) {
    ForwardResult fr = forward(c.models[k], obs, NumericMode::Scaled);
    pred.scores.push_back(fr.log_likelihood > kNegInf
                              ? fr.log_likelihood + c.log_prior[k]
                              : kNegInf);
  }
  for (size_t k = 0; k < pred.scores.size(); ++k) {
    if (pred.scores[k] == kNegInf) continue;
    if (pred.label_index < 0 || pred.scores[k] > pred.scores[pred.label_index])
      pred.label_index = static_cast<int>(k);
  }
  if (pred.label_index < 0)
    throw ZeroLikelihoodError("every class assigns the sequence probability zero");
  pred.label = c.labels[pred.label_index];
  return pred;
}

namespace {

// Deals indices into stratified folds: within each class the (shuffled)
// sequences are distributed round-robin, so every fold sees every class
// whenever enough examples exist.
std::vector<int> stratified_folds(const std::vector<LabeledSequence>& corpus, int folds,
                                  std::uint64_t seed) {
  std::map<std::string, std::vector<size_t>> by_class;
  for (size_t i = 0; i < corpus.size(); ++i) by_class[corpus[i].label].push_back(i);
  std::vector<int> fold(corpus.size(), 0);
  Rng rng(seed);
  for (auto& [label, idx] : by_class) {
    for (size_t i = idx.size(); i > 1; --i) {
      size_t j = rng.below(i);
      std::swap(idx[i - 1], idx[j]);
    }
    for (size_t pos = 0; pos < idx.size(); ++pos)
      fold[idx[pos]] = static_cast<int>(pos % static_cast<size_t>(folds));
  }
  return fold;
}

std::vector<int> plain_folds(size_t n, int folds, std::uint64_t seed) {
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  Rng rng(seed);
  for (size_t i = n; i > 1; --i) {
    size_t j = rng.below(i);
    std::swap(idx[i - 1], idx[j]);
  }
  std::vector<int> fold(n, 0);
  for (size_t pos = 0; pos < n; ++pos)
    fold[idx[pos]] = static_cast<int>(pos % static_cast<size_t>(folds));
  return fold;
}

}  // namespace

CvResult cross_validate(const Model& tmpl, const std::vector<LabeledSequence>& corpus,
                        const TrainOptions& train_options, const CvOptions& cv) {
  if (corpus.empty()) throw ModelError("cannot cross-validate an empty corpus");
  int folds = cv.leave_one_out ? static_cast<int>(corpus.size()) : cv.folds;
  if (folds < 2) throw ModelError("cross-validation needs at least two folds");
  if (folds > static_cast<int>(corpus.size()))
    throw ModelError("more folds than sequences");

  std::vector<int> fold(corpus.size());
  if (cv.leave_one_out) {
    for (size_t i = 0; i < corpus.size(); ++i) fold[i] = static_cast<int>(i);
  } else {
    fold = stratified_folds(corpus, folds, cv.seed);
  }

  CvResult res;
  std::map<std::string, int> label_index;
  for (const LabeledSequence& ls : corpus) {
    if (label_index.emplace(ls.label, static_cast<int>(res.labels.size())).second)
      res.labels.push_back(ls.label);
  }
  res.confusion.assign(res.labels.size(), std::vector<int>(res.labels.size(), 0));

  for (int f = 0; f < folds; ++f) {
    std::vector<LabeledSequence> trainset;
    std::vector<size_t> testset;
    std::set<std::string> seen;
    for (size_t i = 0; i < corpus.size(); ++i) {
      if (fold[i] == f) {
        testset.push_back(i);
      } else {
        trainset.push_back(corpus[i]);
        seen.insert(corpus[i].label);
      }
    }
    if (testset.empty()) continue;
    if (seen.size() < res.labels.size()) {
      res.warnings.push_back("fold " + std::to_string(f + 1) +
                             " skipped: a class is absent from its training split");
      ++res.folds_skipped;
      continue;
    }
    Classifier c = fit_classifier(tmpl, trainset, train_options);
    ++res.folds_run;
    double fold_log = 0.0;
    for (size_t i : testset) {
      ++res.total;
      int truth = label_index.at(corpus[i].label);
      try {
        Prediction p = predict(c, corpus[i].obs);
        // The fold classifier may order labels differently from the corpus:
        // translate through the label strings, never the raw indices.
        int predicted = label_index.at(p.label);
        ++res.confusion[truth][predicted];
        if (predicted == truth) ++res.correct;
        for (size_t k = 0; k < c.labels.size(); ++k)
          if (c.labels[k] == corpus[i].label && p.scores[k] > kNegInf)
            fold_log += p.scores[k];
      } catch (const ZeroLikelihoodError&) {
        ++res.zero_likelihood;
        res.warnings.push_back("sequence " + std::to_string(i + 1) +
                               " has zero likelihood under every class; counted as "
                               "misclassified");
      }
    }
    res.fold_test_log.push_back(fold_log);
  }
  res.accuracy =
      res.total > 0 ? static_cast<double>(res.correct) / res.total : kNaN;
  return res;
}

namespace {

struct SequenceScore {
  double a = kNegInf;
  double b = kNegInf;
};

double safe_loglik(const Model& m, const std::vector<Term>& obs) {
  try {
    return forward(m, obs, NumericMode::Scaled).log_likelihood;
  } catch (const ModelError&) {
    return kNegInf;
  }
}

}  // namespace

CompareResult compare_models(const Model& a, const Model& b,
                             const std::vector<std::vector<Term>>& corpus,
                             const CompareOptions& options) {
  if (corpus.empty()) throw ModelError("cannot compare models on an empty corpus");
  CompareResult res;
  std::vector<SequenceScore> scores(corpus.size());

  if (options.scheme == CompareScheme::AsIs) {
    for (size_t i = 0; i < corpus.size(); ++i)
      scores[i] = {safe_loglik(a, corpus[i]), safe_loglik(b, corpus[i])};
  } else {
    int folds = options.scheme == CompareScheme::LeaveOneOut
                    ? static_cast<int>(corpus.size())
                    : options.folds;
    if (folds < 2) throw ModelError("model comparison needs at least two folds");
    if (folds > static_cast<int>(corpus.size()))
      throw ModelError("more folds than sequences");
    std::vector<int> fold(corpus.size());
    if (options.scheme == CompareScheme::LeaveOneOut) {
      for (size_t i = 0; i < corpus.size(); ++i) fold[i] = static_cast<int>(i);
    } else {
      fold = plain_folds(corpus.size(), folds, options.seed);
    }

    struct FoldOutcome {
      double train_a = 0.0, train_b = 0.0;
      std::vector<std::pair<size_t, SequenceScore>> tests;
      std::vector<std::string> warnings;
    };
    std::vector<FoldOutcome> outcome(folds);
    TrainOptions per_fold = options.train;
    per_fold.jobs = 1;  // parallelism is across folds here

    auto run_fold = [&](int f) {
      std::vector<std::vector<Term>> trainset;
      std::vector<size_t> testset;
      for (size_t i = 0; i < corpus.size(); ++i) {
        if (fold[i] == f)
          testset.push_back(i);
        else
          trainset.push_back(corpus[i]);
      }
      if (testset.empty()) return;
      FoldOutcome& out = outcome[f];
      TrainResult ta = train(a, trainset, per_fold);
      TrainResult tb = train(b, trainset, per_fold);
      out.train_a = ta.log_likelihood_trace.back();
      out.train_b = tb.log_likelihood_trace.back();
      for (const std::string& w : ta.warnings) out.warnings.push_back(w);
      for (const std::string& w : tb.warnings) out.warnings.push_back(w);
      for (size_t i : testset)
        out.tests.emplace_back(
            i, SequenceScore{safe_loglik(ta.model, corpus[i]),
                             safe_loglik(tb.model, corpus[i])});
    };

    int jobs = std::max(1, options.train.jobs);
    jobs = std::min<int>(jobs, folds);
    if (jobs == 1) {
      for (int f = 0; f < folds; ++f) run_fold(f);
    } else {
      std::vector<std::thread> pool;
      std::atomic<int> next{0};
      for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
          for (int f = next.fetch_add(1); f < folds; f = next.fetch_add(1)) run_fold(f);
        });
      for (std::thread& t : pool) t.join();
    }

    std::set<std::string> warned;
    for (const FoldOutcome& out : outcome) {
      res.train_log_a += out.train_a;
      res.train_log_b += out.train_b;
      for (const auto& [i, s] : out.tests) scores[i] = s;
      for (const std::string& w : out.warnings)
        if (warned.insert(w).second) res.warnings.push_back(w);
    }
  }

  for (const SequenceScore& s : scores) {
    if (s.a == kNegInf && s.b == kNegInf) {
      ++res.excluded;
      continue;
    }
    if (s.a > s.b)
      ++res.wins_a;
    else if (s.b > s.a)
      ++res.wins_b;
    else
      ++res.ties;
    if (s.a > kNegInf) res.test_log_a += s.a;
    if (s.b > kNegInf) res.test_log_b += s.b;
    if (s.a > kNegInf && s.b > kNegInf) res.sum_log_ratio += s.a - s.b;
  }
  res.comparisons = res.wins_a + res.wins_b + res.ties;
  if (res.comparisons > 0)
    res.win_rate_a = static_cast<double>(res.wins_a) / res.comparisons;
  return res;
}

}  // namespace lohmm
