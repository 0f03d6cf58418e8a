#include "lohmm/learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "lohmm/error.hpp"

namespace lohmm {

void ExpectedCounts::merge(const ExpectedCounts& other) {
  if (xi.size() != other.xi.size())
    throw ModelError("cannot merge counts of different shapes");
  for (size_t i = 0; i < xi.size(); ++i) xi[i] += other.xi[i];
  for (const auto& [key, vals] : other.sel) {
    auto it = sel.find(key);
    if (it == sel.end() || it->second.size() != vals.size())
      throw ModelError("cannot merge counts of different shapes");
    for (size_t i = 0; i < vals.size(); ++i) it->second[i] += vals[i];
  }
  log_likelihood += other.log_likelihood;
  sequences_used += other.sequences_used;
  sequences_skipped += other.sequences_skipped;
}

ExpectedCounts zero_counts(const Model& m) {
  if (!m.validated) throw ModelError("counting requires a validated model");
  ExpectedCounts c;
  c.xi.assign(m.transitions.size(), 0.0);
  for (const TransitionMeta& tm : m.meta) {
    for (const auto* group : {&tm.head_free, &tm.obs_free}) {
      for (const FreeVarMeta& fm : *group) {
        if (!fm.slot || fm.identifier) continue;
        auto [it, inserted] = c.sel.emplace(*fm.slot, std::vector<double>());
        if (inserted) it->second.assign(fm.probs.size(), 0.0);
      }
    }
  }
  return c;
}

void accumulate_counts(const Model& m, const std::vector<Term>& obs,
                       NumericMode mode, ExpectedCounts& into) {
  ForwardResult fr = forward(m, obs, mode);
  if (fr.log_likelihood == -std::numeric_limits<double>::infinity())
    throw ZeroLikelihoodError("observation sequence has zero likelihood");
  Trellis& tr = fr.trellis;
  backward(m, obs, tr);
  const size_t T = obs.size();

  // Posterior normalizer: in Scaled mode the alpha/beta products integrate
  // to the absorbed end share (1 for fixed-length models); in Exact mode to
  // the raw likelihood.
  double q;
  if (mode == NumericMode::Scaled) {
    q = 1.0;
    if (m.termination == Termination::EndTerminated) {
      auto it = tr.alpha[T].find(end_atom());
      q = it == tr.alpha[T].end() ? 0.0 : it->second;
    }
  } else {
    q = fr.likelihood;
  }
  if (q <= 0.0) throw ZeroLikelihoodError("observation sequence has zero likelihood");

  auto record = [&into](int idx, double amount, const std::vector<SelDraw>& a,
                        const std::vector<SelDraw>& b) {
    into.xi[idx] += amount;
    for (const SelDraw& d : a) into.sel.at(d.key)[d.index] += amount;
    for (const SelDraw& d : b) into.sel.at(d.key)[d.index] += amount;
  };

  const std::vector<SelDraw> kNone;
  double div0 = (mode == NumericMode::Scaled ? tr.scale[0] : 1.0) * q;
  expand_priors(m, [&](int idx, const Term& g, double w, const std::vector<SelDraw>& hd) {
    auto it = tr.beta[0].find(g);
    if (it == tr.beta[0].end() || it->second == 0.0) return;
    record(idx, w * it->second / div0, hd, kNone);
  });

  for (size_t t = 1; t <= T; ++t) {
    double div = (mode == NumericMode::Scaled ? tr.scale[t] : 1.0) * q;
    for (const auto& [state, a] : tr.alpha[t - 1]) {
      if (a == 0.0) continue;
      expand_step(m, state, obs[t - 1],
                  [&](int idx, const Term& g, double w, const std::vector<SelDraw>& hd,
                      const std::vector<SelDraw>& od) {
                    auto it = tr.beta[t].find(g);
                    if (it == tr.beta[t].end() || it->second == 0.0) return;
                    record(idx, a * w * it->second / div, hd, od);
                  });
    }
  }

  into.log_likelihood += fr.log_likelihood;
  into.sequences_used += 1;
}

Model reestimate(const Model& m, const ExpectedCounts& counts, double pseudocount,
                 std::vector<std::string>* warnings) {
  if (!m.validated) throw ModelError("re-estimation requires a validated model");
  if (counts.xi.size() != m.transitions.size())
    throw ModelError("counts do not match the model's transitions");
  Model out = m;

  for (size_t c = 0; c < out.classes.size(); ++c) {
    double denom = 0.0;
    for (int i : out.classes[c]) denom += pseudocount + counts.xi[i];
    if (denom <= 0.0) {
      if (warnings)
        warnings->push_back("no evidence for transitions from body '" +
                            to_string(out.class_body[c]) + "'; parameters kept");
      continue;
    }
    for (int i : out.classes[c])
      out.transitions[i].p = (pseudocount + counts.xi[i]) / denom;
  }

  // Selection categoricals: rewrite or append one declaration per updated
  // position, entries in domain order.
  for (const auto& [key, cnt] : counts.sel) {
    double denom = 0.0;
    for (double v : cnt) denom += pseudocount + v;
    if (denom <= 0.0) {
      if (warnings)
        warnings->push_back("no evidence for selection " + to_string(key) +
                            "; parameters kept");
      continue;
    }
    const std::string& type = out.sigma.predicates.at(key.pred)[key.arg - 1];
    const auto& dom = out.sigma.domain(type);
    std::vector<std::pair<std::string, double>> entries;
    entries.reserve(dom.size());
    for (size_t i = 0; i < dom.size(); ++i)
      entries.emplace_back(dom[i], (pseudocount + cnt[i]) / denom);
    auto decl = std::find_if(out.selection_decls.begin(), out.selection_decls.end(),
                             [&key](const SelectionDecl& d) { return d.key == key; });
    if (decl != out.selection_decls.end()) {
      decl->entries = std::move(entries);
    } else {
      out.selection_decls.push_back(SelectionDecl{key, std::move(entries), 0});
    }
  }

  std::string err = refresh_parameters(out);
  if (!err.empty()) throw ModelError("re-estimation produced an invalid model: " + err);
  return out;
}

namespace {

// One E step over the corpus.  Each sequence accumulates into its own counts
// object and the per-sequence results are merged in corpus order, so the
// totals are bit-identical no matter how many threads computed them.
ExpectedCounts e_step(const Model& m, const std::vector<std::vector<Term>>& corpus,
                      const TrainOptions& opt, std::set<size_t>& warned,
                      std::vector<std::string>& warnings) {
  int jobs = std::max(1, opt.jobs);
  jobs = std::min<int>(jobs, std::max<size_t>(corpus.size(), 1));
  std::vector<ExpectedCounts> per_seq(corpus.size());
  std::vector<char> dead(corpus.size(), 0);
  std::vector<std::string> failures(jobs);

  auto run_block = [&](int k, size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      per_seq[i] = zero_counts(m);
      try {
        accumulate_counts(m, corpus[i], opt.mode, per_seq[i]);
      } catch (const ZeroLikelihoodError&) {
        if (opt.error_on_zero) {
          failures[k] = "sequence " + std::to_string(i + 1) + " has zero likelihood";
          return;
        }
        dead[i] = 1;
      }
    }
  };

  if (jobs == 1) {
    run_block(0, 0, corpus.size());
  } else {
    std::vector<std::thread> threads;
    size_t chunk = (corpus.size() + jobs - 1) / jobs;
    for (int k = 0; k < jobs; ++k) {
      size_t begin = std::min(corpus.size(), k * chunk);
      size_t end = std::min(corpus.size(), begin + chunk);
      threads.emplace_back(run_block, k, begin, end);
    }
    for (auto& th : threads) th.join();
  }

  for (const std::string& f : failures)
    if (!f.empty()) throw ZeroLikelihoodError(f);

  ExpectedCounts total = zero_counts(m);
  for (size_t i = 0; i < corpus.size(); ++i) {
    if (dead[i]) {
      total.sequences_skipped += 1;
      if (warned.insert(i).second)
        warnings.push_back("sequence " + std::to_string(i + 1) +
                           " has zero likelihood; skipped");
    } else {
      total.merge(per_seq[i]);
    }
  }
  return total;
}

}  // namespace

TrainResult train(const Model& m, const std::vector<std::vector<Term>>& corpus,
                  const TrainOptions& options) {
  if (!m.validated) throw ModelError("training requires a validated model");
  if (corpus.empty()) throw ModelError("training corpus is empty");

  TrainResult res;
  res.model = m;
  std::set<size_t> warned;
  double prev = -std::numeric_limits<double>::infinity();
  while (true) {
    ExpectedCounts counts = e_step(res.model, corpus, options, warned, res.warnings);
    if (counts.sequences_used == 0)
      throw ZeroLikelihoodError("every training sequence has zero likelihood");
    double ll = counts.log_likelihood;
    res.log_likelihood_trace.push_back(ll);
    if (res.iterations > 0 && ll - prev < options.tolerance) break;
    if (res.iterations >= options.max_iterations) break;
    res.model = reestimate(res.model, counts, options.pseudocount, &res.warnings);
    res.iterations += 1;
    prev = ll;
  }
  return res;
}

}  // namespace lohmm
