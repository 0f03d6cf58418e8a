#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "lohmm/model.hpp"

namespace lohmm {

// Deterministic random source.  Uniform doubles take the top 53 bits of an
// mt19937_64 draw, so streams are bit-identical across standard libraries
// (std::uniform_real_distribution makes no such guarantee).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }
  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  // Uniform in {0, ..., n-1}.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(gen_()) * n) >> 64);
  }

 private:
  std::mt19937_64 gen_;
};

struct SampleResult {
  std::vector<Term> states;        // ground states q_0..q_T
  std::vector<Term> observations;  // O_1..O_T
};

// Generative walk of exactly `length` emissions.  Throws ModelError when the
// walk hits a dead state (including early absorption into `end`); the
// message reports the partial sequence.
SampleResult sample_fixed(const Model& m, int length, Rng& rng);

// Generative walk until the `end` state is reached, capped to guard against
// non-terminating models.
SampleResult sample_until_end(const Model& m, Rng& rng, int cap = 10000);

// Level-wise reachability: states[0] = {start}, states[i] applies every
// transition (no conflict resolution) to every state of states[i-1], and
// observations[i-1] collects everything emittable from states[i-1].  Sets
// are canonically sorted.  Throws ModelError if a layer exceeds `state_cap`
// or an atom cannot be finitely grounded.
struct ReachableSets {
  std::vector<std::vector<Term>> states;        // horizon+1 layers
  std::vector<std::vector<Term>> observations;  // horizon layers
};
ReachableSets reachable_sets(const Model& m, int horizon,
                             std::size_t state_cap = 1000000);

}  // namespace lohmm
