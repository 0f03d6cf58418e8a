#pragma once

#include <string>
#include <vector>

#include "lohmm/model.hpp"

namespace lohmm {

struct Production {
  double p = 0.0;
  std::string lhs;                // nonterminal
  std::vector<std::string> rhs;   // symbols, leftmost first
  int line = 0;
};

// A probabilistic context-free grammar.  Nonterminals are uppercase-initial
// symbols, terminals lowercase-initial; both lists are kept in first-
// appearance order.
struct Pcfg {
  std::string start;
  std::vector<std::string> nonterminals;
  std::vector<std::string> terminals;
  std::vector<Production> productions;
};

// Checks that the start symbol is set and produced, every nonterminal has
// productions, and the probabilities of each nonterminal's productions sum
// to one within 1e-9.
ValidationReport validate_pcfg(const Pcfg& g);

// Greibach normal form: every right-hand side is one terminal followed by
// zero or more nonterminals.
bool is_gnf(const Pcfg& g);

// Encodes a GNF grammar as an equivalent model over an explicit stack of
// nonterminal symbols: nonterminal X becomes the constant nx of type ntsym,
// stacks are cons/nil lists, each production pops its nonterminal and pushes
// its right-hand side while emitting the terminal, and the empty stack takes
// the end transition.  Throws ModelError if the grammar is not in GNF or the
// generated names collide.
Model pcfg_to_lohmm(const Pcfg& g);

struct StringProbability {
  double probability = 0.0;
  // True when the derivation search was cut off by the step bound while
  // unexplored mass remained, so `probability` is only a lower bound.
  bool truncated = false;
};

// Total probability of the grammar deriving exactly `word`, by exhaustive
// leftmost derivation with pruning.  Exact for GNF grammars; for general
// grammars max_steps bounds the number of production applications per
// derivation (0 picks a default from the word length).
StringProbability pcfg_string_prob(const Pcfg& g, const std::vector<std::string>& word,
                                   int max_steps = 0);

}  // namespace lohmm
