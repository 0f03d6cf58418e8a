#pragma once

#include <string>
#include <vector>

#include "lohmm/classify.hpp"
#include "lohmm/model.hpp"
#include "lohmm/moore.hpp"
#include "lohmm/pcfg.hpp"

namespace lohmm {

/// Parses a model file (declarations, selections, transitions).  The result
/// is fully constructed but NOT validated; run validate() next.  Throws
/// ParseError (with line numbers) on syntax errors, unknown or ill-typed
/// symbols, and duplicate declarations.
Model parse_model(const std::string& text);

/// Parses a Moore-form model file: same declarations, a `moore.` directive,
/// observation-free transitions, and `emission <obs> <- <state>.` clauses.
MooreModel parse_moore_model(const std::string& text);

/// True when the text contains a `moore.` directive statement, i.e. should go
/// through parse_moore_model.
bool is_moore_source(const std::string& text);

/// Parses a sequence file: one observation sequence per line, each a
/// comma-separated list of ground atoms terminated by `.`.  Purely syntactic
/// (atoms are checked against a model's alphabet at evaluation time), but
/// atoms must be ground.
std::vector<std::vector<Term>> parse_sequences(const std::string& text);

/// Parses a labeled corpus: one record per line, `<label>` and the sequence
/// separated by a single tab.
std::vector<LabeledSequence> parse_labeled_sequences(const std::string& text);

/// Parses a grammar file: a `start <NonTerminal>.` header followed by
/// productions `<p> : <NonTerminal> -> <symbol> <symbol> ... .`.
/// Nonterminals begin uppercase, terminals lowercase.
Pcfg parse_pcfg(const std::string& text);

}  // namespace lohmm
