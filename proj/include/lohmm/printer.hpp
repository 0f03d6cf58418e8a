#pragma once

#include <string>
#include <vector>

#include "lohmm/model.hpp"
#include "lohmm/moore.hpp"
#include "lohmm/pcfg.hpp"

namespace lohmm {

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double v);

/// Nine significant digits, for human-facing numeric output.
std::string format_sig9(double v);

/// Renders a model in the text format understood by parse_model.  The output
/// is deterministic and round-trips: parsing it yields a structurally equal
/// model with bit-identical probabilities.
std::string print_model(const Model& m);

/// Renders a Moore-form model (with the `moore.` directive and emission
/// clauses) for parse_moore_model.
std::string print_moore_model(const MooreModel& m);

/// Renders one observation sequence: comma-separated atoms, closing `.`.
std::string print_sequence(const std::vector<Term>& obs);

/// Renders a grammar for parse_pcfg; deterministic and round-tripping.
std::string print_pcfg(const Pcfg& g);

}  // namespace lohmm
