#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lohmm/subst.hpp"
#include "lohmm/term.hpp"

namespace lohmm {

// Predicate or functor identity: name plus arity.
struct SymbolKey {
  std::string name;
  int arity = 0;

  bool operator==(const SymbolKey& o) const {
    return arity == o.arity && name == o.name;
  }
  bool operator<(const SymbolKey& o) const {
    if (name != o.name) return name < o.name;
    return arity < o.arity;
  }
};

std::string to_string(const SymbolKey& k);

struct TypeInfo {
  std::vector<std::string> constants;  // declaration order; empty if !has_domain
  bool has_domain = false;             // false: functor-built type, no constants
  bool identifier = false;
};

struct FunctorSig {
  std::vector<std::string> arg_types;
  std::string result_type;
};

// The symbol table of a model: typed constant domains, predicate and functor
// signatures, and the identifier flags.  Also the source of the canonical
// term order used everywhere determinism matters.
struct Alphabet {
  std::vector<std::string> type_order;           // declaration order
  std::map<std::string, TypeInfo> types;
  std::vector<SymbolKey> predicate_order;
  std::map<SymbolKey, std::vector<std::string>> predicates;  // argument types
  std::vector<SymbolKey> functor_order;
  std::map<SymbolKey, FunctorSig> functors;

  // Constant name -> global declaration index (first domain mention wins).
  std::map<std::string, int> constant_index;
  // Constant name -> types whose domain contains it.
  std::map<std::string, std::vector<std::string>> constant_types;

  bool has_type(const std::string& t) const { return types.count(t) > 0; }
  bool is_identifier_type(const std::string& t) const;
  // A type admits enumeration iff it has a declared constant domain and no
  // functor produces values of it (otherwise its term universe is open).
  bool is_open_type(const std::string& t) const;
  bool type_is_enumerable(const std::string& t) const;
  const std::vector<std::string>& domain(const std::string& t) const;
  bool constant_in_type(const std::string& c, const std::string& t) const;
  // Index of constant `c` inside domain(t), or -1.
  int domain_index(const std::string& t, const std::string& c) const;

  // Registration helpers used by the parser and the compilers.  Each returns
  // an error message ("" on success) instead of throwing so that callers can
  // attach line information.
  std::string add_domain(const std::string& type, std::vector<std::string> constants,
                         bool has_domain);
  std::string add_identifier(const std::string& type);
  std::string add_predicate(const std::string& name, std::vector<std::string> arg_types);
  std::string add_functor(const std::string& name, std::vector<std::string> arg_types,
                          const std::string& result_type);
};

// Canonical order over terms, total for any mix of ground and abstract terms:
// constants sort before compounds before variables; constants compare by
// (domain declaration index, name) with undeclared constants last; compounds
// by (functor, arity, arguments lexicographically); variables by (name,
// scope).  Deterministic across runs for a fixed model file.
class TermOrder {
 public:
  TermOrder() : sigma_(nullptr) {}
  explicit TermOrder(const Alphabet& sigma) : sigma_(&sigma) {}

  bool operator()(const Term& a, const Term& b) const { return compare(a, b) < 0; }
  int compare(const Term& a, const Term& b) const;

 private:
  const Alphabet* sigma_;
};

// Checks `t` against an expected type, recording (and checking) the type of
// each variable at its first occurrence.  Returns an error message or "".
std::string typecheck_term(const Term& t, const std::string& expected_type,
                           const Alphabet& sigma,
                           std::map<VarRef, std::string>& var_types);

// Checks an atom against its predicate signature (start/end are arity-0 and
// always admissible).  Returns an error message or "".
std::string typecheck_atom(const Term& atom, const Alphabet& sigma,
                           std::map<VarRef, std::string>& var_types);

// The distinct variables of `atom` in first-occurrence order, with the types
// the signature assigns them.  Throws ModelError if the atom does not check.
std::vector<std::pair<VarRef, std::string>> typed_vars(const Term& atom,
                                                       const Alphabet& sigma);

// Calls `fn` once per type-respecting grounding of the variables of `atom`.
// Variables are ordered by first occurrence; each ranges over its type's
// domain in declaration order; the last variable varies fastest.  Throws
// ModelError if some variable's type is not enumerable.
void for_each_grounding(const Term& atom, const Alphabet& sigma,
                        const std::function<void(const Term&, const Substitution&)>& fn);

// Materialized groundings of `atom` in enumeration order.
std::vector<Term> ground_instances(const Term& atom, const Alphabet& sigma);

}  // namespace lohmm
