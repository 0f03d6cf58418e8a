#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lohmm {

enum class TermKind : std::uint8_t { Variable, Constant, Compound };

// A first-order logical term.  Atoms (a predicate symbol applied to argument
// terms) use the same representation with kind Compound; whether a symbol
// names a predicate or a functor is positional and tracked by the Alphabet.
//
// Variable identity is the pair (name, scope).  Everything produced by the
// parser lives in scope 0; rename_apart (subst.hpp) moves a clause into a
// fresh scope so that variables from different clauses can never collide.
struct Term {
  TermKind kind = TermKind::Constant;
  std::string name;
  int scope = 0;            // variables only; 0 elsewhere
  std::vector<Term> args;   // compounds only

  static Term var(std::string name, int scope = 0);
  static Term constant(std::string name);
  static Term compound(std::string name, std::vector<Term> args);
  // An atom is a compound whose symbol is a predicate; arity 0 is allowed.
  static Term atom(std::string predicate, std::vector<Term> args = {});

  bool is_var() const { return kind == TermKind::Variable; }
  bool is_constant() const { return kind == TermKind::Constant; }
  bool is_compound() const { return kind == TermKind::Compound; }
  int arity() const { return static_cast<int>(args.size()); }
  bool is_ground() const;

  bool operator==(const Term& other) const;
  bool operator!=(const Term& other) const { return !(*this == other); }
  // Structural order (kind, name, scope, arguments).  This is a total order
  // suitable for generic containers; the alphabet-aware canonical order used
  // for semantics lives in alphabet.hpp.
  bool operator<(const Term& other) const;
};

// Identity of a variable, used as the key type of substitutions.
struct VarRef {
  std::string name;
  int scope = 0;

  bool operator==(const VarRef& other) const {
    return scope == other.scope && name == other.name;
  }
  bool operator<(const VarRef& other) const {
    if (name != other.name) return name < other.name;
    return scope < other.scope;
  }
};

// Appends the distinct variables of `t` to `out` in order of first occurrence
// (pre-order, left to right).
void collect_vars(const Term& t, std::vector<VarRef>& out);
std::vector<VarRef> vars_of(const Term& t);
bool occurs(const VarRef& v, const Term& t);

// Plain structural rendering.  Lists built from cons/nil print in bracket
// sugar ([a, b | T]); variables whose generated name starts with '_' print
// as the anonymous variable "_".
std::string to_string(const Term& t);
std::ostream& operator<<(std::ostream& os, const Term& t);

inline const char* kConsFunctor = "cons";
inline const char* kNilConstant = "nil";

}  // namespace lohmm
