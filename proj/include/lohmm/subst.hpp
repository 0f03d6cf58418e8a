#pragma once

#include <map>
#include <optional>

#include "lohmm/term.hpp"

namespace lohmm {

// A substitution maps variables to terms and is applied simultaneously in a
// single pass: each variable is replaced by its image, and images are not
// rewritten again.  Unifiers built by mgu() keep their images fully resolved,
// so a single pass equals full application and the result is idempotent.
// Matchers built by match() may be pure variable renamings (e.g. {F/G, G/F}
// when checking variants); those are applied simultaneously as well, and may
// map a variable to a term reusing its name (Y -> s(Y)) when two clauses
// happen to share variable names.  Identity bindings are never stored.
struct Substitution {
  std::map<VarRef, Term> map;

  bool empty() const { return map.empty(); }
  size_t size() const { return map.size(); }
  const Term* lookup(const VarRef& v) const {
    auto it = map.find(v);
    return it == map.end() ? nullptr : &it->second;
  }
};

// Single simultaneous pass of `s` over `t`.
Term apply(const Term& t, const Substitution& s);

// Most general unifier with occurs check; nullopt when none exists.
// The result is idempotent: applying it twice equals applying it once.
std::optional<Substitution> mgu(const Term& a, const Term& b);

// One-way matching: a substitution th binding only variables of `general`
// with apply(general, th) == specific, or nullopt.  Variables of `specific`
// are treated as frozen.  When it succeeds, general and specific unify.
std::optional<Substitution> match(const Term& general, const Term& specific);

// True when each term subsumes the other, i.e. they are equal up to a
// renaming of variables.
bool is_variant(const Term& a, const Term& b);

// Copy of `t` with every variable moved into `scope` (names preserved).
Term rename_apart(const Term& t, int scope);

// Composition: apply(t, compose(s, g)) == apply(apply(t, s), g) for all t,
// provided s and g have fully resolved images (as mgu/match produce).
Substitution compose(const Substitution& s, const Substitution& g);

// Source of fresh scopes for rename_apart.  Scope 0 is reserved for parsed
// clauses; counters start at 1.
class ScopeCounter {
 public:
  int fresh() { return next_++; }

 private:
  int next_ = 1;
};

}  // namespace lohmm
