#include "lohmm/subst.hpp"

#include <utility>
#include <vector>

namespace lohmm {

Term apply(const Term& t, const Substitution& s) {
  if (t.is_var()) {
    if (const Term* image = s.lookup(VarRef{t.name, t.scope})) return *image;
    return t;
  }
  if (t.is_constant()) return t;
  Term out = t;
  for (Term& a : out.args) a = apply(a, s);
  return out;
}

namespace {

// Replaces `v` by `image` inside every stored image, keeping unifier images
// fully resolved so that a single application pass is complete.
void rewrite_images(Substitution& s, const VarRef& v, const Term& image) {
  Substitution one;
  one.map.emplace(v, image);
  for (auto& [key, img] : s.map) img = apply(img, one);
}

}  // namespace

std::optional<Substitution> mgu(const Term& a, const Term& b) {
  Substitution s;
  std::vector<std::pair<Term, Term>> work{{a, b}};
  while (!work.empty()) {
    auto [x, y] = std::move(work.back());
    work.pop_back();
    x = apply(x, s);
    y = apply(y, s);
    if (x == y) continue;
    if (x.is_var() || y.is_var()) {
      if (!x.is_var()) std::swap(x, y);
      VarRef v{x.name, x.scope};
      if (occurs(v, y)) return std::nullopt;
      rewrite_images(s, v, y);
      s.map.emplace(std::move(v), std::move(y));
      continue;
    }
    if (x.kind != y.kind || x.name != y.name || x.arity() != y.arity())
      return std::nullopt;
    for (int i = 0; i < x.arity(); ++i)
      work.emplace_back(x.args[i], y.args[i]);
  }
  return s;
}

namespace {

// Bindings are recorded even when they are identities so that a repeated
// variable on the general side is checked for consistency (p(X, X) must not
// match p(X, Y)); identities are stripped from the returned substitution.
// There is deliberately no occurs check: the specific side is frozen, so a
// binding like Y -> s(Y) relates two distinct variables that merely share a
// name, and the single-pass apply() handles it correctly.
bool match_into(const Term& general, const Term& specific,
                std::map<VarRef, Term>& bindings) {
  if (general.is_var()) {
    VarRef v{general.name, general.scope};
    if (auto it = bindings.find(v); it != bindings.end())
      return it->second == specific;
    bindings.emplace(std::move(v), specific);
    return true;
  }
  if (general.kind != specific.kind || general.name != specific.name)
    return false;
  if (general.is_constant()) return true;
  if (general.arity() != specific.arity()) return false;
  for (int i = 0; i < general.arity(); ++i)
    if (!match_into(general.args[i], specific.args[i], bindings)) return false;
  return true;
}

}  // namespace

std::optional<Substitution> match(const Term& general, const Term& specific) {
  std::map<VarRef, Term> bindings;
  if (!match_into(general, specific, bindings)) return std::nullopt;
  Substitution s;
  for (auto& [v, t] : bindings) {
    if (t.is_var() && VarRef{t.name, t.scope} == v) continue;
    s.map.emplace(v, std::move(t));
  }
  return s;
}

bool is_variant(const Term& a, const Term& b) {
  return match(a, b).has_value() && match(b, a).has_value();
}

Term rename_apart(const Term& t, int scope) {
  if (t.is_var()) {
    Term out = t;
    out.scope = scope;
    return out;
  }
  if (t.is_constant()) return t;
  Term out = t;
  for (Term& a : out.args) a = rename_apart(a, scope);
  return out;
}

Substitution compose(const Substitution& s, const Substitution& g) {
  Substitution out;
  for (const auto& [v, image] : s.map) {
    Term t = apply(image, g);
    if (t.is_var() && VarRef{t.name, t.scope} == v) continue;
    out.map.emplace(v, std::move(t));
  }
  for (const auto& [v, image] : g.map)
    if (!s.map.count(v)) out.map.emplace(v, image);
  return out;
}

}  // namespace lohmm
