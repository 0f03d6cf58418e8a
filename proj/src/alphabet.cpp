#include "lohmm/alphabet.hpp"

#include <algorithm>
#include <limits>

#include "lohmm/error.hpp"

namespace lohmm {

std::string to_string(const SymbolKey& k) {
  return k.name + "/" + std::to_string(k.arity);
}

bool Alphabet::is_identifier_type(const std::string& t) const {
  auto it = types.find(t);
  return it != types.end() && it->second.identifier;
}

bool Alphabet::is_open_type(const std::string& t) const {
  for (const auto& [key, sig] : functors)
    if (sig.result_type == t) return true;
  return false;
}

bool Alphabet::type_is_enumerable(const std::string& t) const {
  auto it = types.find(t);
  if (it == types.end() || !it->second.has_domain) return false;
  return !is_open_type(t);
}

const std::vector<std::string>& Alphabet::domain(const std::string& t) const {
  static const std::vector<std::string> kEmpty;
  auto it = types.find(t);
  return it == types.end() ? kEmpty : it->second.constants;
}

bool Alphabet::constant_in_type(const std::string& c, const std::string& t) const {
  auto it = constant_types.find(c);
  if (it == constant_types.end()) return false;
  return std::find(it->second.begin(), it->second.end(), t) != it->second.end();
}

int Alphabet::domain_index(const std::string& t, const std::string& c) const {
  const auto& dom = domain(t);
  auto it = std::find(dom.begin(), dom.end(), c);
  return it == dom.end() ? -1 : static_cast<int>(it - dom.begin());
}

std::string Alphabet::add_domain(const std::string& type,
                                 std::vector<std::string> constants,
                                 bool has_domain) {
  if (types.count(type)) return "type '" + type + "' declared twice";
  if (has_domain && constants.empty())
    return "domain of type '" + type + "' must not be empty";
  std::set<std::string> seen;
  for (const std::string& c : constants) {
    if (!seen.insert(c).second)
      return "constant '" + c + "' listed twice in domain of '" + type + "'";
  }
  TypeInfo info;
  info.constants = std::move(constants);
  info.has_domain = has_domain;
  types.emplace(type, std::move(info));
  type_order.push_back(type);
  for (const std::string& c : types[type].constants) {
    constant_index.emplace(c, static_cast<int>(constant_index.size()));
    constant_types[c].push_back(type);
  }
  return "";
}

std::string Alphabet::add_identifier(const std::string& type) {
  auto it = types.find(type);
  if (it == types.end()) return "identifier declaration for unknown type '" + type + "'";
  if (it->second.identifier) return "type '" + type + "' flagged identifier twice";
  it->second.identifier = true;
  return "";
}

std::string Alphabet::add_predicate(const std::string& name,
                                    std::vector<std::string> arg_types) {
  if (name == "start" || name == "end")
    return "'" + name + "' is reserved and cannot be declared";
  SymbolKey key{name, static_cast<int>(arg_types.size())};
  if (predicates.count(key))
    return "predicate " + to_string(key) + " declared twice";
  for (const std::string& t : arg_types)
    if (!has_type(t))
      return "predicate " + to_string(key) + " references unknown type '" + t + "'";
  predicate_order.push_back(key);
  predicates.emplace(std::move(key), std::move(arg_types));
  return "";
}

std::string Alphabet::add_functor(const std::string& name,
                                  std::vector<std::string> arg_types,
                                  const std::string& result_type) {
  SymbolKey key{name, static_cast<int>(arg_types.size())};
  if (key.arity == 0) return "functor " + to_string(key) + " must have arity >= 1";
  if (functors.count(key)) return "functor " + to_string(key) + " declared twice";
  for (const std::string& t : arg_types)
    if (!has_type(t))
      return "functor " + to_string(key) + " references unknown type '" + t + "'";
  if (!has_type(result_type))
    return "functor " + to_string(key) + " has unknown result type '" + result_type + "'";
  functor_order.push_back(key);
  functors.emplace(std::move(key), FunctorSig{std::move(arg_types), result_type});
  return "";
}

int TermOrder::compare(const Term& a, const Term& b) const {
  auto rank = [](TermKind k) {
    switch (k) {
      case TermKind::Constant: return 0;
      case TermKind::Compound: return 1;
      case TermKind::Variable: return 2;
    }
    return 3;
  };
  if (rank(a.kind) != rank(b.kind)) return rank(a.kind) < rank(b.kind) ? -1 : 1;
  switch (a.kind) {
    case TermKind::Constant: {
      int ia = std::numeric_limits<int>::max();
      int ib = ia;
      if (sigma_) {
        if (auto it = sigma_->constant_index.find(a.name); it != sigma_->constant_index.end())
          ia = it->second;
        if (auto it = sigma_->constant_index.find(b.name); it != sigma_->constant_index.end())
          ib = it->second;
      }
      if (ia != ib) return ia < ib ? -1 : 1;
      return a.name.compare(b.name) < 0 ? -1 : (a.name == b.name ? 0 : 1);
    }
    case TermKind::Compound: {
      if (int c = a.name.compare(b.name); c != 0) return c < 0 ? -1 : 1;
      if (a.arity() != b.arity()) return a.arity() < b.arity() ? -1 : 1;
      for (int i = 0; i < a.arity(); ++i)
        if (int c = compare(a.args[i], b.args[i]); c != 0) return c;
      return 0;
    }
    case TermKind::Variable: {
      if (int c = a.name.compare(b.name); c != 0) return c < 0 ? -1 : 1;
      if (a.scope != b.scope) return a.scope < b.scope ? -1 : 1;
      return 0;
    }
  }
  return 0;
}

std::string typecheck_term(const Term& t, const std::string& expected_type,
                           const Alphabet& sigma,
                           std::map<VarRef, std::string>& var_types) {
  switch (t.kind) {
    case TermKind::Variable: {
      VarRef v{t.name, t.scope};
      auto [it, inserted] = var_types.emplace(v, expected_type);
      if (!inserted && it->second != expected_type)
        return "variable " + t.name + " used at type '" + expected_type +
               "' after type '" + it->second + "'";
      return "";
    }
    case TermKind::Constant: {
      if (t.name == "#") return "";  // placeholder: admissible at every type
      if (!sigma.constant_in_type(t.name, expected_type))
        return "constant '" + t.name + "' is not in the domain of type '" +
               expected_type + "'";
      return "";
    }
    case TermKind::Compound: {
      SymbolKey key{t.name, t.arity()};
      auto it = sigma.functors.find(key);
      if (it == sigma.functors.end())
        return "unknown functor " + to_string(key);
      if (it->second.result_type != expected_type)
        return "functor " + to_string(key) + " produces type '" +
               it->second.result_type + "' where '" + expected_type + "' is required";
      for (int i = 0; i < t.arity(); ++i) {
        std::string err = typecheck_term(t.args[i], it->second.arg_types[i], sigma, var_types);
        if (!err.empty()) return err;
      }
      return "";
    }
  }
  return "";
}

std::string typecheck_atom(const Term& atom, const Alphabet& sigma,
                           std::map<VarRef, std::string>& var_types) {
  if (!atom.is_compound())
    return "expected an atom, got '" + to_string(atom) + "'";
  if ((atom.name == "start" || atom.name == "end") && atom.arity() == 0) return "";
  SymbolKey key{atom.name, atom.arity()};
  auto it = sigma.predicates.find(key);
  if (it == sigma.predicates.end())
    return "unknown predicate " + to_string(key);
  for (int i = 0; i < atom.arity(); ++i) {
    std::string err = typecheck_term(atom.args[i], it->second[i], sigma, var_types);
    if (!err.empty()) return err;
  }
  return "";
}

std::vector<std::pair<VarRef, std::string>> typed_vars(const Term& atom,
                                                       const Alphabet& sigma) {
  std::map<VarRef, std::string> var_types;
  std::string err = typecheck_atom(atom, sigma, var_types);
  if (!err.empty()) throw ModelError("atom '" + to_string(atom) + "': " + err);
  std::vector<std::pair<VarRef, std::string>> out;
  for (const VarRef& v : vars_of(atom)) out.emplace_back(v, var_types.at(v));
  return out;
}

void for_each_grounding(const Term& atom, const Alphabet& sigma,
                        const std::function<void(const Term&, const Substitution&)>& fn) {
  auto tv = typed_vars(atom, sigma);
  for (const auto& [v, type] : tv) {
    if (!sigma.type_is_enumerable(type))
      throw ModelError("cannot enumerate groundings of '" + to_string(atom) +
                       "': type '" + type + "' of variable " + v.name +
                       " is not a finite constant domain");
  }
  const size_t n = tv.size();
  if (n == 0) {
    fn(atom, Substitution{});
    return;
  }
  std::vector<const std::vector<std::string>*> domains(n);
  for (size_t i = 0; i < n; ++i) domains[i] = &sigma.domain(tv[i].second);
  std::vector<size_t> idx(n, 0);
  Substitution s;
  while (true) {
    s.map.clear();
    for (size_t i = 0; i < n; ++i)
      s.map.emplace(tv[i].first, Term::constant((*domains[i])[idx[i]]));
    fn(apply(atom, s), s);
    // Odometer step: last variable varies fastest.
    size_t i = n;
    while (i > 0) {
      --i;
      if (++idx[i] < domains[i]->size()) break;
      idx[i] = 0;
      if (i == 0) return;
    }
  }
}

std::vector<Term> ground_instances(const Term& atom, const Alphabet& sigma) {
  std::vector<Term> out;
  for_each_grounding(atom, sigma,
                     [&](const Term& g, const Substitution&) { out.push_back(g); });
  return out;
}

}  // namespace lohmm
