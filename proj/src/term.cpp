#include "lohmm/term.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

namespace lohmm {

Term Term::var(std::string name, int scope) {
  Term t;
  t.kind = TermKind::Variable;
  t.name = std::move(name);
  t.scope = scope;
  return t;
}

Term Term::constant(std::string name) {
  Term t;
  t.kind = TermKind::Constant;
  t.name = std::move(name);
  return t;
}

Term Term::compound(std::string name, std::vector<Term> args) {
  Term t;
  t.kind = TermKind::Compound;
  t.name = std::move(name);
  t.args = std::move(args);
  return t;
}

Term Term::atom(std::string predicate, std::vector<Term> args) {
  return compound(std::move(predicate), std::move(args));
}

bool Term::is_ground() const {
  if (kind == TermKind::Variable) return false;
  for (const Term& a : args)
    if (!a.is_ground()) return false;
  return true;
}

bool Term::operator==(const Term& other) const {
  if (kind != other.kind || name != other.name) return false;
  if (kind == TermKind::Variable) return scope == other.scope;
  return args == other.args;
}

bool Term::operator<(const Term& other) const {
  if (kind != other.kind) return kind < other.kind;
  if (name != other.name) return name < other.name;
  if (kind == TermKind::Variable) return scope < other.scope;
  return args < other.args;
}

void collect_vars(const Term& t, std::vector<VarRef>& out) {
  if (t.is_var()) {
    VarRef v{t.name, t.scope};
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    return;
  }
  for (const Term& a : t.args) collect_vars(a, out);
}

std::vector<VarRef> vars_of(const Term& t) {
  std::vector<VarRef> out;
  collect_vars(t, out);
  return out;
}

bool occurs(const VarRef& v, const Term& t) {
  if (t.is_var()) return t.name == v.name && t.scope == v.scope;
  for (const Term& a : t.args)
    if (occurs(v, a)) return true;
  return false;
}

namespace {

// Writes a cons/nil chain in list sugar: [a, b] or [a | T].
void print_list(std::ostream& os, const Term& t);

void print_term(std::ostream& os, const Term& t) {
  switch (t.kind) {
    case TermKind::Variable:
      if (!t.name.empty() && t.name[0] == '_')
        os << '_';
      else
        os << t.name;
      return;
    case TermKind::Constant:
      os << t.name;
      return;
    case TermKind::Compound:
      if (t.name == kConsFunctor && t.arity() == 2) {
        print_list(os, t);
        return;
      }
      os << t.name;
      if (!t.args.empty()) {
        os << '(';
        for (size_t i = 0; i < t.args.size(); ++i) {
          if (i) os << ", ";
          print_term(os, t.args[i]);
        }
        os << ')';
      }
      return;
  }
}

void print_list(std::ostream& os, const Term& t) {
  os << '[';
  const Term* cur = &t;
  bool first = true;
  while (cur->is_compound() && cur->name == kConsFunctor && cur->arity() == 2) {
    if (!first) os << ", ";
    print_term(os, cur->args[0]);
    first = false;
    cur = &cur->args[1];
  }
  if (!(cur->is_constant() && cur->name == kNilConstant)) {
    os << " | ";
    print_term(os, *cur);
  }
  os << ']';
}

}  // namespace

std::string to_string(const Term& t) {
  std::ostringstream os;
  print_term(os, t);
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Term& t) {
  print_term(os, t);
  return os;
}

}  // namespace lohmm
