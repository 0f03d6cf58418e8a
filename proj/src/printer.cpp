#include "lohmm/printer.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

namespace lohmm {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string format_sig9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return std::string(buf);
}

namespace {

void print_declarations(std::ostringstream& os, const Alphabet& sigma,
                        const std::vector<SelectionDecl>& decls) {
  for (const std::string& t : sigma.type_order) {
    const TypeInfo& info = sigma.types.at(t);
    os << "domain " << t;
    if (info.has_domain) {
      os << " = { ";
      for (size_t i = 0; i < info.constants.size(); ++i) {
        if (i) os << ", ";
        os << info.constants[i];
      }
      os << " }";
    }
    os << ".\n";
  }
  for (const std::string& t : sigma.type_order)
    if (sigma.types.at(t).identifier) os << "identifier " << t << ".\n";
  for (const SymbolKey& k : sigma.functor_order) {
    const FunctorSig& sig = sigma.functors.at(k);
    os << "functor " << k.name << "(";
    for (size_t i = 0; i < sig.arg_types.size(); ++i) {
      if (i) os << ", ";
      os << sig.arg_types[i];
    }
    os << ") : " << sig.result_type << ".\n";
  }
  for (const SymbolKey& k : sigma.predicate_order) {
    const std::vector<std::string>& args = sigma.predicates.at(k);
    os << "predicate " << k.name;
    if (!args.empty()) {
      os << "(";
      for (size_t i = 0; i < args.size(); ++i) {
        if (i) os << ", ";
        os << args[i];
      }
      os << ")";
    }
    os << ".\n";
  }
  for (const SelectionDecl& d : decls) {
    os << "selection " << d.key.pred.name << "/" << d.key.pred.arity << " arg "
       << d.key.arg << " { ";
    for (size_t i = 0; i < d.entries.size(); ++i) {
      if (i) os << ", ";
      os << d.entries[i].first << ": " << format_double(d.entries[i].second);
    }
    os << " }.\n";
  }
}

void print_transition(std::ostringstream& os, const AbstractTransition& tr) {
  os << format_double(tr.p) << " : " << to_string(tr.head) << " <- "
     << to_string(tr.body);
  if (tr.obs) os << " emits " << to_string(*tr.obs);
  os << ".\n";
}

}  // namespace

std::string print_model(const Model& m) {
  std::ostringstream os;
  print_declarations(os, m.sigma, m.selection_decls);
  for (const AbstractTransition& tr : m.transitions) print_transition(os, tr);
  return os.str();
}

std::string print_moore_model(const MooreModel& m) {
  std::ostringstream os;
  os << "moore.\n";
  print_declarations(os, m.sigma, m.selection_decls);
  for (const AbstractTransition& tr : m.transitions) print_transition(os, tr);
  for (const AbstractEmission& em : m.emissions)
    os << "emission " << to_string(em.obs) << " <- " << to_string(em.state) << ".\n";
  return os.str();
}

std::string print_sequence(const std::vector<Term>& obs) {
  std::ostringstream os;
  for (size_t i = 0; i < obs.size(); ++i) {
    if (i) os << ", ";
    os << to_string(obs[i]);
  }
  os << ".";
  return os.str();
}

std::string print_pcfg(const Pcfg& g) {
  std::ostringstream os;
  os << "start " << g.start << ".\n";
  for (const Production& prod : g.productions) {
    os << format_double(prod.p) << " : " << prod.lhs << " ->";
    for (const std::string& s : prod.rhs) os << " " << s;
    os << ".\n";
  }
  return os.str();
}

}  // namespace lohmm
