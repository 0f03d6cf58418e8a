#include "lohmm/parser.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "lohmm/error.hpp"

namespace lohmm {

namespace {

enum class Tok {
  Name,      // lowercase-initial symbol, or '#'
  Var,       // uppercase- or underscore-initial symbol
  Number,
  Dot,
  Comma,
  Colon,
  Slash,
  Equals,
  Pipe,
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Arrow,     // <-
  RArrow,    // ->
  End,
};

struct Token {
  Tok kind;
  std::string text;
  double number = 0.0;
  int line = 1;
};

bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::vector<Token> lex(const std::string& text) {
  std::vector<Token> out;
  int line = 1;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '%') {
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j < n && text[j] == '.' && j + 1 < n &&
          std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
        ++j;
        while (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      }
      if (j < n && (text[j] == 'e' || text[j] == 'E')) {
        size_t k = j + 1;
        if (k < n && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < n && std::isdigit(static_cast<unsigned char>(text[k]))) {
          ++k;
          while (k < n && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
          j = k;
        }
      }
      std::string s = text.substr(i, j - i);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError("malformed number '" + s + "'", line);
      out.push_back({Tok::Number, std::move(s), v, line});
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < n && name_char(text[j])) ++j;
      std::string s = text.substr(i, j - i);
      Tok kind = (std::isupper(static_cast<unsigned char>(c)) || c == '_')
                     ? Tok::Var
                     : Tok::Name;
      out.push_back({kind, std::move(s), 0.0, line});
      i = j;
      continue;
    }
    switch (c) {
      case '#': out.push_back({Tok::Name, "#", 0.0, line}); ++i; continue;
      case '.': out.push_back({Tok::Dot, ".", 0.0, line}); ++i; continue;
      case ',': out.push_back({Tok::Comma, ",", 0.0, line}); ++i; continue;
      case ':': out.push_back({Tok::Colon, ":", 0.0, line}); ++i; continue;
      case '/': out.push_back({Tok::Slash, "/", 0.0, line}); ++i; continue;
      case '=': out.push_back({Tok::Equals, "=", 0.0, line}); ++i; continue;
      case '|': out.push_back({Tok::Pipe, "|", 0.0, line}); ++i; continue;
      case '(': out.push_back({Tok::LParen, "(", 0.0, line}); ++i; continue;
      case ')': out.push_back({Tok::RParen, ")", 0.0, line}); ++i; continue;
      case '{': out.push_back({Tok::LBrace, "{", 0.0, line}); ++i; continue;
      case '}': out.push_back({Tok::RBrace, "}", 0.0, line}); ++i; continue;
      case '[': out.push_back({Tok::LBracket, "[", 0.0, line}); ++i; continue;
      case ']': out.push_back({Tok::RBracket, "]", 0.0, line}); ++i; continue;
      case '<':
        if (i + 1 < n && text[i + 1] == '-') {
          out.push_back({Tok::Arrow, "<-", 0.0, line});
          i += 2;
          continue;
        }
        throw ParseError("stray '<'", line);
      case '-':
        if (i + 1 < n && text[i + 1] == '>') {
          out.push_back({Tok::RArrow, "->", 0.0, line});
          i += 2;
          continue;
        }
        throw ParseError("stray '-'", line);
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", line);
    }
  }
  out.push_back({Tok::End, "", 0.0, line});
  return out;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(lex(text)) {}

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_name(const char* word) const {
    return peek().kind == Tok::Name && peek().text == word;
  }

  Token expect(Tok k, const char* what) {
    if (!at(k))
      throw ParseError(std::string("expected ") + what + ", found " +
                           describe(peek()),
                       peek().line);
    return next();
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, peek().line);
  }

  static std::string describe(const Token& t) {
    if (t.kind == Tok::End) return "end of input";
    return "'" + t.text + "'";
  }

  // ---- shared term / atom productions -------------------------------------

  // A lowercase symbol (for declarations: type names, constants, ...).
  std::string expect_symbol(const char* what) {
    Token t = expect(Tok::Name, what);
    if (t.text == "#") throw ParseError("'#' is reserved", t.line);
    return t.text;
  }

  int expect_int(const char* what) {
    Token t = expect(Tok::Number, what);
    int v = static_cast<int>(t.number);
    if (static_cast<double>(v) != t.number || v < 0)
      throw ParseError(std::string(what) + " must be a non-negative integer", t.line);
    return v;
  }

  Term parse_term(bool allow_hash) {
    if (at(Tok::Var)) {
      Token t = next();
      if (t.text == "_")
        return Term::var("_" + std::to_string(++anon_), 0);
      if (t.text[0] == '_')
        throw ParseError("variable names must not start with '_'; use '_' alone "
                         "for an anonymous variable",
                         t.line);
      return Term::var(t.text, 0);
    }
    if (at(Tok::LBracket)) return parse_list(allow_hash);
    Token t = expect(Tok::Name, "a term");
    if (t.text == "#" && !allow_hash)
      throw ParseError("'#' is reserved for Moore-form models", t.line);
    if (at(Tok::LParen)) {
      next();
      std::vector<Term> args;
      args.push_back(parse_term(allow_hash));
      while (at(Tok::Comma)) {
        next();
        args.push_back(parse_term(allow_hash));
      }
      expect(Tok::RParen, "')'");
      return Term::compound(t.text, std::move(args));
    }
    return Term::constant(t.text);
  }

  Term parse_list(bool allow_hash) {
    expect(Tok::LBracket, "'['");
    if (at(Tok::RBracket)) {
      next();
      return Term::constant(kNilConstant);
    }
    std::vector<Term> items;
    items.push_back(parse_term(allow_hash));
    while (at(Tok::Comma)) {
      next();
      items.push_back(parse_term(allow_hash));
    }
    Term tail = Term::constant(kNilConstant);
    if (at(Tok::Pipe)) {
      next();
      tail = parse_term(allow_hash);
    }
    expect(Tok::RBracket, "']'");
    for (auto it = items.rbegin(); it != items.rend(); ++it)
      tail = Term::compound(kConsFunctor, {*it, tail});
    return tail;
  }

  Term parse_atom(bool allow_hash) {
    Token t = expect(Tok::Name, "an atom");
    if (t.text == "#") throw ParseError("'#' cannot be an atom", t.line);
    std::vector<Term> args;
    if (at(Tok::LParen)) {
      next();
      args.push_back(parse_term(allow_hash));
      while (at(Tok::Comma)) {
        next();
        args.push_back(parse_term(allow_hash));
      }
      expect(Tok::RParen, "')'");
    }
    return Term::atom(t.text, std::move(args));
  }

  void begin_clause() { anon_ = 0; }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
  int anon_ = 0;  // per-clause counter for '_'
};

// ---- model files -----------------------------------------------------------

struct ModelParts {
  Alphabet sigma;
  std::vector<SelectionDecl> selection_decls;
  std::vector<AbstractTransition> transitions;
  std::vector<AbstractEmission> emissions;
  bool moore = false;
};

void check_clause_types(const Alphabet& sigma, const AbstractTransition& tr) {
  std::map<VarRef, std::string> var_types;
  std::string e = typecheck_atom(tr.body, sigma, var_types);
  if (e.empty()) e = typecheck_atom(tr.head, sigma, var_types);
  if (e.empty() && tr.obs) e = typecheck_atom(*tr.obs, sigma, var_types);
  if (!e.empty()) throw ParseError(e, tr.line);
}

ModelParts parse_model_parts(const std::string& text, bool moore_mode) {
  Parser p(text);
  ModelParts out;
  std::set<std::pair<SymbolKey, int>> selection_seen;

  auto check = [&](const std::string& err, int line) {
    if (!err.empty()) throw ParseError(err, line);
  };

  while (!p.at(Tok::End)) {
    if (p.at(Tok::Number)) {
      // <p> : <head> <- <body> [emits <obs>] .
      p.begin_clause();
      Token prob = p.next();
      p.expect(Tok::Colon, "':'");
      Term head = p.parse_atom(moore_mode);
      p.expect(Tok::Arrow, "'<-'");
      Term body = p.parse_atom(moore_mode);
      std::optional<Term> obs;
      if (p.at_name("emits")) {
        p.next();
        obs = p.parse_atom(moore_mode);
      }
      p.expect(Tok::Dot, "'.'");
      if (obs && moore_mode)
        throw ParseError("Moore-form transitions carry no 'emits' part", prob.line);
      AbstractTransition tr{prob.number, std::move(head), std::move(body),
                            std::move(obs), prob.line};
      check_clause_types(out.sigma, tr);
      out.transitions.push_back(std::move(tr));
      continue;
    }

    Token t = p.expect(Tok::Name, "a declaration or a transition");
    int line = t.line;
    if (t.text == "domain") {
      std::string type = p.expect_symbol("a type name");
      std::vector<std::string> constants;
      bool has_domain = false;
      if (p.at(Tok::Equals)) {
        p.next();
        has_domain = true;
        p.expect(Tok::LBrace, "'{'");
        constants.push_back(p.expect_symbol("a constant"));
        while (p.at(Tok::Comma)) {
          p.next();
          constants.push_back(p.expect_symbol("a constant"));
        }
        p.expect(Tok::RBrace, "'}'");
      }
      p.expect(Tok::Dot, "'.'");
      check(out.sigma.add_domain(type, std::move(constants), has_domain), line);
    } else if (t.text == "identifier") {
      std::string type = p.expect_symbol("a type name");
      p.expect(Tok::Dot, "'.'");
      check(out.sigma.add_identifier(type), line);
    } else if (t.text == "predicate") {
      Token nm = p.expect(Tok::Name, "a predicate name");
      if (nm.text == "#") throw ParseError("'#' cannot name a predicate", nm.line);
      if (nm.text == "emits")
        throw ParseError("'emits' cannot name a predicate", nm.line);
      std::vector<std::string> arg_types;
      if (p.at(Tok::LParen)) {
        p.next();
        arg_types.push_back(p.expect_symbol("a type name"));
        while (p.at(Tok::Comma)) {
          p.next();
          arg_types.push_back(p.expect_symbol("a type name"));
        }
        p.expect(Tok::RParen, "')'");
      }
      p.expect(Tok::Dot, "'.'");
      if (moore_mode && nm.text == "end") {
        // The absorbing end state of a converted model keeps its extended
        // argument; regular registration rejects the reserved name.
        SymbolKey key{"end", static_cast<int>(arg_types.size())};
        if (out.sigma.predicates.count(key))
          throw ParseError("predicate " + to_string(key) + " declared twice", line);
        for (const std::string& ty : arg_types)
          if (!out.sigma.has_type(ty))
            throw ParseError("predicate " + to_string(key) +
                                 " references unknown type '" + ty + "'",
                             line);
        out.sigma.predicate_order.push_back(key);
        out.sigma.predicates.emplace(key, std::move(arg_types));
      } else {
        check(out.sigma.add_predicate(nm.text, std::move(arg_types)), line);
      }
    } else if (t.text == "functor") {
      std::string name = p.expect_symbol("a functor name");
      std::vector<std::string> arg_types;
      if (p.at(Tok::Slash)) {
        // Short form: functor f/k : t. — k arguments, all of the result type.
        p.next();
        int arity = p.expect_int("the arity");
        p.expect(Tok::Colon, "':'");
        std::string result = p.expect_symbol("a type name");
        p.expect(Tok::Dot, "'.'");
        arg_types.assign(static_cast<size_t>(arity), result);
        check(out.sigma.add_functor(name, std::move(arg_types), result), line);
      } else {
        p.expect(Tok::LParen, "'(' or '/'");
        arg_types.push_back(p.expect_symbol("a type name"));
        while (p.at(Tok::Comma)) {
          p.next();
          arg_types.push_back(p.expect_symbol("a type name"));
        }
        p.expect(Tok::RParen, "')'");
        p.expect(Tok::Colon, "':'");
        std::string result = p.expect_symbol("a type name");
        p.expect(Tok::Dot, "'.'");
        check(out.sigma.add_functor(name, std::move(arg_types), result), line);
      }
    } else if (t.text == "selection") {
      Token nm = p.expect(Tok::Name, "a predicate name");
      p.expect(Tok::Slash, "'/'");
      int arity = p.expect_int("the arity");
      if (!p.at_name("arg")) p.fail("expected 'arg'");
      p.next();
      int arg = p.expect_int("the argument position");
      SelectionDecl decl;
      decl.key = SelectionKey{SymbolKey{nm.text, arity}, arg};
      decl.line = line;
      p.expect(Tok::LBrace, "'{'");
      for (;;) {
        std::string c = p.expect_symbol("a constant");
        p.expect(Tok::Colon, "':'");
        Token v = p.expect(Tok::Number, "a probability");
        decl.entries.emplace_back(std::move(c), v.number);
        if (!p.at(Tok::Comma)) break;
        p.next();
      }
      p.expect(Tok::RBrace, "'}'");
      p.expect(Tok::Dot, "'.'");
      if (!out.sigma.predicates.count(decl.key.pred))
        throw ParseError("selection for undeclared predicate " +
                             to_string(decl.key.pred),
                         line);
      if (!selection_seen.insert({decl.key.pred, decl.key.arg}).second)
        throw ParseError("duplicate selection declaration for " +
                             to_string(decl.key.pred) + " arg " +
                             std::to_string(decl.key.arg),
                         line);
      out.selection_decls.push_back(std::move(decl));
    } else if (t.text == "moore") {
      p.expect(Tok::Dot, "'.'");
      if (!moore_mode)
        throw ParseError(
            "this file declares a Moore-form model ('moore.' directive)", line);
      out.moore = true;
    } else if (t.text == "emission") {
      if (!moore_mode)
        throw ParseError("emission clauses belong to Moore-form models", line);
      p.begin_clause();
      Term obs = p.parse_atom(true);
      p.expect(Tok::Arrow, "'<-'");
      Term state = p.parse_atom(true);
      p.expect(Tok::Dot, "'.'");
      AbstractEmission em{std::move(obs), std::move(state), line};
      std::map<VarRef, std::string> var_types;
      std::string e = typecheck_atom(em.state, out.sigma, var_types);
      if (e.empty()) e = typecheck_atom(em.obs, out.sigma, var_types);
      if (!e.empty()) throw ParseError(e, line);
      out.emissions.push_back(std::move(em));
    } else {
      throw ParseError("expected a declaration or a transition, found '" +
                           t.text + "'",
                       line);
    }
  }
  if (moore_mode && !out.moore)
    throw ParseError("missing 'moore.' directive", 1);
  return out;
}

}  // namespace

Model parse_model(const std::string& text) {
  ModelParts parts = parse_model_parts(text, false);
  Model m;
  m.sigma = std::move(parts.sigma);
  m.selection_decls = std::move(parts.selection_decls);
  m.transitions = std::move(parts.transitions);
  return m;
}

MooreModel parse_moore_model(const std::string& text) {
  ModelParts parts = parse_model_parts(text, true);
  MooreModel m;
  m.sigma = std::move(parts.sigma);
  m.selection_decls = std::move(parts.selection_decls);
  m.transitions = std::move(parts.transitions);
  m.emissions = std::move(parts.emissions);
  return m;
}

bool is_moore_source(const std::string& text) {
  try {
    Parser p(text);
    // A directive is the statement `moore.`; scan token pairs.
    while (!p.at(Tok::End)) {
      if (p.at_name("moore")) {
        p.next();
        if (p.at(Tok::Dot)) return true;
        continue;
      }
      p.next();
    }
  } catch (const ParseError&) {
    // Let the real parser report the error.
  }
  return false;
}

std::vector<std::vector<Term>> parse_sequences(const std::string& text) {
  Parser p(text);
  std::vector<std::vector<Term>> out;
  while (!p.at(Tok::End)) {
    std::vector<Term> seq;
    int line = p.peek().line;
    seq.push_back(p.parse_atom(false));
    while (p.at(Tok::Comma)) {
      p.next();
      seq.push_back(p.parse_atom(false));
    }
    p.expect(Tok::Dot, "'.'");
    for (const Term& a : seq)
      if (!a.is_ground())
        throw ParseError("observation '" + to_string(a) + "' is not ground", line);
    out.push_back(std::move(seq));
  }
  return out;
}

std::vector<LabeledSequence> parse_labeled_sequences(const std::string& text) {
  std::vector<LabeledSequence> out;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string stripped = raw.substr(0, raw.find('%'));
    if (stripped.find_first_not_of(" \t\r") == std::string::npos) continue;
    size_t tab = stripped.find('\t');
    if (tab == std::string::npos)
      throw ParseError("expected '<label> <TAB> <sequence>.'", line);
    std::string label = stripped.substr(0, tab);
    while (!label.empty() && (label.back() == ' ' || label.back() == '\r'))
      label.pop_back();
    size_t start = label.find_first_not_of(' ');
    label = start == std::string::npos ? "" : label.substr(start);
    if (label.empty()) throw ParseError("empty label", line);
    std::vector<std::vector<Term>> seqs;
    try {
      seqs = parse_sequences(stripped.substr(tab + 1));
    } catch (const ParseError& e) {
      // The record is a single line; re-anchor the inner position.
      std::string msg = e.what();
      const std::string prefix = "line 1: ";
      if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
      throw ParseError(msg, line);
    }
    if (seqs.size() != 1)
      throw ParseError("expected exactly one sequence after the label", line);
    out.push_back({std::move(label), std::move(seqs.front())});
  }
  return out;
}

Pcfg parse_pcfg(const std::string& text) {
  Parser p(text);
  Pcfg g;
  auto note = [](std::vector<std::string>& list, const std::string& s) {
    for (const std::string& x : list)
      if (x == s) return;
    list.push_back(s);
  };

  if (!p.at_name("start")) p.fail("expected 'start <NonTerminal>.'");
  p.next();
  g.start = p.expect(Tok::Var, "a nonterminal").text;
  p.expect(Tok::Dot, "'.'");
  note(g.nonterminals, g.start);

  while (!p.at(Tok::End)) {
    Token prob = p.expect(Tok::Number, "a production probability");
    p.expect(Tok::Colon, "':'");
    Token lhs = p.expect(Tok::Var, "a nonterminal");
    p.expect(Tok::RArrow, "'->'");
    Production prod;
    prod.p = prob.number;
    prod.lhs = lhs.text;
    prod.line = prob.line;
    note(g.nonterminals, prod.lhs);
    while (p.at(Tok::Name) || p.at(Tok::Var)) {
      Token sym = p.next();
      if (sym.text == "#") throw ParseError("'#' is reserved", sym.line);
      if (sym.kind == Tok::Var)
        note(g.nonterminals, sym.text);
      else
        note(g.terminals, sym.text);
      prod.rhs.push_back(sym.text);
    }
    p.expect(Tok::Dot, "'.'");
    g.productions.push_back(std::move(prod));
  }
  return g;
}

}  // namespace lohmm
