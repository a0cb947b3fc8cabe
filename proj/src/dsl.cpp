#include "gham/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace gham::dsl {

std::string Span::to_string() const { return std::to_string(line) + ":" + std::to_string(column); }

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Lexical: return "lexical error";
    case ErrorKind::Syntax: return "syntax error";
    case ErrorKind::Undeclared: return "undeclared identifier";
    case ErrorKind::Redeclared: return "duplicate declaration";
    case ErrorKind::Misuse: return "misuse";
    case ErrorKind::Parity: return "parity error";
  }
  return "error";
}

DslError::DslError(ErrorKind kind, Span span, const std::string& message)
    : std::runtime_error(span.to_string() + ": " + to_string(kind) + ": " + message),
      kind_(kind),
      span_(span),
      message_(message) {}

const char* to_string(DeclKind k) {
  switch (k) {
    case DeclKind::Even: return "even";
    case DeclKind::Odd: return "odd";
    case DeclKind::OddLeft: return "odd-left";
    case DeclKind::OddRight: return "odd-right";
    case DeclKind::Param: return "param";
  }
  return "?";
}

const Declaration* ModelSpec::find(const std::string& name) const {
  for (const auto& d : declarations)
    if (d.name == name) return &d;
  return nullptr;
}

const std::vector<std::string>& lattice_keys() {
  static const std::vector<std::string> keys = {"dim",  "sites", "spacing", "mass",
                                                "checks", "lemma_k", "tau", "n_max",
                                                "theorem1_n"};
  return keys;
}

namespace {

const std::set<std::string> kReserved = {"even", "odd", "param", "dot", "i", "L", "lattice"};

// ---------------------------------------------------------------------------
// lexer

enum class Tok { Ident, Number, Punct, End };

struct Token {
  Tok type;
  std::string text;
  Span span;
};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t k = 0;
  auto here = [&] { return Span{line, col, line, col}; };
  auto advance = [&] {
    unsigned char c = src[k++];
    if (c == '\n') {
      ++line;
      col = 1;
    } else if ((c & 0xC0) != 0x80) {
      ++col;
    }
  };
  auto finish = [&](Span s) {
    s.end_line = line;
    s.end_column = col;
    return s;
  };
  while (k < src.size()) {
    unsigned char c = src[k];
    if (c == '#') {
      while (k < src.size() && src[k] != '\n') advance();
      continue;
    }
    if (std::isspace(c)) {
      advance();
      continue;
    }
    Span s = here();
    std::size_t start = k;
    if (std::isalpha(c) || c == '_') {
      while (k < src.size() && (std::isalnum((unsigned char)src[k]) || src[k] == '_')) advance();
      out.push_back({Tok::Ident, src.substr(start, k - start), finish(s)});
    } else if (std::isdigit(c)) {
      while (k < src.size() && std::isdigit((unsigned char)src[k])) advance();
      if (k + 1 < src.size() && src[k] == '.' && std::isdigit((unsigned char)src[k + 1])) {
        advance();
        while (k < src.size() && std::isdigit((unsigned char)src[k])) advance();
      }
      out.push_back({Tok::Number, src.substr(start, k - start), finish(s)});
    } else if (std::string_view(";,=(){}+-*/^").find(char(c)) != std::string_view::npos) {
      advance();
      out.push_back({Tok::Punct, std::string(1, char(c)), finish(s)});
    } else {
      std::size_t len = 1;
      if (c >= 0xC0) {
        while (start + len < src.size() && (src[start + len] & 0xC0) == 0x80) ++len;
      }
      advance();
      throw DslError(ErrorKind::Lexical, finish(s),
                     "unexpected character '" + src.substr(start, len) + "'");
    }
  }
  out.push_back({Tok::End, "", here()});
  return out;
}

CRational literal_value(const std::string& text) {
  auto dot = text.find('.');
  if (dot == std::string::npos) return CRational(mpq_class(mpz_class(text, 10)));
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, text.size() - dot - 1);
  return CRational(mpq_class(mpz_class(digits, 10), den));
}

Span join(const Span& a, const Span& b) { return {a.line, a.column, b.end_line, b.end_column}; }

ExprPtr node(NodeKind kind, Span span, std::vector<ExprPtr> args = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->span = span;
  e->args = std::move(args);
  return e;
}

// ---------------------------------------------------------------------------
// parser

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ModelSpec file() {
    ModelSpec spec;
    while (peek().type != Tok::End) statement(spec);
    check_names(spec);
    return spec;
  }

  ExprPtr standalone() {
    ExprPtr e = expr();
    if (peek().type != Tok::End) fail(peek(), "unexpected '" + peek().text + "' after expression");
    return e;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool is_punct(const char* p, std::size_t ahead = 0) const {
    return peek(ahead).type == Tok::Punct && peek(ahead).text == p;
  }
  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw DslError(ErrorKind::Syntax, t.span, msg);
  }
  std::string describe(const Token& t) const {
    return t.type == Tok::End ? "end of input" : "'" + t.text + "'";
  }
  const Token& expect(const char* p) {
    if (!is_punct(p)) fail(peek(), std::string("expected '") + p + "' but found " + describe(peek()));
    return take();
  }
  const Token& expect_ident(const char* what) {
    if (peek().type != Tok::Ident) fail(peek(), std::string("expected ") + what + " but found " +
                                                    describe(peek()));
    return take();
  }

  void statement(ModelSpec& spec) {
    const Token& head = peek();
    if (head.type != Tok::Ident) fail(head, "expected a statement but found " + describe(head));
    if (head.text == "even" || head.text == "odd" || head.text == "param") {
      take();
      DeclKind kind = head.text == "even" ? DeclKind::Even
                      : head.text == "param" ? DeclKind::Param
                                             : DeclKind::Odd;
      if (kind == DeclKind::Odd && is_punct("-")) {
        take();
        const Token& side = expect_ident("'left' or 'right'");
        if (side.text == "left") {
          kind = DeclKind::OddLeft;
        } else if (side.text == "right") {
          kind = DeclKind::OddRight;
        } else {
          fail(side, "expected 'left' or 'right' after 'odd-'");
        }
      }
      do {
        const Token& id = expect_ident("a name");
        declare(spec, {id.text, kind, id.span});
      } while (is_punct(",") && (take(), true));
      expect(";");
    } else if (head.text == "L") {
      take();
      if (spec.lagrangian) {
        throw DslError(ErrorKind::Redeclared, head.span, "the Lagrangian is defined twice");
      }
      expect("=");
      spec.lagrangian = expr();
      expect(";");
    } else if (head.text == "lattice") {
      take();
      if (spec.lattice) throw DslError(ErrorKind::Redeclared, head.span, "second lattice block");
      spec.lattice.emplace();
      expect("{");
      while (!is_punct("}")) lattice_entry(*spec.lattice);
      take();
      if (is_punct(";")) take();
    } else {
      fail(head, "expected a statement but found " + describe(head));
    }
  }

  void declare(ModelSpec& spec, Declaration d) {
    if (kReserved.contains(d.name)) {
      throw DslError(ErrorKind::Misuse, d.span, "'" + d.name + "' is reserved");
    }
    if (spec.find(d.name)) {
      throw DslError(ErrorKind::Redeclared, d.span, "'" + d.name + "' is already declared");
    }
    for (const auto& other : spec.declarations) {
      if ("p_" + other.name == d.name || "p_" + d.name == other.name) {
        throw DslError(ErrorKind::Misuse, d.span,
                       "'" + d.name + "' collides with a generated momentum name");
      }
    }
    spec.declarations.push_back(std::move(d));
  }

  void lattice_entry(std::vector<LatticeEntry>& entries) {
    const Token& key = expect_ident("a lattice key");
    const auto& keys = lattice_keys();
    if (std::find(keys.begin(), keys.end(), key.text) == keys.end()) {
      throw DslError(ErrorKind::Misuse, key.span, "unknown lattice key '" + key.text + "'");
    }
    for (const auto& e : entries)
      if (e.key == key.text) {
        throw DslError(ErrorKind::Redeclared, key.span, "lattice key '" + key.text + "' repeated");
      }
    LatticeEntry entry{key.text, {}, key.span};
    expect("=");
    do {
      if (peek().type == Tok::Ident) {
        entry.values.emplace_back(take().text);
        continue;
      }
      bool neg = is_punct("-") && (take(), true);
      if (peek().type != Tok::Number) fail(peek(), "expected a value but found " + describe(peek()));
      CRational v = literal_value(take().text);
      if (is_punct("/")) {
        take();
        if (peek().type != Tok::Number || peek().text.find('.') != std::string::npos) {
          fail(peek(), "expected an integer denominator");
        }
        CRational den = literal_value(peek().text);
        if (den.is_zero()) fail(peek(), "division by zero");
        take();
        v /= den;
      }
      entry.values.emplace_back(neg ? -v : v);
    } while (is_punct(",") && (take(), true));
    entry.span = join(entry.span, toks_[pos_ - 1].span);
    expect(";");
    entries.push_back(std::move(entry));
  }

  // expr := term (('+'|'-') term)*
  ExprPtr expr() {
    ExprPtr lhs = term();
    while (is_punct("+") || is_punct("-")) {
      NodeKind k = take().text == "+" ? NodeKind::Add : NodeKind::Sub;
      ExprPtr rhs = term();
      Span s = join(lhs->span, rhs->span);
      lhs = node(k, s, {lhs, rhs});
    }
    return lhs;
  }

  // term := unary (('*' unary) | ('/' integer))*
  ExprPtr term() {
    ExprPtr lhs = unary();
    for (;;) {
      if (is_punct("*")) {
        take();
        ExprPtr rhs = unary();
        Span s = join(lhs->span, rhs->span);
        lhs = node(NodeKind::Mul, s, {lhs, rhs});
      } else if (is_punct("/")) {
        take();
        const Token& d = peek();
        if (d.type != Tok::Number || d.text.find('.') != std::string::npos) {
          throw DslError(ErrorKind::Misuse, d.span, "'/' must be followed by an integer literal");
        }
        long den = std::stol(d.text);
        if (den == 0) throw DslError(ErrorKind::Misuse, d.span, "division by zero");
        take();
        auto n = std::make_shared<Expr>(*node(NodeKind::Div, join(lhs->span, d.span), {lhs}));
        n->integer = den;
        lhs = n;
      } else {
        return lhs;
      }
    }
  }

  ExprPtr unary() {
    if (is_punct("-")) {
      Span s = take().span;
      ExprPtr inner = unary();
      return node(NodeKind::Neg, join(s, inner->span), {inner});
    }
    return power();
  }

  ExprPtr power() {
    ExprPtr base = primary();
    if (!is_punct("^")) return base;
    take();
    const Token& e = peek();
    if (e.type != Tok::Number || e.text.find('.') != std::string::npos) {
      throw DslError(ErrorKind::Misuse, e.span, "'^' must be followed by a non-negative integer");
    }
    take();
    auto n = std::make_shared<Expr>(*node(NodeKind::Pow, join(base->span, e.span), {base}));
    n->integer = std::stol(e.text);
    return n;
  }

  ExprPtr primary() {
    const Token& t = peek();
    if (t.type == Tok::Number) {
      take();
      auto n = std::make_shared<Expr>(*node(NodeKind::Number, t.span));
      n->text = t.text;
      n->value = literal_value(t.text);
      return n;
    }
    if (is_punct("(")) {
      take();
      ExprPtr inner = expr();
      expect(")");
      return inner;
    }
    if (t.type == Tok::Ident) {
      take();
      if (t.text == "i") return node(NodeKind::Imaginary, t.span);
      if (t.text == "dot") {
        expect("(");
        const Token& id = expect_ident("a position name");
        if (kReserved.contains(id.text)) {
          throw DslError(ErrorKind::Misuse, id.span, "'" + id.text + "' is not a position");
        }
        const Token& close = expect(")");
        auto n = std::make_shared<Expr>(*node(NodeKind::Dot, join(t.span, close.span)));
        n->text = id.text;
        return n;
      }
      if (kReserved.contains(t.text)) {
        throw DslError(ErrorKind::Misuse, t.span, "'" + t.text + "' is reserved");
      }
      auto n = std::make_shared<Expr>(*node(NodeKind::Ident, t.span));
      n->text = t.text;
      return n;
    }
    fail(t, "expected an expression but found " + describe(t));
  }

  void check_names(const ModelSpec& spec) const {
    if (!spec.lagrangian) return;
    std::vector<const Expr*> stack = {spec.lagrangian.get()};
    while (!stack.empty()) {
      const Expr* e = stack.back();
      stack.pop_back();
      if (e->kind == NodeKind::Ident || e->kind == NodeKind::Dot) {
        const Declaration* d = spec.find(e->text);
        if (!d) throw DslError(ErrorKind::Undeclared, e->span, "'" + e->text + "' is not declared");
        if (e->kind == NodeKind::Dot && d->kind == DeclKind::Param) {
          throw DslError(ErrorKind::Misuse, e->span,
                         "parameter '" + e->text + "' has no velocity");
        }
      }
      for (const auto& a : e->args) stack.push_back(a.get());
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// printer

int precedence(NodeKind k) {
  switch (k) {
    case NodeKind::Add:
    case NodeKind::Sub: return 1;
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Neg: return 3;
    case NodeKind::Pow: return 4;
    default: return 5;
  }
}

void print_to(std::ostream& os, const Expr& e, int min_prec) {
  int p = precedence(e.kind);
  bool paren = p < min_prec;
  if (paren) os << '(';
  switch (e.kind) {
    case NodeKind::Number: os << e.text; break;
    case NodeKind::Imaginary: os << 'i'; break;
    case NodeKind::Ident: os << e.text; break;
    case NodeKind::Dot: os << "dot(" << e.text << ')'; break;
    case NodeKind::Neg:
      os << '-';
      print_to(os, *e.args[0], 3);
      break;
    case NodeKind::Add:
    case NodeKind::Sub:
      print_to(os, *e.args[0], 1);
      os << (e.kind == NodeKind::Add ? " + " : " - ");
      print_to(os, *e.args[1], 2);
      break;
    case NodeKind::Mul:
      print_to(os, *e.args[0], 2);
      os << '*';
      print_to(os, *e.args[1], 3);
      break;
    case NodeKind::Div:
      print_to(os, *e.args[0], 2);
      os << '/' << e.integer;
      break;
    case NodeKind::Pow:
      print_to(os, *e.args[0], 5);
      os << '^' << e.integer;
      break;
  }
  if (paren) os << ')';
}

void collect_summands(const ExprPtr& e, std::vector<std::pair<ExprPtr, bool>>& out, bool negate) {
  if (e->kind == NodeKind::Add || e->kind == NodeKind::Sub) {
    collect_summands(e->args[0], out, negate);
    collect_summands(e->args[1], out, e->kind == NodeKind::Sub ? !negate : negate);
  } else {
    out.emplace_back(e, negate);
  }
}

}  // namespace

ModelSpec parse(const std::string& text) { return Parser(lex(text)).file(); }

ExprPtr parse_expression(const std::string& text) { return Parser(lex(text)).standalone(); }

std::string print(const Expr& e) {
  std::ostringstream os;
  print_to(os, e, 0);
  return os.str();
}

std::string print(const ModelSpec& spec) {
  std::ostringstream os;
  const auto& ds = spec.declarations;
  for (std::size_t k = 0; k < ds.size();) {
    os << to_string(ds[k].kind) << ' ' << ds[k].name;
    std::size_t j = k + 1;
    for (; j < ds.size() && ds[j].kind == ds[k].kind; ++j) os << ", " << ds[j].name;
    os << ";\n";
    k = j;
  }
  if (spec.lagrangian) os << "L = " << print(*spec.lagrangian) << ";\n";
  if (spec.lattice) {
    os << "lattice {\n";
    for (const auto& e : *spec.lattice) {
      os << "  " << e.key << " = ";
      for (std::size_t k = 0; k < e.values.size(); ++k) {
        if (k) os << ", ";
        if (auto* s = std::get_if<std::string>(&e.values[k])) {
          os << *s;
        } else {
          os << std::get<CRational>(e.values[k]).to_string();
        }
      }
      os << ";\n";
    }
    os << "}\n";
  }
  return os.str();
}

bool same_structure(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.integer != b.integer || a.args.size() != b.args.size()) return false;
  if (a.kind == NodeKind::Number ? !(a.value == b.value) : a.text != b.text) return false;
  for (std::size_t k = 0; k < a.args.size(); ++k)
    if (!same_structure(*a.args[k], *b.args[k])) return false;
  return true;
}

bool same_structure(const ModelSpec& a, const ModelSpec& b) {
  if (a.declarations.size() != b.declarations.size()) return false;
  for (std::size_t k = 0; k < a.declarations.size(); ++k) {
    if (a.declarations[k].name != b.declarations[k].name ||
        a.declarations[k].kind != b.declarations[k].kind) {
      return false;
    }
  }
  if (bool(a.lagrangian) != bool(b.lagrangian)) return false;
  if (a.lagrangian && !same_structure(*a.lagrangian, *b.lagrangian)) return false;
  if (bool(a.lattice) != bool(b.lattice)) return false;
  if (a.lattice) {
    if (a.lattice->size() != b.lattice->size()) return false;
    for (std::size_t k = 0; k < a.lattice->size(); ++k) {
      if ((*a.lattice)[k].key != (*b.lattice)[k].key ||
          (*a.lattice)[k].values != (*b.lattice)[k].values) {
        return false;
      }
    }
  }
  return true;
}

PairKind side_of(const Declaration& d, const ElaborateOptions& opt) {
  switch (d.kind) {
    case DeclKind::Even: return PairKind::Even;
    case DeclKind::OddLeft: return PairKind::OddLeft;
    case DeclKind::OddRight: return PairKind::OddRight;
    case DeclKind::Odd: {
      const auto& sfx = opt.conjugate_suffix;
      bool marked = !sfx.empty() && d.name.size() > sfx.size() &&
                    d.name.compare(d.name.size() - sfx.size(), sfx.size(), sfx) == 0;
      return marked ? PairKind::OddLeft : PairKind::OddRight;
    }
    case DeclKind::Param: break;
  }
  throw std::invalid_argument("parameters have no side convention");
}

Poly evaluate(const Expr& e, const UniversePtr& u, const std::map<std::string, Poly>& names) {
  auto lookup = [&](const std::string& name) {
    if (auto it = names.find(name); it != names.end()) return it->second;
    if (auto id = u->find(name)) return Poly::generator(u, *id);
    throw DslError(ErrorKind::Undeclared, e.span, "'" + e.text + "' is not declared");
  };
  switch (e.kind) {
    case NodeKind::Number: return Poly(e.value, u);
    case NodeKind::Imaginary: return Poly(CRational::i(), u);
    case NodeKind::Ident: return lookup(e.text);
    case NodeKind::Dot: return lookup("dot(" + e.text + ")");
    case NodeKind::Neg: return -evaluate(*e.args[0], u, names);
    case NodeKind::Add: return evaluate(*e.args[0], u, names) + evaluate(*e.args[1], u, names);
    case NodeKind::Sub: return evaluate(*e.args[0], u, names) - evaluate(*e.args[1], u, names);
    case NodeKind::Mul: return evaluate(*e.args[0], u, names) * evaluate(*e.args[1], u, names);
    case NodeKind::Div: return evaluate(*e.args[0], u, names) * CRational::fraction(1, e.integer);
    case NodeKind::Pow: return pow(evaluate(*e.args[0], u, names), unsigned(e.integer));
  }
  throw std::logic_error("unknown node");
}

LagrangianModel elaborate(const ModelSpec& spec, const ElaborateOptions& opt) {
  if (!spec.lagrangian) throw DslError(ErrorKind::Syntax, Span{1, 1, 1, 1}, "no Lagrangian `L = ...;`");
  LagrangianModel m;
  for (const auto& d : spec.declarations) {
    if (d.kind == DeclKind::Param) {
      m.add_parameter(d.name);
    } else {
      m.add_position(d.name, side_of(d, opt));
    }
  }
  std::vector<std::pair<ExprPtr, bool>> summands;
  collect_summands(spec.lagrangian, summands, false);
  Poly total(CRational(), m.universe);
  for (const auto& [e, negate] : summands) {
    Poly t = evaluate(*e, m.universe);
    if (!t.is_even()) {
      throw DslError(ErrorKind::Parity, e->span,
                     "the Lagrangian must be even, but the term '" + print(*e) +
                         "' has odd part " + parity_split(t).second.to_string());
    }
    total += negate ? -t : t;
  }
  m.lagrangian = std::move(total);
  return m;
}

}  // namespace gham::dsl
