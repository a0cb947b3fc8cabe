#pragma once

// Model files (.gham):
//
//   even q1, q2;            # commuting positions
//   odd theta, thetabar;    # anticommuting; names ending in the conjugate suffix are left-type
//   odd-left eta;           # explicit side
//   param m;                # central even constant
//   L = (1/2)*(dot(q1) - q2)^2 + (i/2)*thetabar*dot(theta) - m*thetabar*theta;
//   lattice { dim = 1; sites = 16; spacing = 0.5; mass = 1; checks = all; }
//
// `/` only divides by an integer literal, `^` takes a non-negative integer literal.

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "gham/constraints.hpp"

namespace gham::dsl {

struct Span {
  int line = 0, column = 0;          // 1-based start
  int end_line = 0, end_column = 0;  // exclusive end
  std::string to_string() const;    // "line:column"
};

enum class ErrorKind { Lexical, Syntax, Undeclared, Redeclared, Misuse, Parity };

const char* to_string(ErrorKind k);

class DslError : public std::runtime_error {
 public:
  DslError(ErrorKind kind, Span span, const std::string& message);
  ErrorKind kind() const { return kind_; }
  const Span& span() const { return span_; }
  const std::string& message() const { return message_; }

 private:
  ErrorKind kind_;
  Span span_;
  std::string message_;
};

enum class NodeKind { Number, Imaginary, Ident, Dot, Neg, Add, Sub, Mul, Div, Pow };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  NodeKind kind;
  Span span;
  std::string text;           // literal text, identifier, or dotted name
  CRational value;            // Number: literal value
  long integer = 0;           // Div: divisor; Pow: exponent
  std::vector<ExprPtr> args;  // operands
};

enum class DeclKind { Even, Odd, OddLeft, OddRight, Param };

const char* to_string(DeclKind k);

struct Declaration {
  std::string name;
  DeclKind kind;
  Span span;
};

using LatticeValue = std::variant<CRational, std::string>;

struct LatticeEntry {
  std::string key;
  std::vector<LatticeValue> values;
  Span span;
};

struct ModelSpec {
  std::vector<Declaration> declarations;
  ExprPtr lagrangian;  // null when the file has no `L = ...;`
  std::optional<std::vector<LatticeEntry>> lattice;

  const Declaration* find(const std::string& name) const;
};

// Keys accepted inside `lattice { ... }`.
const std::vector<std::string>& lattice_keys();

ModelSpec parse(const std::string& text);

// Parses a standalone expression (no statements).
ExprPtr parse_expression(const std::string& text);

std::string print(const Expr& e);
std::string print(const ModelSpec& spec);

// Structural equality ignoring spans.
bool same_structure(const Expr& a, const Expr& b);
bool same_structure(const ModelSpec& a, const ModelSpec& b);

struct ElaborateOptions {
  std::string conjugate_suffix = "bar";
};

PairKind side_of(const Declaration& d, const ElaborateOptions& opt = {});

LagrangianModel elaborate(const ModelSpec& spec, const ElaborateOptions& opt = {});

// Expands an expression; identifiers resolve through `names` first, then the universe.
Poly evaluate(const Expr& e, const UniversePtr& u,
              const std::map<std::string, Poly>& names = {});

}  // namespace gham::dsl
