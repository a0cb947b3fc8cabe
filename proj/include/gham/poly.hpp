#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gham/generator.hpp"
#include "gham/rational.hpp"

namespace gham {

// A product of generators in normal form: even generators with positive exponents
// (sorted by id), odd generators strictly ascending by id.
struct Monomial {
  std::vector<std::pair<GeneratorId, unsigned>> even;
  std::vector<GeneratorId> odd;

  static Monomial unit() { return {}; }
  // Builds the normal form of an ordered odd product. Returns the permutation sign,
  // or 0 when a factor repeats.
  static int from_odd_sequence(std::vector<GeneratorId> factors, Monomial& out);

  unsigned degree() const;
  Parity parity() const { return odd.size() % 2 ? Parity::Odd : Parity::Even; }
  bool is_unit() const { return even.empty() && odd.empty(); }
  unsigned exponent(GeneratorId id) const;  // even exponent, or 1/0 for odd factors
  bool contains(GeneratorId id) const { return exponent(id) > 0; }

  friend bool operator==(const Monomial&, const Monomial&) = default;
  friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b);
};

// Graded product a*b; returns the reordering sign, or 0 when the product vanishes.
int multiply(const Monomial& a, const Monomial& b, Monomial& out);

class UniverseMismatch : public std::logic_error {
 public:
  UniverseMismatch() : std::logic_error("polynomials belong to different generator universes") {}
};

// Exact polynomial in even and odd generators with complex-rational coefficients.
// A default-constructed Poly is zero and carries no universe; constants may also be
// universe-free and combine with any polynomial.
class Poly {
 public:
  using Terms = std::map<Monomial, CRational>;

  Poly() = default;
  Poly(CRational c, UniversePtr u = {});  // NOLINT(google-explicit-constructor)
  static Poly generator(const UniversePtr& u, GeneratorId id);
  static Poly from_terms(UniversePtr u, Terms terms);  // drops zero coefficients

  const UniversePtr& universe() const { return universe_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  CRational constant_term() const;
  CRational coefficient(const Monomial& m) const;

  // Zero counts as both even and odd.
  bool is_even() const;
  bool is_odd() const;
  bool is_homogeneous() const { return is_even() || is_odd(); }
  std::optional<Parity> parity() const;  // nullopt for zero or mixed parity

  bool contains(GeneratorId id) const;
  std::vector<GeneratorId> generators() const;  // ascending

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o) { return *this = *this * o; }
  Poly& operator*=(const CRational& c);

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(Poly a, const CRational& c) { return a *= c; }
  friend Poly operator*(const CRational& c, Poly a) { return a *= c; }
  Poly operator-() const;

  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }

  std::string to_string() const;

 private:
  void adopt_universe(const UniversePtr& other);
  void add_term(const Monomial& m, const CRational& c);

  UniversePtr universe_;
  Terms terms_;
};

std::ostream& operator<<(std::ostream& os, const Poly& p);

Poly pow(const Poly& base, unsigned exponent);

// f = f_E + f_O.
std::pair<Poly, Poly> parity_split(const Poly& f);

enum class Side { Left, Right };

// Left derivative: delta f = delta(g) * dL f/dg. Right derivative: delta f = dR f/dg * delta(g).
// For even g the side is ignored.
Poly derivative(const Poly& f, GeneratorId g, Side side);

// Replaces generators by polynomials of the same parity (algebra homomorphism).
Poly substitute(const Poly& f, const std::map<GeneratorId, Poly>& values);

// Keeps only the terms free of every listed generator.
Poly drop_terms_with(const Poly& f, const std::vector<GeneratorId>& gens);

struct MixedDerivativeReport {
  bool passed = true;
  std::string violated;  // name of the first failing identity
  Poly lhs;
  Poly rhs;
};

// The four second-derivative identities for odd generators kappa, lambda:
// dL_k dR_l f = dR_l dL_k f, dL_k dL_l f = -dL_l dL_k f, dR_k dR_l f = -dR_l dR_k f,
// and dL_k dL_k f = dR_k dR_k f = 0.
MixedDerivativeReport check_mixed_derivative_identities(const Poly& f, GeneratorId kappa,
                                                        GeneratorId lambda);

}  // namespace gham
