#include "gham/poly.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

namespace gham {

// ---------------------------------------------------------------------------
// Monomial

int Monomial::from_odd_sequence(std::vector<GeneratorId> factors, Monomial& out) {
  out = Monomial{};
  // Insertion sort counting transpositions.
  int sign = 1;
  for (std::size_t i = 1; i < factors.size(); ++i) {
    for (std::size_t j = i; j > 0 && factors[j - 1] >= factors[j]; --j) {
      if (factors[j - 1] == factors[j]) return 0;
      std::swap(factors[j - 1], factors[j]);
      sign = -sign;
    }
  }
  out.odd = std::move(factors);
  return sign;
}

unsigned Monomial::degree() const {
  unsigned d = static_cast<unsigned>(odd.size());
  for (const auto& [id, e] : even) d += e;
  return d;
}

unsigned Monomial::exponent(GeneratorId id) const {
  for (const auto& [g, e] : even) {
    if (g == id) return e;
  }
  return std::binary_search(odd.begin(), odd.end(), id) ? 1u : 0u;
}

std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
  if (auto c = a.degree() <=> b.degree(); c != 0) return c;
  if (auto c = a.odd <=> b.odd; c != 0) return c;
  return a.even <=> b.even;
}

int multiply(const Monomial& a, const Monomial& b, Monomial& out) {
  out.odd.clear();
  out.odd.reserve(a.odd.size() + b.odd.size());
  // Moving each factor of b left past the larger factors of a.
  int swaps = 0;
  std::size_t i = 0, j = 0;
  while (i < a.odd.size() || j < b.odd.size()) {
    if (j == b.odd.size() || (i < a.odd.size() && a.odd[i] < b.odd[j])) {
      out.odd.push_back(a.odd[i++]);
    } else if (i == a.odd.size() || b.odd[j] < a.odd[i]) {
      swaps += static_cast<int>(a.odd.size() - i);
      out.odd.push_back(b.odd[j++]);
    } else {
      return 0;  // repeated odd factor
    }
  }

  out.even.clear();
  out.even.reserve(a.even.size() + b.even.size());
  i = j = 0;
  while (i < a.even.size() || j < b.even.size()) {
    if (j == b.even.size() || (i < a.even.size() && a.even[i].first < b.even[j].first)) {
      out.even.push_back(a.even[i++]);
    } else if (i == a.even.size() || b.even[j].first < a.even[i].first) {
      out.even.push_back(b.even[j++]);
    } else {
      out.even.emplace_back(a.even[i].first, a.even[i].second + b.even[j].second);
      ++i;
      ++j;
    }
  }
  return swaps % 2 ? -1 : 1;
}

// ---------------------------------------------------------------------------
// Poly

Poly::Poly(CRational c, UniversePtr u) : universe_(std::move(u)) {
  if (!c.is_zero()) terms_.emplace(Monomial::unit(), std::move(c));
}

Poly Poly::generator(const UniversePtr& u, GeneratorId id) {
  const Generator& g = (*u)[id];
  Poly p;
  p.universe_ = u;
  Monomial m;
  if (g.parity == Parity::Even) {
    m.even.emplace_back(id, 1);
  } else {
    m.odd.push_back(id);
  }
  p.terms_.emplace(std::move(m), CRational(1));
  return p;
}

Poly Poly::from_terms(UniversePtr u, Terms terms) {
  Poly p;
  p.universe_ = std::move(u);
  for (auto& [m, c] : terms) {
    if (!c.is_zero()) p.terms_.emplace(m, std::move(c));
  }
  return p;
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_unit());
}

CRational Poly::constant_term() const { return coefficient(Monomial::unit()); }

CRational Poly::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? CRational() : it->second;
}

bool Poly::is_even() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const auto& t) { return t.first.parity() == Parity::Even; });
}

bool Poly::is_odd() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const auto& t) { return t.first.parity() == Parity::Odd; });
}

std::optional<Parity> Poly::parity() const {
  if (terms_.empty()) return std::nullopt;
  if (is_even()) return Parity::Even;
  if (is_odd()) return Parity::Odd;
  return std::nullopt;
}

bool Poly::contains(GeneratorId id) const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [id](const auto& t) { return t.first.contains(id); });
}

std::vector<GeneratorId> Poly::generators() const {
  std::vector<GeneratorId> out;
  for (const auto& [m, c] : terms_) {
    for (const auto& [g, e] : m.even) out.push_back(g);
    out.insert(out.end(), m.odd.begin(), m.odd.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void Poly::adopt_universe(const UniversePtr& other) {
  if (!other) return;
  if (!universe_) {
    universe_ = other;
  } else if (universe_ != other) {
    throw UniverseMismatch();
  }
}

void Poly::add_term(const Monomial& m, const CRational& c) {
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Poly& Poly::operator+=(const Poly& o) {
  adopt_universe(o.universe_);
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  adopt_universe(o.universe_);
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Poly& Poly::operator*=(const CRational& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& [m, v] : r.terms_) v = -v;
  return r;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly r;
  r.universe_ = a.universe_;
  r.adopt_universe(b.universe_);
  Monomial m;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      int s = multiply(ma, mb, m);
      if (s == 0) continue;
      CRational c = ca * cb;
      if (s < 0) c = -c;
      r.add_term(m, c);
    }
  }
  return r;
}

namespace {

std::string monomial_text(const Monomial& m, const Universe* u) {
  std::string s;
  auto name = [u](GeneratorId id) {
    return u ? (*u)[id].name : "g" + std::to_string(id);
  };
  for (const auto& [g, e] : m.even) {
    if (!s.empty()) s += '*';
    s += name(g);
    if (e > 1) s += "^" + std::to_string(e);
  }
  for (GeneratorId g : m.odd) {
    if (!s.empty()) s += '*';
    s += name(g);
  }
  return s;
}

}  // namespace

std::string Poly::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    CRational coef = c;
    bool negative = false;
    // Pull a leading minus out of purely real or purely imaginary coefficients.
    if ((c.is_real() && sgn(c.real()) < 0) || (sgn(c.real()) == 0 && sgn(c.imag()) < 0)) {
      negative = true;
      coef = -c;
    }
    if (first) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    std::string mono = monomial_text(m, universe_.get());
    if (mono.empty()) {
      out += coef.to_string();
    } else if (coef.is_one()) {
      out += mono;
    } else {
      out += coef.to_string() + "*" + mono;
    }
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const Poly& p) { return os << p.to_string(); }

Poly pow(const Poly& base, unsigned exponent) {
  Poly r(CRational(1), base.universe());
  for (unsigned k = 0; k < exponent; ++k) r = r * base;
  return r;
}

std::pair<Poly, Poly> parity_split(const Poly& f) {
  Poly::Terms even, odd;
  for (const auto& [m, c] : f.terms()) {
    (m.parity() == Parity::Even ? even : odd).emplace(m, c);
  }
  return {Poly::from_terms(f.universe(), std::move(even)),
          Poly::from_terms(f.universe(), std::move(odd))};
}

Poly derivative(const Poly& f, GeneratorId g, Side side) {
  if (f.universe()) (void)(*f.universe())[g];  // validates the id
  Poly::Terms out;
  for (const auto& [m, c] : f.terms()) {
    auto odd_it = std::lower_bound(m.odd.begin(), m.odd.end(), g);
    if (odd_it != m.odd.end() && *odd_it == g) {
      auto pos = static_cast<std::size_t>(odd_it - m.odd.begin());
      std::size_t hops = side == Side::Left ? pos : m.odd.size() - 1 - pos;
      Monomial d = m;
      d.odd.erase(d.odd.begin() + static_cast<std::ptrdiff_t>(pos));
      CRational v = hops % 2 ? -c : c;
      auto [it, inserted] = out.try_emplace(std::move(d), v);
      if (!inserted) it->second += v;
      continue;
    }
    for (std::size_t k = 0; k < m.even.size(); ++k) {
      if (m.even[k].first != g) continue;
      Monomial d = m;
      unsigned e = d.even[k].second;
      if (e == 1) {
        d.even.erase(d.even.begin() + static_cast<std::ptrdiff_t>(k));
      } else {
        d.even[k].second = e - 1;
      }
      CRational v = c * CRational(static_cast<long>(e));
      auto [it, inserted] = out.try_emplace(std::move(d), v);
      if (!inserted) it->second += v;
      break;
    }
  }
  return Poly::from_terms(f.universe(), std::move(out));
}

Poly substitute(const Poly& f, const std::map<GeneratorId, Poly>& values) {
  if (values.empty()) return f;
  for (const auto& [g, v] : values) {
    if (!f.universe() || v.is_zero()) continue;
    Parity p = (*f.universe())[g].parity;
    if (!(p == Parity::Even ? v.is_even() : v.is_odd())) {
      throw std::invalid_argument("substitution for '" + (*f.universe())[g].name +
                                  "' does not preserve parity");
    }
  }
  const UniversePtr& u = f.universe();
  Poly out(CRational(), u);
  for (const auto& [m, c] : f.terms()) {
    Poly term(c, u);
    Monomial rest;
    for (const auto& [g, e] : m.even) {
      auto it = values.find(g);
      if (it == values.end()) {
        rest.even.emplace_back(g, e);
      } else {
        term = term * pow(it->second, e);
      }
    }
    if (!rest.even.empty()) {
      term = term * Poly::from_terms(u, {{rest, CRational(1)}});
    }
    for (GeneratorId g : m.odd) {
      auto it = values.find(g);
      if (it == values.end()) {
        term = term * Poly::generator(u, g);
      } else {
        term = term * it->second;
      }
    }
    out += term;
  }
  return out;
}

Poly drop_terms_with(const Poly& f, const std::vector<GeneratorId>& gens) {
  Poly::Terms kept;
  for (const auto& [m, c] : f.terms()) {
    bool hit = std::any_of(gens.begin(), gens.end(), [&m](GeneratorId g) { return m.contains(g); });
    if (!hit) kept.emplace(m, c);
  }
  return Poly::from_terms(f.universe(), std::move(kept));
}

MixedDerivativeReport check_mixed_derivative_identities(const Poly& f, GeneratorId kappa,
                                                        GeneratorId lambda) {
  if (f.universe()) {
    for (GeneratorId g : {kappa, lambda}) {
      if ((*f.universe())[g].parity != Parity::Odd) {
        throw std::invalid_argument("mixed derivative identities need odd generators, got '" +
                                    (*f.universe())[g].name + "'");
      }
    }
  }
  auto d = [](const Poly& p, GeneratorId g, Side s) { return derivative(p, g, s); };
  MixedDerivativeReport r;
  auto check = [&r](const char* name, Poly lhs, Poly rhs) {
    if (!r.passed || lhs == rhs) return;
    r.passed = false;
    r.violated = name;
    r.lhs = std::move(lhs);
    r.rhs = std::move(rhs);
  };
  const GeneratorId k = kappa, l = lambda;
  check("dL_k dR_l f = dR_l dL_k f", d(d(f, l, Side::Right), k, Side::Left),
        d(d(f, k, Side::Left), l, Side::Right));
  check("dL_k dL_l f = -dL_l dL_k f", d(d(f, l, Side::Left), k, Side::Left),
        -d(d(f, k, Side::Left), l, Side::Left));
  check("dR_k dR_l f = -dR_l dR_k f", d(d(f, l, Side::Right), k, Side::Right),
        -d(d(f, k, Side::Right), l, Side::Right));
  check("dL_k dL_k f = 0", d(d(f, k, Side::Left), k, Side::Left), Poly());
  check("dR_k dR_k f = 0", d(d(f, k, Side::Right), k, Side::Right), Poly());
  return r;
}

}  // namespace gham
