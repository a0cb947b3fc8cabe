#include "gham/graded_algebra.hpp"

#include <functional>

namespace gham {

namespace {

// Argument types per identity: 'E' even, 'A' odd, 'F' arbitrary.
constexpr std::array<const char*, kIdentityCount> kSignature = {"FE", "AA", "EFF", "AEF",
                                                                "AAF", "FEE", "EAA", "AAA"};

unsigned poly_degree(const Poly& p) {
  unsigned d = 0;
  for (const auto& [m, c] : p.terms()) d = std::max(d, m.degree());
  return d;
}

}  // namespace

const std::array<const char*, kIdentityCount>& identity_names() {
  static const std::array<const char*, kIdentityCount> names = {
      "[F1,E1] = -[E1,F1]",
      "[A1,A2] = [A2,A1]",
      "[E1,F1F2] = [E1,F1]F2 + F1[E1,F2]",
      "[A1,E1F2] = [A1,E1]F2 + E1[A1,F2]",
      "[A1,A2F1] = [A1,A2]F1 - A2[A1,F1]",
      "[F1,[E2,E3]] + [E3,[F1,E2]] + [E2,[E3,F1]] = 0",
      "[E1,[A2,A3]] - [A3,[E1,A2]] + [A2,[A3,E1]] = 0",
      "[A1,[A2,A3]] + [A3,[A1,A2]] + [A2,[A3,A1]] = 0",
  };
  return names;
}

bool GradedAlgebraReport::all_passed() const {
  for (const auto& r : identities)
    if (!r.passed) return false;
  return true;
}

Poly identity_residual(std::size_t index, const BracketFn& br, const Poly& x, const Poly& y,
                       const Poly& z) {
  switch (index) {
    case 0: return br(x, y) + br(y, x);
    case 1: return br(x, y) - br(y, x);
    case 2: return br(x, y * z) - br(x, y) * z - y * br(x, z);
    case 3: return br(x, y * z) - br(x, y) * z - y * br(x, z);
    case 4: return br(x, y * z) - br(x, y) * z + y * br(x, z);
    case 5: return br(x, br(y, z)) + br(z, br(x, y)) + br(y, br(z, x));
    case 6: return br(x, br(y, z)) - br(z, br(x, y)) + br(y, br(z, x));
    case 7: return br(x, br(y, z)) + br(z, br(x, y)) + br(y, br(z, x));
    default: throw std::out_of_range("identity index");
  }
}

PolySampler::PolySampler(const PhaseSpace& ps, std::uint64_t seed, unsigned max_degree,
                         unsigned max_terms)
    : ps_(ps), rng_(seed), max_degree_(max_degree), max_terms_(max_terms) {
  for (const auto& pr : ps.pairs()) {
    auto& bucket = pr.kind == PairKind::Even ? even_gens_ : odd_gens_;
    bucket.push_back(pr.position);
    bucket.push_back(pr.momentum);
  }
}

Poly PolySampler::homogeneous(Parity parity) {
  const UniversePtr& u = ps_.universe();
  std::uniform_int_distribution<unsigned> n_terms(1, max_terms_);
  std::uniform_int_distribution<unsigned> degree(0, max_degree_);
  std::uniform_int_distribution<long> coef(-3, 3);
  Poly out(CRational(), u);
  unsigned terms = n_terms(rng_);
  for (unsigned t = 0; t < terms; ++t) {
    unsigned deg = degree(rng_);
    unsigned odd_count = 0;
    if (!odd_gens_.empty()) {
      std::uniform_int_distribution<unsigned> pick(0, std::min<unsigned>(deg, odd_gens_.size()));
      odd_count = pick(rng_);
    }
    if ((odd_count % 2 == 1) != (parity == Parity::Odd)) {
      if (odd_count > 0) {
        --odd_count;
      } else if (!odd_gens_.empty() && deg > 0) {
        odd_count = 1;
      } else {
        continue;
      }
    }
    if (even_gens_.empty()) deg = odd_count;
    Poly term(CRational(mpq_class(coef(rng_)), mpq_class(coef(rng_))), u);
    for (unsigned k = 0; k < odd_count; ++k) {
      std::uniform_int_distribution<std::size_t> g(0, odd_gens_.size() - 1);
      term = term * ps_.var(odd_gens_[g(rng_)]);
    }
    for (unsigned k = odd_count; k < deg; ++k) {
      std::uniform_int_distribution<std::size_t> g(0, even_gens_.size() - 1);
      term = term * ps_.var(even_gens_[g(rng_)]);
    }
    out += term;
  }
  return out;
}

Poly PolySampler::even() { return homogeneous(Parity::Even); }
Poly PolySampler::odd() { return homogeneous(Parity::Odd); }
Poly PolySampler::any() { return even() + odd(); }

namespace {

void record(IdentityResult& r, const Poly& residual, std::vector<Poly> args) {
  ++r.checked;
  if (residual.is_zero() || !r.passed) {
    if (!residual.is_zero()) r.passed = false;
    return;
  }
  r.passed = false;
  r.counterexample = Counterexample{std::move(args), residual};
}

void init_names(GradedAlgebraReport& rep) {
  for (std::size_t k = 0; k < kIdentityCount; ++k) rep.identities[k].name = identity_names()[k];
}

}  // namespace

GradedAlgebraReport verify_graded_algebra(const PhaseSpace& ps, const BracketFn& br,
                                          std::size_t samples, std::uint64_t seed,
                                          const ResidualMap& reduce) {
  GradedAlgebraReport rep;
  rep.seed = seed;
  rep.samples = samples;
  init_names(rep);
  PolySampler sampler(ps, seed);
  auto draw = [&sampler](char kind) {
    if (kind == 'E') return sampler.even();
    if (kind == 'A') return sampler.odd();
    return sampler.any();
  };
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t k = 0; k < kIdentityCount; ++k) {
      std::string_view sig = kSignature[k];
      std::vector<Poly> args;
      for (char c : sig) args.push_back(draw(c));
      while (args.size() < 3) args.emplace_back();
      Poly res = identity_residual(k, br, args[0], args[1], args[2]);
      if (reduce) res = reduce(res);
      args.resize(sig.size());
      record(rep.identities[k], res, std::move(args));
    }
  }
  return rep;
}

std::vector<Poly> monomial_basis(const PhaseSpace& ps, unsigned max_degree) {
  std::vector<GeneratorId> evens, odds;
  for (const auto& pr : ps.pairs()) {
    auto& bucket = pr.kind == PairKind::Even ? evens : odds;
    bucket.push_back(pr.position);
    bucket.push_back(pr.momentum);
  }
  std::vector<Poly> out;
  // odd subsets x even multisets
  std::function<void(std::size_t, unsigned, Poly)> even_rec = [&](std::size_t from, unsigned left,
                                                                  Poly acc) {
    out.push_back(acc);
    if (left == 0) return;
    for (std::size_t k = from; k < evens.size(); ++k)
      even_rec(k, left - 1, acc * ps.var(evens[k]));
  };
  std::function<void(std::size_t, unsigned, Poly)> odd_rec = [&](std::size_t from, unsigned used,
                                                                 Poly acc) {
    even_rec(0, max_degree - used, acc);
    if (used == max_degree) return;
    for (std::size_t k = from; k < odds.size(); ++k) odd_rec(k + 1, used + 1, acc * ps.var(odds[k]));
  };
  odd_rec(0, 0, Poly(CRational(1), ps.universe()));
  return out;
}

GradedAlgebraReport verify_graded_algebra_exhaustive(const BracketFn& br,
                                                     const std::vector<Poly>& basis,
                                                     std::optional<unsigned> max_tuple_degree,
                                                     const ResidualMap& reduce) {
  GradedAlgebraReport rep;
  init_names(rep);
  rep.samples = basis.size();
  std::vector<const Poly*> evens, odds, all;
  for (const auto& b : basis) {
    all.push_back(&b);
    (b.is_even() ? evens : odds).push_back(&b);
  }
  auto pool = [&](char c) -> const std::vector<const Poly*>& {
    return c == 'E' ? evens : c == 'A' ? odds : all;
  };
  for (std::size_t k = 0; k < kIdentityCount; ++k) {
    std::string_view sig = kSignature[k];
    const auto& p0 = pool(sig[0]);
    const auto& p1 = pool(sig[1]);
    const auto& p2 = sig.size() > 2 ? pool(sig[2]) : p1;
    for (const Poly* x : p0) {
      unsigned dx = poly_degree(*x);
      for (const Poly* y : p1) {
        unsigned dxy = dx + poly_degree(*y);
        if (sig.size() == 2) {
          if (max_tuple_degree && dxy > *max_tuple_degree) continue;
          Poly res = identity_residual(k, br, *x, *y, Poly());
          if (reduce) res = reduce(res);
          record(rep.identities[k], res, {*x, *y});
          continue;
        }
        for (const Poly* z : p2) {
          if (max_tuple_degree && dxy + poly_degree(*z) > *max_tuple_degree) continue;
          Poly res = identity_residual(k, br, *x, *y, *z);
          if (reduce) res = reduce(res);
          record(rep.identities[k], res, {*x, *y, *z});
        }
      }
    }
  }
  return rep;
}

}  // namespace gham
