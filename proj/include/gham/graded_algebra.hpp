#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gham/bracket.hpp"

namespace gham {

// Seeded generator of random homogeneous polynomials over the canonical generators.
class PolySampler {
 public:
  PolySampler(const PhaseSpace& ps, std::uint64_t seed, unsigned max_degree = 3,
              unsigned max_terms = 3);

  Poly even();
  Poly odd();
  Poly any();  // even + odd part, either may be zero
  Poly of_parity(Parity p) { return p == Parity::Even ? even() : odd(); }

 private:
  Poly homogeneous(Parity p);

  PhaseSpace ps_;
  std::mt19937_64 rng_;
  unsigned max_degree_;
  unsigned max_terms_;
  std::vector<GeneratorId> even_gens_;
  std::vector<GeneratorId> odd_gens_;
};

inline constexpr std::size_t kIdentityCount = 8;

// Display names of the eight identities; E even, A odd, F arbitrary.
const std::array<const char*, kIdentityCount>& identity_names();

struct Counterexample {
  std::vector<Poly> arguments;
  Poly residual;
};

struct IdentityResult {
  std::string name;
  bool passed = true;
  std::size_t checked = 0;
  std::optional<Counterexample> counterexample;  // first failure
};

struct GradedAlgebraReport {
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::array<IdentityResult, kIdentityCount> identities;
  bool all_passed() const;
};

// Optional map applied to residuals before the zero test (e.g. weak reduction).
using ResidualMap = std::function<Poly(const Poly&)>;

// Residual of identity `index` (0-based) for the arguments in the order they appear
// in the identity; for the single-argument-type identities the unused slots are ignored.
Poly identity_residual(std::size_t index, const BracketFn& br, const Poly& x, const Poly& y,
                       const Poly& z);

GradedAlgebraReport verify_graded_algebra(const PhaseSpace& ps, const BracketFn& br,
                                          std::size_t samples, std::uint64_t seed,
                                          const ResidualMap& reduce = {});

// Every homogeneous monomial in the canonical generators of total degree <= max_degree.
std::vector<Poly> monomial_basis(const PhaseSpace& ps, unsigned max_degree);

// Runs every identity on all argument tuples drawn from the given basis. Identities
// are multilinear, so this is a proof on the span. max_tuple_degree, when set, skips
// tuples whose summed degree exceeds it.
GradedAlgebraReport verify_graded_algebra_exhaustive(
    const BracketFn& br, const std::vector<Poly>& basis,
    std::optional<unsigned> max_tuple_degree = std::nullopt, const ResidualMap& reduce = {});

}  // namespace gham
