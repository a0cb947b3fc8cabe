#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gham/poly.hpp"

namespace gham {

// OddRight: theta-type position (right derivative), momentum pi differentiated from the left.
// OddLeft: thetabar-type position (left derivative), momentum pibar from the right.
enum class PairKind { Even, OddRight, OddLeft };

const char* to_string(PairKind k);

struct CanonicalPair {
  GeneratorId position;
  GeneratorId momentum;
  PairKind kind;
};

class BracketError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PhaseSpace {
 public:
  PhaseSpace() = default;
  explicit PhaseSpace(UniversePtr u) : universe_(std::move(u)) {}

  // Validates parity against the kind and rejects generators already in use.
  std::size_t add_pair(GeneratorId position, GeneratorId momentum, PairKind kind);
  // Registers "name" and "p_name" in the universe and pairs them.
  std::size_t add_pair(const std::string& name, PairKind kind);

  const UniversePtr& universe() const { return universe_; }
  const std::vector<CanonicalPair>& pairs() const { return pairs_; }
  std::optional<std::size_t> pair_of(GeneratorId id) const;
  bool is_position(GeneratorId id) const;

  Poly var(GeneratorId id) const { return Poly::generator(universe_, id); }
  Poly position(std::size_t pair) const { return var(pairs_.at(pair).position); }
  Poly momentum(std::size_t pair) const { return var(pairs_.at(pair).momentum); }

  // Throws BracketError unless every generator of f is canonical or central.
  void check_members(const Poly& f) const;

 private:
  UniversePtr universe_;
  std::vector<CanonicalPair> pairs_;
  std::vector<std::optional<std::size_t>> owner_;  // generator id -> pair index
};

// Side convention of each member of a pair.
Side position_side(PairKind k);
Side momentum_side(PairKind k);

// Generalized Poisson bracket; non-homogeneous arguments are split by parity.
Poly gpb(const Poly& f, const Poly& g, const PhaseSpace& ps);

// [F, H_T]; H_T must be even. Constraints are not imposed here.
Poly time_derivative(const Poly& f, const Poly& h_total, const PhaseSpace& ps);

using BracketFn = std::function<Poly(const Poly&, const Poly&)>;

BracketFn gpb_bracket(const PhaseSpace& ps);

}  // namespace gham
