#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gham/bracket.hpp"
#include "gham/exact_matrix.hpp"

namespace gham {

// Consistency conditions force a nonzero constant to vanish.
class InconsistentDynamics : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside the supported function class (non-linear constraints, velocity
// dependence that is not quadratic with constant Hessian, ...).
class UnsupportedConfiguration : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LagrangianModel {
  struct Position {
    GeneratorId id;
    GeneratorId velocity;
    PairKind kind;
  };

  UniversePtr universe = make_universe();
  std::vector<Position> positions;
  std::vector<GeneratorId> parameters;
  Poly lagrangian;

  // Registers `name` and its velocity `dot(name)`.
  GeneratorId add_position(const std::string& name, PairKind kind);
  GeneratorId add_parameter(const std::string& name);  // central, even
  Poly var(GeneratorId id) const { return Poly::generator(universe, id); }
  Poly var(const std::string& name) const;
  Poly velocity(const std::string& name) const;
};

enum class Stage { Primary, Secondary };
enum class ConstraintClass { Unclassified, First, Second };

const char* to_string(Stage s);
const char* to_string(ConstraintClass c);

struct Constraint {
  Poly expr;
  Stage stage = Stage::Primary;
  unsigned level = 0;  // 0 for primary, iteration number for secondary
  ConstraintClass cls = ConstraintClass::Unclassified;
  // Left placement: the multiplier stands to the left of the constraint in H_T.
  bool multiplier_left = false;
};

struct ConstraintSet {
  std::vector<Constraint> items;
  ExactMatrix c;          // brackets among the second-class constraints
  ExactMatrix c_inverse;  // plain inverse, verified exactly
  std::vector<std::size_t> indices(ConstraintClass cls) const;
  std::vector<Poly> exprs(ConstraintClass cls) const;
};

// Weak equality: reduction modulo the ideal generated by constraints that are
// linear in at least one canonical variable with a constant coefficient.
class ConstraintIdeal {
 public:
  explicit ConstraintIdeal(PhaseSpace ps) : ps_(std::move(ps)) {}

  enum class Outcome { Independent, Dependent, Inconsistent };
  struct Added {
    Outcome outcome;
    Poly normalized;  // reduced constraint scaled so the pivot coefficient is 1
    std::optional<GeneratorId> pivot;
  };
  Added add(const Poly& constraint);

  Poly reduce(const Poly& f) const { return rules_.empty() ? f : substitute(f, rules_); }
  bool weakly_zero(const Poly& f) const { return reduce(f).is_zero(); }
  const std::map<GeneratorId, Poly>& rules() const { return rules_; }

 private:
  PhaseSpace ps_;
  std::map<GeneratorId, Poly> rules_;
};

ConstraintIdeal ideal_of(const ConstraintSet& s, const PhaseSpace& ps);

struct LegendreResult {
  PhaseSpace ps;
  // momentum generator -> its definition in positions and velocities
  std::vector<std::pair<GeneratorId, Poly>> momenta;
  std::vector<Constraint> primary;
  Poly hamiltonian;
  // velocity -> phase-space expression for velocities that could be solved
  std::map<GeneratorId, Poly> solved_velocities;
};

LegendreResult legendre(const LagrangianModel& model);

struct MultiplierSolution {
  std::vector<GeneratorId> multipliers;  // u^m, one per primary constraint
  std::vector<Poly> particular;          // U^m
  std::vector<std::vector<CRational>> homogeneous_basis;  // V_a^m
};

struct PropagationResult {
  ConstraintSet constraints;  // primaries first, then secondaries in discovery order
  MultiplierSolution multipliers;
  unsigned iterations = 0;
};

PropagationResult propagate_constraints(const PhaseSpace& ps, const std::vector<Constraint>& primary,
                                        const Poly& hamiltonian, unsigned max_iterations = 32);

// Places a multiplier next to a constraint according to the constraint's side.
Poly place_multiplier(const Constraint& c, const Poly& multiplier);

// Gram matrix of all constraints, reduced weakly; throws when an entry is not constant.
ExactMatrix constraint_gram(const ConstraintSet& s, const PhaseSpace& ps);

// Constant-coefficient recombination minimizing the number of second-class constraints.
ConstraintSet classify(const ConstraintSet& s, const PhaseSpace& ps);

struct HamiltonianSuite {
  Poly canonical;    // H
  Poly first_class;  // H'
  Poly total;        // H_T
  Poly extended;     // H_E
  std::vector<Poly> gauge_generators;  // phi_a = V_a^m phi_m
  std::vector<GeneratorId> v;          // multipliers of phi_a in H_T
  std::vector<GeneratorId> w;          // multipliers of first-class constraints in H_E
  GeneratorId tau = 0;                 // expansion parameter for gauge transformations
};

HamiltonianSuite build_hamiltonian_suite(const PhaseSpace& ps, const Poly& hamiltonian,
                                         const std::vector<Constraint>& primary,
                                         const ConstraintSet& classified,
                                         const MultiplierSolution& multipliers);

// Change of F under v -> v + dv, expanded to order 1 or 2 in tau. `dv` maps indices of
// first-class primary constraints in `classified` to coefficients; `base_v` defaults to 0.
Poly gauge_transform(const Poly& f, const std::map<std::size_t, Poly>& dv, int order,
                     const HamiltonianSuite& suite, const ConstraintSet& classified,
                     const PhaseSpace& ps, const std::map<std::size_t, Poly>& base_v = {});

enum class BracketKind { GP, GD, GD1, GD2 };

const char* to_string(BracketKind k);

// Second-class data shared by the Dirac-type brackets.
struct SecondClass {
  std::vector<Poly> chi;
  ExactMatrix c_inverse;
  static SecondClass from(const ConstraintSet& classified);
};

Poly gdb(const Poly& f, const Poly& g, const SecondClass& sc, const PhaseSpace& ps);
Poly gd1(const Poly& f, const Poly& g, const SecondClass& sc, const PhaseSpace& ps);
Poly gd2(const Poly& f, const Poly& g, const SecondClass& sc, const PhaseSpace& ps);

BracketFn make_bracket(BracketKind k, const SecondClass& sc, const PhaseSpace& ps);

// Antisymmetric textbook bracket that treats every variable as even.
Poly naive_pb(const Poly& f, const Poly& g, const PhaseSpace& ps);

struct NaiveCheck {
  Poly naive_forward;  // [theta, thetabar] with thetabar eliminated through pi
  Poly naive_reverse;  // [thetabar, theta]
  Poly gdb_forward;
  Poly gdb_reverse;
  bool forward_matches = false;
  bool reverse_matches = false;
};

// theta: right-type odd position whose momentum determines thetabar through a
// primary constraint pi - c*thetabar.
NaiveCheck naive_quantization_check(const LagrangianModel& model, const std::string& theta,
                                    const std::string& thetabar);

struct FragilityTable {
  NaiveCheck simple;       // L = i thetabar dot(theta) - m thetabar theta
  NaiveCheck symmetrized;  // L = (i/2)(thetabar dot(theta) - dot(thetabar) theta) - m thetabar theta
  int matching_cells() const;
};

FragilityTable naive_fragility_table();

struct EulerLagrangeReport {
  bool passed = true;
  std::vector<std::string> failures;
};

// Velocities replaced by [x, H_T]; checks the momentum definitions and
// dot p = dL/dx (right derivative for right-type odd positions, left otherwise) weakly.
EulerLagrangeReport euler_lagrange_check(const LagrangianModel& model, const LegendreResult& leg,
                                         const ConstraintSet& constraints, const Poly& h_total);

// Convenience: legendre -> propagate -> classify -> suite.
struct Analysis {
  LegendreResult legendre;
  PropagationResult propagation;
  ConstraintSet classified;
  HamiltonianSuite suite;
  SecondClass second_class;
};

Analysis analyze(const LagrangianModel& model);

}  // namespace gham
