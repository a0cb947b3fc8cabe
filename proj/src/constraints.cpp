#include "gham/constraints.hpp"

#include <algorithm>
#include <set>

namespace gham {

const char* to_string(Stage s) { return s == Stage::Primary ? "primary" : "secondary"; }

const char* to_string(ConstraintClass c) {
  switch (c) {
    case ConstraintClass::First: return "first";
    case ConstraintClass::Second: return "second";
    default: return "unclassified";
  }
}

const char* to_string(BracketKind k) {
  switch (k) {
    case BracketKind::GP: return "gp";
    case BracketKind::GD: return "gd";
    case BracketKind::GD1: return "gd1";
    case BracketKind::GD2: return "gd2";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// model helpers

GeneratorId LagrangianModel::add_position(const std::string& name, PairKind kind) {
  Parity p = kind == PairKind::Even ? Parity::Even : Parity::Odd;
  GeneratorId id = universe->add(name, p);
  GeneratorId vel = universe->add("dot(" + name + ")", p, GeneratorRole::Velocity);
  positions.push_back({id, vel, kind});
  return id;
}

GeneratorId LagrangianModel::add_parameter(const std::string& name) {
  GeneratorId id = universe->add(name, Parity::Even, GeneratorRole::Central);
  parameters.push_back(id);
  return id;
}

Poly LagrangianModel::var(const std::string& name) const {
  auto id = universe->find(name);
  if (!id) throw UnknownGenerator("unknown name '" + name + "'");
  return Poly::generator(universe, *id);
}

Poly LagrangianModel::velocity(const std::string& name) const { return var("dot(" + name + ")"); }

std::vector<std::size_t> ConstraintSet::indices(ConstraintClass cls) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < items.size(); ++k)
    if (items[k].cls == cls) out.push_back(k);
  return out;
}

std::vector<Poly> ConstraintSet::exprs(ConstraintClass cls) const {
  std::vector<Poly> out;
  for (auto k : indices(cls)) out.push_back(items[k].expr);
  return out;
}

// ---------------------------------------------------------------------------
// ConstraintIdeal

ConstraintIdeal::Added ConstraintIdeal::add(const Poly& constraint) {
  Poly r = reduce(constraint);
  if (r.is_zero()) return {Outcome::Dependent, r, std::nullopt};
  if (r.is_constant()) return {Outcome::Inconsistent, r, std::nullopt};
  if (!r.is_homogeneous()) {
    throw UnsupportedConfiguration("constraint " + r.to_string() + " has no definite parity");
  }
  const Universe& u = *ps_.universe();
  std::vector<GeneratorId> momenta, positions;
  for (GeneratorId g : r.generators()) {
    if (!ps_.pair_of(g)) continue;
    // linear with constant coefficient: the only term containing g is alpha*g
    std::size_t hits = 0;
    bool bare = false;
    for (const auto& [m, c] : r.terms()) {
      if (!m.contains(g)) continue;
      ++hits;
      bare = m.degree() == 1 && m.exponent(g) == 1;
    }
    if (hits != 1 || !bare) continue;
    (ps_.is_position(g) ? positions : momenta).push_back(g);
  }
  if (momenta.empty() && positions.empty()) {
    throw UnsupportedConfiguration("constraint " + r.to_string() +
                                   " is not linear in any canonical variable");
  }
  GeneratorId pivot = momenta.empty() ? positions.front() : momenta.front();
  Monomial pm;
  if (u[pivot].parity == Parity::Even) {
    pm.even.emplace_back(pivot, 1);
  } else {
    pm.odd.push_back(pivot);
  }
  CRational alpha = r.coefficient(pm);
  Poly rest = r - alpha * Poly::generator(ps_.universe(), pivot);
  Poly rule = rest * (-alpha.inverse());
  for (auto& [g, v] : rules_) v = substitute(v, {{pivot, rule}});
  rules_.emplace(pivot, rule);
  return {Outcome::Independent, r * alpha.inverse(), pivot};
}

ConstraintIdeal ideal_of(const ConstraintSet& s, const PhaseSpace& ps) {
  ConstraintIdeal ideal(ps);
  for (const auto& c : s.items) ideal.add(c.expr);
  return ideal;
}

// ---------------------------------------------------------------------------
// Legendre transform

namespace {

bool is_velocity(const Universe& u, GeneratorId g) { return u[g].role == GeneratorRole::Velocity; }

}  // namespace

LegendreResult legendre(const LagrangianModel& model) {
  const UniversePtr& u = model.universe;
  const Poly& L = model.lagrangian;
  if (!L.is_even()) throw UnsupportedConfiguration("the Lagrangian must be even");

  LegendreResult out{PhaseSpace(u), {}, {}, Poly(CRational(), u), {}};
  std::vector<GeneratorId> momenta;
  for (const auto& pos : model.positions) {
    const Generator& g = (*u)[pos.id];
    std::string pname = "p_" + g.name;
    auto existing = u->find(pname);
    GeneratorId p = existing ? *existing : u->add(pname, g.parity);
    out.ps.add_pair(pos.id, p, pos.kind);
    momenta.push_back(p);
  }

  // Shape of the velocity dependence.
  std::vector<GeneratorId> vel_ids;
  for (const auto& pos : model.positions) vel_ids.push_back(pos.velocity);
  for (const auto& [m, c] : L.terms()) {
    unsigned even_deg = 0, odd_deg = 0;
    bool other = false;
    for (const auto& [g, e] : m.even) {
      if (is_velocity(*u, g)) {
        even_deg += e;
      } else if ((*u)[g].role != GeneratorRole::Central) {
        other = true;
      }
    }
    for (GeneratorId g : m.odd) {
      if (is_velocity(*u, g)) {
        ++odd_deg;
      } else {
        other = true;
      }
    }
    Poly term = Poly::from_terms(u, {{m, c}});
    if (odd_deg > 1 || (odd_deg == 1 && even_deg > 0)) {
      throw UnsupportedConfiguration("odd velocities must enter linearly: " + term.to_string());
    }
    if (even_deg > 2) {
      throw UnsupportedConfiguration("velocity dependence beyond quadratic: " + term.to_string());
    }
    bool central_only = true;
    for (const auto& [g, e] : m.even)
      if (!is_velocity(*u, g)) central_only = false;
    if (even_deg == 2 && (other || !central_only)) {
      throw UnsupportedConfiguration("velocity Hessian must be constant: " + term.to_string());
    }
  }

  std::vector<std::size_t> even_idx, odd_idx;
  for (std::size_t i = 0; i < model.positions.size(); ++i)
    (model.positions[i].kind == PairKind::Even ? even_idx : odd_idx).push_back(i);

  // momentum definitions
  for (std::size_t i = 0; i < model.positions.size(); ++i) {
    const auto& pos = model.positions[i];
    Side side = pos.kind == PairKind::OddLeft ? Side::Left : Side::Right;
    out.momenta.emplace_back(momenta[i], derivative(L, pos.velocity, side));
  }

  const std::size_t ne = even_idx.size();
  ExactMatrix hess(ne, ne);
  std::vector<Poly> b(ne);
  std::vector<GeneratorId> even_vel;
  for (auto i : even_idx) even_vel.push_back(model.positions[i].velocity);
  for (std::size_t a = 0; a < ne; ++a) {
    const Poly& p_def = out.momenta[even_idx[a]].second;
    for (std::size_t c = 0; c < ne; ++c) {
      Poly h = derivative(p_def, even_vel[c], Side::Left);
      if (!h.is_constant()) throw UnsupportedConfiguration("velocity Hessian must be constant");
      hess(a, c) = h.constant_term();
    }
    b[a] = drop_terms_with(p_def, even_vel);
  }

  // primary constraints: left null space of the Hessian, then odd momenta
  ConstraintIdeal ideal(out.ps);
  auto add_primary = [&](Poly expr, bool left) {
    auto added = ideal.add(expr);
    if (added.outcome == ConstraintIdeal::Outcome::Inconsistent) {
      throw InconsistentDynamics("primary constraint " + expr.to_string() + " is contradictory");
    }
    if (added.outcome == ConstraintIdeal::Outcome::Dependent) return;
    Constraint c;
    c.expr = std::move(expr);
    c.multiplier_left = left;
    out.primary.push_back(std::move(c));
  };
  for (const auto& lam : null_space(hess.transpose())) {
    Poly expr(CRational(), u);
    for (std::size_t a = 0; a < ne; ++a) {
      if (lam[a].is_zero()) continue;
      expr += lam[a] * (Poly::generator(u, momenta[even_idx[a]]) - b[a]);
    }
    add_primary(std::move(expr), false);
  }
  for (auto i : odd_idx) {
    const auto& def = out.momenta[i].second;
    auto gens = def.generators();
    if (std::any_of(gens.begin(), gens.end(), [&](GeneratorId g) { return is_velocity(*u, g); })) {
      throw UnsupportedConfiguration("odd momentum depends on velocities");
    }
    add_primary(Poly::generator(u, momenta[i]) - def,
                model.positions[i].kind == PairKind::OddLeft);
  }

  // solve pivot velocities through an invertible block of the Hessian
  RowEchelon e = rref(hess);
  std::vector<std::size_t> piv = e.pivots, free;
  for (std::size_t c = 0; c < ne; ++c)
    if (std::find(piv.begin(), piv.end(), c) == piv.end()) free.push_back(c);
  std::map<GeneratorId, Poly> vel_rule;
  if (!piv.empty()) {
    auto inv = inverse(hess.submatrix(piv, piv));
    if (!inv) throw UnsupportedConfiguration("velocity Hessian block is singular");
    for (std::size_t r = 0; r < piv.size(); ++r) {
      Poly v(CRational(), u);
      for (std::size_t c = 0; c < piv.size(); ++c) {
        const CRational& w = (*inv)(r, c);
        if (w.is_zero()) continue;
        std::size_t a = piv[c];
        Poly rhs = Poly::generator(u, momenta[even_idx[a]]) - b[a];
        for (auto f : free) rhs -= hess(a, f) * Poly::generator(u, even_vel[f]);
        v += w * rhs;
      }
      vel_rule[even_vel[piv[r]]] = v;
    }
  }

  Poly h_full(CRational(), u);
  for (std::size_t i = 0; i < model.positions.size(); ++i) {
    const auto& pos = model.positions[i];
    Poly p = Poly::generator(u, momenta[i]);
    Poly v = Poly::generator(u, pos.velocity);
    h_full += pos.kind == PairKind::OddLeft ? v * p : p * v;
  }
  h_full -= L;
  h_full = substitute(h_full, vel_rule);

  std::map<GeneratorId, Poly> zero_free;
  for (const auto& pos : model.positions) {
    if (vel_rule.contains(pos.velocity)) continue;
    Poly dh = derivative(h_full, pos.velocity, Side::Left);
    if (!ideal.weakly_zero(dh)) {
      throw UnsupportedConfiguration("Hamiltonian depends on velocity '" +
                                     (*u)[pos.velocity].name + "' off the constraint surface");
    }
    zero_free.emplace(pos.velocity, Poly());
  }
  out.hamiltonian = substitute(h_full, zero_free);
  for (auto& [g, v] : vel_rule) out.solved_velocities[g] = substitute(v, zero_free);
  return out;
}

// ---------------------------------------------------------------------------
// Propagation

Poly place_multiplier(const Constraint& c, const Poly& multiplier) {
  return c.multiplier_left ? multiplier * c.expr : c.expr * multiplier;
}

namespace {

// Left placement for constraints whose pivot is the momentum of a left-type odd pair.
bool left_placement(const PhaseSpace& ps, std::optional<GeneratorId> pivot) {
  if (!pivot) return false;
  auto k = ps.pair_of(*pivot);
  return k && ps.pairs()[*k].kind == PairKind::OddLeft && ps.pairs()[*k].momentum == *pivot;
}

}  // namespace

PropagationResult propagate_constraints(const PhaseSpace& ps, const std::vector<Constraint>& primary,
                                        const Poly& hamiltonian, unsigned max_iterations) {
  const UniversePtr& u = ps.universe();
  PropagationResult res;
  ConstraintIdeal ideal(ps);
  for (const auto& c : primary) {
    auto added = ideal.add(c.expr);
    if (added.outcome == ConstraintIdeal::Outcome::Inconsistent) {
      throw InconsistentDynamics("contradictory Euler-Lagrange equations: " + c.expr.to_string());
    }
    if (added.outcome == ConstraintIdeal::Outcome::Dependent) {
      throw UnsupportedConfiguration("primary constraint " + c.expr.to_string() + " is dependent");
    }
    Constraint k = c;
    k.stage = Stage::Primary;
    k.level = 0;
    res.constraints.items.push_back(k);
  }

  auto& mult = res.multipliers;
  Poly h_total = hamiltonian;
  for (std::size_t m = 0; m < primary.size(); ++m) {
    Parity par = primary[m].expr.is_even() ? Parity::Even : Parity::Odd;
    GeneratorId id = u->add_fresh("u" + std::to_string(m + 1), par, GeneratorRole::Central);
    mult.multipliers.push_back(id);
    h_total += place_multiplier(primary[m], Poly::generator(u, id));
  }
  std::map<GeneratorId, Poly> u_zero;
  for (auto id : mult.multipliers) u_zero.emplace(id, Poly());

  const std::size_t M = primary.size();
  for (unsigned iter = 1;; ++iter) {
    if (iter > max_iterations) {
      throw UnsupportedConfiguration("constraint propagation did not terminate");
    }
    res.iterations = iter;
    const auto& items = res.constraints.items;
    const std::size_t J = items.size();
    ExactMatrix a(J, M);
    std::vector<Poly> rhs(J);
    for (std::size_t j = 0; j < J; ++j) {
      Poly ej = ideal.reduce(gpb(items[j].expr, h_total, ps));
      Poly bj = substitute(ej, u_zero);
      Poly lin = bj;
      for (std::size_t m = 0; m < M; ++m) {
        Poly coef = derivative(ej, mult.multipliers[m], Side::Left);
        if (!coef.is_constant()) {
          throw UnsupportedConfiguration("multiplier coefficient in the consistency condition of " +
                                         items[j].expr.to_string() + " is not constant");
        }
        a(j, m) = coef.constant_term();
        lin += coef * Poly::generator(u, mult.multipliers[m]);
      }
      if (lin != ej) throw UnsupportedConfiguration("consistency condition is not linear in u");
      rhs[j] = -bj;
    }
    PolyLinearSolution sol = solve_linear(a, rhs);
    bool grew = false;
    for (const Poly& ob : sol.obstructions) {
      auto added = ideal.add(ob);
      if (added.outcome == ConstraintIdeal::Outcome::Inconsistent) {
        throw InconsistentDynamics("contradictory Euler-Lagrange equations: consistency requires " +
                                   ob.to_string() + " = 0");
      }
      if (added.outcome == ConstraintIdeal::Outcome::Dependent) continue;
      Constraint c;
      c.expr = added.normalized;
      c.stage = Stage::Secondary;
      c.level = iter;
      c.multiplier_left = left_placement(ps, added.pivot);
      res.constraints.items.push_back(std::move(c));
      grew = true;
    }
    if (!grew) {
      for (auto& p : sol.particular) p = ideal.reduce(p);
      mult.particular = std::move(sol.particular);
      mult.homogeneous_basis = std::move(sol.homogeneous_basis);
      return res;
    }
  }
}

// ---------------------------------------------------------------------------
// Classification

ExactMatrix constraint_gram(const ConstraintSet& s, const PhaseSpace& ps) {
  ConstraintIdeal ideal = ideal_of(s, ps);
  const std::size_t n = s.items.size();
  ExactMatrix g(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      Poly v = ideal.reduce(gpb(s.items[j].expr, s.items[k].expr, ps));
      if (!v.is_constant()) {
        throw UnsupportedConfiguration("bracket of constraints " + s.items[j].expr.to_string() +
                                       " and " + s.items[k].expr.to_string() +
                                       " is not constant on the constraint surface");
      }
      g(j, k) = v.constant_term();
    }
  return g;
}

ConstraintSet classify(const ConstraintSet& s, const PhaseSpace& ps) {
  const std::size_t n = s.items.size();
  ExactMatrix g = constraint_gram(s, ps);
  RowEchelon e = rref(g.transpose());
  std::vector<bool> second(n, false);
  for (auto p : e.pivots) second[p] = true;

  ConstraintSet out;
  out.items = s.items;
  for (std::size_t j = 0; j < n; ++j) {
    Constraint& c = out.items[j];
    if (second[j]) {
      c.cls = ConstraintClass::Second;
      continue;
    }
    // null vector of G^T with a 1 in slot j
    c.cls = ConstraintClass::First;
    for (std::size_t r = 0; r < e.pivots.size(); ++r) {
      const CRational& w = e.reduced(r, j);
      if (w.is_zero()) continue;
      const Constraint& other = s.items[e.pivots[r]];
      c.expr -= w * other.expr;
      if (other.stage == Stage::Secondary) {
        c.stage = Stage::Secondary;
        c.level = std::max(c.level, other.level);
      }
    }
  }

  std::vector<std::size_t> rr = out.indices(ConstraintClass::Second);
  out.c = g.submatrix(rr, rr);
  auto inv = inverse(out.c);
  if (!inv) throw UnsupportedConfiguration("second-class constraint matrix is singular");
  if (!(out.c * *inv == ExactMatrix::identity(rr.size()))) {
    throw UnsupportedConfiguration("second-class constraint matrix inverse failed verification");
  }
  out.c_inverse = *inv;
  return out;
}

// ---------------------------------------------------------------------------
// Hamiltonians and gauge transformations

HamiltonianSuite build_hamiltonian_suite(const PhaseSpace& ps, const Poly& hamiltonian,
                                         const std::vector<Constraint>& primary,
                                         const ConstraintSet& classified,
                                         const MultiplierSolution& multipliers) {
  const UniversePtr& u = ps.universe();
  HamiltonianSuite s;
  s.canonical = hamiltonian;
  s.first_class = hamiltonian;
  for (std::size_t m = 0; m < primary.size(); ++m) {
    if (multipliers.particular[m].is_zero()) continue;
    s.first_class += place_multiplier(primary[m], multipliers.particular[m]);
  }
  s.total = s.first_class;
  for (std::size_t a = 0; a < multipliers.homogeneous_basis.size(); ++a) {
    const auto& va = multipliers.homogeneous_basis[a];
    Constraint phi;
    phi.expr = Poly(CRational(), u);
    bool placed = false;
    for (std::size_t m = 0; m < primary.size(); ++m) {
      if (va[m].is_zero()) continue;
      phi.expr += va[m] * primary[m].expr;
      if (!placed) {
        phi.multiplier_left = primary[m].multiplier_left;
        placed = true;
      }
    }
    Parity par = phi.expr.is_even() ? Parity::Even : Parity::Odd;
    GeneratorId v = u->add_fresh("v" + std::to_string(a + 1), par, GeneratorRole::Central);
    s.v.push_back(v);
    s.gauge_generators.push_back(phi.expr);
    s.total += place_multiplier(phi, Poly::generator(u, v));
  }
  s.extended = s.first_class;
  std::size_t b = 0;
  for (const auto& c : classified.items) {
    if (c.cls != ConstraintClass::First) continue;
    Parity par = c.expr.is_even() ? Parity::Even : Parity::Odd;
    GeneratorId w = u->add_fresh("w" + std::to_string(++b), par, GeneratorRole::Central);
    s.w.push_back(w);
    s.extended += place_multiplier(c, Poly::generator(u, w));
  }
  s.tau = u->add_fresh("tau", Parity::Even, GeneratorRole::Central);
  return s;
}

Poly gauge_transform(const Poly& f, const std::map<std::size_t, Poly>& dv, int order,
                     const HamiltonianSuite& suite, const ConstraintSet& classified,
                     const PhaseSpace& ps, const std::map<std::size_t, Poly>& base_v) {
  if (order != 1 && order != 2) throw std::invalid_argument("gauge transform order must be 1 or 2");
  auto check_index = [&](std::size_t a) {
    if (a >= classified.items.size()) throw std::invalid_argument("constraint index out of range");
    const auto& c = classified.items[a];
    if (c.cls != ConstraintClass::First || c.stage != Stage::Primary) {
      throw std::invalid_argument("gauge parameters must be attached to first-class primary "
                                  "constraints; " + c.expr.to_string() + " is not");
    }
  };
  for (const auto& [a, x] : dv) check_index(a);
  for (const auto& [a, x] : base_v) check_index(a);

  const UniversePtr& u = ps.universe();
  Poly tau = Poly::generator(u, suite.tau);
  auto phi = [&](std::size_t a) -> const Poly& { return classified.items[a].expr; };
  auto br = [&](const Poly& x, const Poly& y) { return gpb(x, y, ps); };

  Poly first(CRational(), u);
  for (const auto& [a, d] : dv) first += d * br(f, phi(a));
  Poly out = tau * first;
  if (order == 1) return out;

  const Poly& hp = suite.first_class;
  Poly second(CRational(), u);
  for (const auto& [a, d] : dv) {
    Poly fa = br(f, phi(a));
    second += d * (CRational(2) * br(fa, hp) + br(f, br(hp, phi(a))));
  }
  // (v~ v~ - v v) over all index pairs, with v~ = v + dv
  std::set<std::size_t> idx;
  for (const auto& [a, x] : dv) idx.insert(a);
  for (const auto& [a, x] : base_v) idx.insert(a);
  auto val = [](const std::map<std::size_t, Poly>& m, std::size_t a) {
    auto it = m.find(a);
    return it == m.end() ? Poly() : it->second;
  };
  for (auto a : idx)
    for (auto b : idx) {
      Poly va = val(base_v, a), vb = val(base_v, b);
      Poly ta = va + val(dv, a), tb = vb + val(dv, b);
      Poly w = ta * tb - va * vb;
      if (w.is_zero()) continue;
      second += w * br(br(f, phi(a)), phi(b));
    }
  return out + CRational::fraction(1, 2) * pow(tau, 2) * second;
}

// ---------------------------------------------------------------------------
// Dirac-type brackets

SecondClass SecondClass::from(const ConstraintSet& classified) {
  SecondClass sc;
  sc.chi = classified.exprs(ConstraintClass::Second);
  sc.c_inverse = classified.c_inverse;
  if (sc.c_inverse.rows() != sc.chi.size()) {
    throw std::invalid_argument("constraint set is not classified");
  }
  // uniform parity within groups that fail to commute across groups
  for (std::size_t i = 0; i < sc.chi.size(); ++i)
    for (std::size_t j = 0; j < sc.chi.size(); ++j) {
      if (sc.chi[i].is_even() != sc.chi[j].is_even() && !sc.c_inverse(i, j).is_zero()) {
        throw UnsupportedConfiguration("second-class constraints of different parity do not "
                                       "commute weakly");
      }
    }
  return sc;
}

namespace {

// sum over (b, b') of left(b) * Cinv(b, b') * right(b')
Poly contract(const std::vector<Poly>& left, const ExactMatrix& cinv, const std::vector<Poly>& right,
              const UniversePtr& u) {
  Poly acc(CRational(), u);
  for (std::size_t b = 0; b < left.size(); ++b) {
    if (left[b].is_zero()) continue;
    for (std::size_t bp = 0; bp < right.size(); ++bp) {
      const CRational& w = cinv(b, bp);
      if (w.is_zero() || right[bp].is_zero()) continue;
      acc += left[b] * (w * right[bp]);
    }
  }
  return acc;
}

}  // namespace

Poly gdb(const Poly& f, const Poly& g, const SecondClass& sc, const PhaseSpace& ps) {
  std::vector<Poly> fl, gr;
  for (const auto& chi : sc.chi) {
    fl.push_back(gpb(f, chi, ps));
    gr.push_back(gpb(chi, g, ps));
  }
  return gpb(f, g, ps) - contract(fl, sc.c_inverse, gr, ps.universe());
}

Poly gd1(const Poly& f, const Poly& g, const SecondClass& sc, const PhaseSpace& ps) {
  std::vector<Poly> fl, gr;
  for (const auto& chi : sc.chi) {
    fl.push_back(gpb(chi, f, ps));
    gr.push_back(gpb(chi, g, ps));
  }
  return gpb(f, g, ps) + contract(fl, sc.c_inverse, gr, ps.universe());
}

Poly gd2(const Poly& f, const Poly& g, const SecondClass& sc, const PhaseSpace& ps) {
  // - sum [chi_b', G] C^{b b'} [F, chi_b]
  const std::size_t n = sc.chi.size();
  Poly acc(CRational(), ps.universe());
  std::vector<Poly> fchi, chig;
  for (const auto& chi : sc.chi) {
    fchi.push_back(gpb(f, chi, ps));
    chig.push_back(gpb(chi, g, ps));
  }
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t bp = 0; bp < n; ++bp) {
      const CRational& w = sc.c_inverse(b, bp);
      if (w.is_zero()) continue;
      acc += chig[bp] * (w * fchi[b]);
    }
  return gpb(f, g, ps) - acc;
}

BracketFn make_bracket(BracketKind k, const SecondClass& sc, const PhaseSpace& ps) {
  switch (k) {
    case BracketKind::GP: return gpb_bracket(ps);
    case BracketKind::GD: return [sc, ps](const Poly& f, const Poly& g) { return gdb(f, g, sc, ps); };
    case BracketKind::GD1: return [sc, ps](const Poly& f, const Poly& g) { return gd1(f, g, sc, ps); };
    case BracketKind::GD2: return [sc, ps](const Poly& f, const Poly& g) { return gd2(f, g, sc, ps); };
  }
  throw std::invalid_argument("bracket kind");
}

// ---------------------------------------------------------------------------
// Naive derivation

Poly naive_pb(const Poly& f, const Poly& g, const PhaseSpace& ps) {
  Poly out(CRational(), ps.universe());
  for (const auto& pr : ps.pairs()) {
    out += derivative(f, pr.position, Side::Left) * derivative(g, pr.momentum, Side::Left);
    out -= derivative(f, pr.momentum, Side::Left) * derivative(g, pr.position, Side::Left);
  }
  return out;
}

NaiveCheck naive_quantization_check(const LagrangianModel& model, const std::string& theta,
                                    const std::string& thetabar) {
  Analysis an = analyze(model);
  const PhaseSpace& ps = an.legendre.ps;
  const UniversePtr& u = model.universe;
  GeneratorId th = model.var(theta).generators().front();
  GeneratorId tb = model.var(thetabar).generators().front();
  auto k = ps.pair_of(th);
  if (!k || ps.pairs()[*k].kind != PairKind::OddRight) {
    throw std::invalid_argument("'" + theta + "' must be a right-type odd position");
  }
  GeneratorId pi = ps.pairs()[*k].momentum;
  // find pi - c*thetabar among the primaries and solve for thetabar
  std::optional<Poly> tb_expr;
  for (const auto& c : an.legendre.primary) {
    Poly alpha = derivative(c.expr, pi, Side::Left);
    Poly beta = derivative(c.expr, tb, Side::Left);
    if (!alpha.is_constant() || !beta.is_constant() || alpha.is_zero() || beta.is_zero()) continue;
    Poly lin = alpha * Poly::generator(u, pi) + beta * Poly::generator(u, tb);
    if (lin != c.expr) continue;
    tb_expr = Poly::generator(u, pi) * (-(alpha.constant_term() / beta.constant_term()));
    break;
  }
  if (!tb_expr) {
    throw UnsupportedConfiguration("no primary constraint expresses '" + thetabar + "' through the "
                                   "momentum of '" + theta + "'");
  }
  NaiveCheck r;
  Poly t = Poly::generator(u, th), tbv = Poly::generator(u, tb);
  r.naive_forward = naive_pb(t, *tb_expr, ps);
  r.naive_reverse = naive_pb(*tb_expr, t, ps);
  r.gdb_forward = gdb(t, tbv, an.second_class, ps);
  r.gdb_reverse = gdb(tbv, t, an.second_class, ps);
  r.forward_matches = r.naive_forward == r.gdb_forward;
  r.reverse_matches = r.naive_reverse == r.gdb_reverse;
  return r;
}

namespace {

LagrangianModel oscillator(bool symmetrized) {
  LagrangianModel m;
  m.add_position("theta", PairKind::OddRight);
  m.add_position("thetabar", PairKind::OddLeft);
  Poly mass = m.var(m.add_parameter("m"));
  Poly t = m.var("theta"), tb = m.var("thetabar");
  Poly kinetic = symmetrized ? CRational::fraction(1, 2) * CRational::i() *
                                   (tb * m.velocity("theta") - m.velocity("thetabar") * t)
                             : CRational::i() * tb * m.velocity("theta");
  m.lagrangian = kinetic - mass * tb * t;
  return m;
}

}  // namespace

int FragilityTable::matching_cells() const {
  return int(simple.forward_matches) + int(simple.reverse_matches) +
         int(symmetrized.forward_matches) + int(symmetrized.reverse_matches);
}

FragilityTable naive_fragility_table() {
  return {naive_quantization_check(oscillator(false), "theta", "thetabar"),
          naive_quantization_check(oscillator(true), "theta", "thetabar")};
}

// ---------------------------------------------------------------------------
// Euler-Lagrange equivalence

EulerLagrangeReport euler_lagrange_check(const LagrangianModel& model, const LegendreResult& leg,
                                         const ConstraintSet& constraints, const Poly& h_total) {
  const PhaseSpace& ps = leg.ps;
  ConstraintIdeal ideal = ideal_of(constraints, ps);
  std::map<GeneratorId, Poly> flow;
  for (const auto& pos : model.positions)
    flow.emplace(pos.velocity, gpb(Poly::generator(ps.universe(), pos.id), h_total, ps));
  EulerLagrangeReport rep;
  for (std::size_t i = 0; i < model.positions.size(); ++i) {
    const auto& pos = model.positions[i];
    const auto& [p, def] = leg.momenta[i];
    const std::string& name = (*ps.universe())[pos.id].name;
    Poly pv = Poly::generator(ps.universe(), p);
    Poly r1 = ideal.reduce(substitute(def, flow) - pv);
    if (!r1.is_zero()) rep.failures.push_back("momentum of " + name + ": " + r1.to_string());
    Side side = pos.kind == PairKind::OddLeft ? Side::Left : Side::Right;
    Poly force = substitute(derivative(model.lagrangian, pos.id, side), flow);
    Poly r2 = ideal.reduce(gpb(pv, h_total, ps) - force);
    if (!r2.is_zero()) rep.failures.push_back("equation of " + name + ": " + r2.to_string());
  }
  rep.passed = rep.failures.empty();
  return rep;
}

Analysis analyze(const LagrangianModel& model) {
  Analysis a;
  a.legendre = legendre(model);
  const PhaseSpace& ps = a.legendre.ps;
  a.propagation = propagate_constraints(ps, a.legendre.primary, a.legendre.hamiltonian);
  a.classified = classify(a.propagation.constraints, ps);
  a.suite = build_hamiltonian_suite(ps, a.legendre.hamiltonian, a.legendre.primary, a.classified,
                                    a.propagation.multipliers);
  a.second_class = SecondClass::from(a.classified);
  return a;
}

}  // namespace gham
