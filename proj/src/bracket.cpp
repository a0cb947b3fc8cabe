#include "gham/bracket.hpp"

#include <algorithm>

namespace gham {

const char* to_string(PairKind k) {
  switch (k) {
    case PairKind::Even: return "even";
    case PairKind::OddRight: return "odd-right";
    case PairKind::OddLeft: return "odd-left";
  }
  return "?";
}

Side position_side(PairKind k) { return k == PairKind::OddLeft ? Side::Left : Side::Right; }
Side momentum_side(PairKind k) { return k == PairKind::OddLeft ? Side::Right : Side::Left; }

std::size_t PhaseSpace::add_pair(GeneratorId position, GeneratorId momentum, PairKind kind) {
  const Universe& u = *universe_;
  const Generator& x = u[position];
  const Generator& p = u[momentum];
  Parity want = kind == PairKind::Even ? Parity::Even : Parity::Odd;
  if (x.parity != want || p.parity != want) {
    throw BracketError("pair (" + x.name + ", " + p.name + ") does not match kind " +
                       to_string(kind));
  }
  if (position == momentum) throw BracketError("pair needs two distinct generators");
  if (x.role != GeneratorRole::Coordinate || p.role != GeneratorRole::Coordinate) {
    throw BracketError("pair (" + x.name + ", " + p.name + ") uses a non-coordinate generator");
  }
  if (pair_of(position) || pair_of(momentum)) {
    throw BracketError("generator already belongs to a canonical pair");
  }
  std::size_t idx = pairs_.size();
  pairs_.push_back({position, momentum, kind});
  std::size_t need = std::max(position, momentum) + 1;
  if (owner_.size() < need) owner_.resize(need);
  owner_[position] = idx;
  owner_[momentum] = idx;
  return idx;
}

std::size_t PhaseSpace::add_pair(const std::string& name, PairKind kind) {
  Parity par = kind == PairKind::Even ? Parity::Even : Parity::Odd;
  GeneratorId x = universe_->add(name, par);
  GeneratorId p = universe_->add("p_" + name, par);
  return add_pair(x, p, kind);
}

std::optional<std::size_t> PhaseSpace::pair_of(GeneratorId id) const {
  return id < owner_.size() ? owner_[id] : std::nullopt;
}

bool PhaseSpace::is_position(GeneratorId id) const {
  auto k = pair_of(id);
  return k && pairs_[*k].position == id;
}

void PhaseSpace::check_members(const Poly& f) const {
  if (f.universe() && universe_ && f.universe() != universe_) throw UniverseMismatch();
  for (GeneratorId g : f.generators()) {
    if (pair_of(g)) continue;
    const Generator& gen = (*universe_)[g];
    if (gen.role == GeneratorRole::Central) continue;
    throw BracketError("generator '" + gen.name + "' is not part of the phase space");
  }
}

namespace {

struct Touched {
  std::vector<bool> has;
  explicit Touched(const Poly& f) {
    for (GeneratorId g : f.generators()) {
      if (g >= has.size()) has.resize(g + 1);
      has[g] = true;
    }
  }
  bool operator()(GeneratorId g) const { return g < has.size() && has[g]; }
};

// [F, E] for even E and homogeneous F.
Poly bracket_fe(const Poly& f, const Poly& e, const PhaseSpace& ps) {
  Poly out(CRational(), ps.universe());
  if (f.is_zero() || e.is_zero()) return out;
  Touched tf(f), te(e);
  for (const auto& pr : ps.pairs()) {
    const GeneratorId x = pr.position, p = pr.momentum;
    switch (pr.kind) {
      case PairKind::Even:
        if (tf(x) && te(p)) out += derivative(f, x, Side::Left) * derivative(e, p, Side::Left);
        if (tf(p) && te(x)) out -= derivative(f, p, Side::Left) * derivative(e, x, Side::Left);
        break;
      case PairKind::OddRight:
        if (tf(x) && te(p)) out += derivative(f, x, Side::Right) * derivative(e, p, Side::Left);
        if (te(x) && tf(p)) out -= derivative(e, x, Side::Right) * derivative(f, p, Side::Left);
        break;
      case PairKind::OddLeft:
        if (te(p) && tf(x)) out += derivative(e, p, Side::Right) * derivative(f, x, Side::Left);
        if (tf(p) && te(x)) out -= derivative(f, p, Side::Right) * derivative(e, x, Side::Left);
        break;
    }
  }
  return out;
}

// [A, B] for odd A, B.
Poly bracket_ab(const Poly& a, const Poly& b, const PhaseSpace& ps) {
  Poly out(CRational(), ps.universe());
  if (a.is_zero() || b.is_zero()) return out;
  Touched ta(a), tb(b);
  for (const auto& pr : ps.pairs()) {
    const GeneratorId x = pr.position, p = pr.momentum;
    switch (pr.kind) {
      case PairKind::Even:
        if (ta(x) && tb(p)) out += derivative(a, x, Side::Left) * derivative(b, p, Side::Left);
        if (ta(p) && tb(x)) out -= derivative(a, p, Side::Left) * derivative(b, x, Side::Left);
        break;
      case PairKind::OddRight:
        if (ta(x) && tb(p)) out += derivative(a, x, Side::Right) * derivative(b, p, Side::Left);
        if (tb(x) && ta(p)) out += derivative(b, x, Side::Right) * derivative(a, p, Side::Left);
        break;
      case PairKind::OddLeft:
        if (tb(p) && ta(x)) out -= derivative(b, p, Side::Right) * derivative(a, x, Side::Left);
        if (ta(p) && tb(x)) out -= derivative(a, p, Side::Right) * derivative(b, x, Side::Left);
        break;
    }
  }
  return out;
}

}  // namespace

Poly gpb(const Poly& f, const Poly& g, const PhaseSpace& ps) {
  ps.check_members(f);
  ps.check_members(g);
  auto [fe, fo] = parity_split(f);
  auto [ge, go] = parity_split(g);
  Poly r = bracket_fe(fe, ge, ps);
  r += bracket_fe(fo, ge, ps);
  r -= bracket_fe(go, fe, ps);
  r += bracket_ab(fo, go, ps);
  return r;
}

Poly time_derivative(const Poly& f, const Poly& h_total, const PhaseSpace& ps) {
  if (!h_total.is_even()) throw BracketError("the Hamiltonian must be even");
  return gpb(f, h_total, ps);
}

BracketFn gpb_bracket(const PhaseSpace& ps) {
  return [ps](const Poly& f, const Poly& g) { return gpb(f, g, ps); };
}

}  // namespace gham
