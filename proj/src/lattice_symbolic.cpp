#include <stdexcept>

#include "gham/lattice.hpp"

namespace gham::lattice {

namespace {

ExactMatrix exact_difference(const Geometry& g, int axis, const CRational& spacing) {
  const int s = g.site_count();
  ExactMatrix d(s, s);
  const CRational h = (CRational(2) * spacing).inverse();
  for (int x = 0; x < s; ++x) {
    d(x, g.shift(x, axis, 1)) += h;
    d(x, g.shift(x, axis, -1)) -= h;
  }
  return d;
}

ExactMatrix exact_kron(const ExactMatrix& sites, const ExactMatrix& spin) {
  ExactMatrix out(4 * sites.rows(), 4 * sites.cols());
  for (std::size_t x = 0; x < sites.rows(); ++x)
    for (std::size_t y = 0; y < sites.cols(); ++y) {
      if (sites(x, y).is_zero()) continue;
      for (int l = 0; l < 4; ++l)
        for (int k = 0; k < 4; ++k) out(4 * x + l, 4 * y + k) = sites(x, y) * spin(l, k);
    }
  return out;
}

ExactMatrix scaled(ExactMatrix m, const CRational& c) {
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t k = 0; k < m.cols(); ++k) m(r, k) *= c;
  return m;
}

ExactMatrix sum(ExactMatrix a, const ExactMatrix& b) {
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t k = 0; k < a.cols(); ++k) a(r, k) += b(r, k);
  return a;
}

// sum_k m(i, k) v[k]
Poly apply_row(const ExactMatrix& m, std::size_t i, const std::vector<Poly>& v, const UniversePtr& u) {
  Poly acc(CRational(), u);
  for (std::size_t k = 0; k < m.cols(); ++k)
    if (!m(i, k).is_zero()) acc += m(i, k) * v[k];
  return acc;
}

struct ExactBlocks {
  ExactMatrix b, psibar_line, pi_line, pibar_line;
};

ExactBlocks exact_blocks(const SymbolicDirac& s, const Geometry& geom) {
  const int n = geom.site_count();
  ExactMatrix id = ExactMatrix::identity(n);
  const ExactMatrix g0 = exact_gamma(0);
  const CRational im = CRational::i() * s.mass;
  ExactBlocks out;
  out.b = scaled(exact_kron(id, g0), -im);
  out.psibar_line = scaled(exact_kron(id, g0.transpose()), im);
  out.pi_line = out.psibar_line;
  out.pibar_line = scaled(exact_kron(id, g0), -im);
  for (int j = 0; j < s.config.dim; ++j) {
    ExactMatrix d = exact_difference(geom, j, s.spacing);
    ExactMatrix gj = exact_gamma(j + 1);
    out.b = sum(out.b, scaled(exact_kron(d, g0 * gj), CRational(-1)));
    out.psibar_line = sum(out.psibar_line, scaled(exact_kron(d, (gj * g0).transpose()), CRational(-1)));
    out.pi_line = sum(out.pi_line, scaled(exact_kron(d, (g0 * gj).transpose()), CRational(-1)));
    out.pibar_line = sum(out.pibar_line, scaled(exact_kron(d, gj * g0), CRational(-1)));
  }
  return out;
}

}  // namespace

Poly SymbolicDirac::var(Field f, int i) const {
  const auto& u = model.universe;
  switch (f) {
    case Field::Psi: return Poly::generator(u, psi.at(i));
    case Field::PsiBar: return Poly::generator(u, psibar.at(i));
    case Field::Pi: return Poly::generator(u, pi.at(i));
    case Field::PiBar: return Poly::generator(u, pibar.at(i));
  }
  throw std::logic_error("unknown field");
}

SymbolicDirac build_symbolic_dirac(const LatticeConfig& cfg) {
  cfg.validate();
  Geometry geom(cfg);
  SymbolicDirac s;
  s.config = cfg;
  s.spacing = CRational::from_double(cfg.spacing);
  s.mass = CRational::from_double(cfg.mass);
  s.cell = CRational(1);
  for (int j = 0; j < cfg.dim; ++j) s.cell *= s.spacing;

  const int n = 4 * geom.site_count();
  for (int x = 0; x < geom.site_count(); ++x)
    for (int l = 0; l < 4; ++l)
      s.psi.push_back(s.model.add_position("psi_" + std::to_string(x) + "_" + std::to_string(l),
                                           PairKind::OddRight));
  for (int x = 0; x < geom.site_count(); ++x)
    for (int l = 0; l < 4; ++l)
      s.psibar.push_back(s.model.add_position("psibar_" + std::to_string(x) + "_" + std::to_string(l),
                                              PairKind::OddLeft));

  std::vector<Poly> psi, psibar, dpsi, dpsibar;
  for (int i = 0; i < n; ++i) {
    const auto& p = s.model.positions[i];
    const auto& q = s.model.positions[n + i];
    psi.push_back(s.model.var(p.id));
    dpsi.push_back(s.model.var(p.velocity));
    psibar.push_back(s.model.var(q.id));
    dpsibar.push_back(s.model.var(q.velocity));
  }

  ExactBlocks blocks = exact_blocks(s, geom);
  s.b = blocks.b;
  // psibar (i/2 gamma^0 dot - ...) psi: kinetic, spatial and mass parts as one bilinear kernel
  const ExactMatrix g0 = exact_gamma(0);
  ExactMatrix id = ExactMatrix::identity(geom.site_count());
  ExactMatrix kin = exact_kron(id, g0);
  ExactMatrix pot = scaled(exact_kron(id, ExactMatrix::identity(4)), -s.mass);
  for (int j = 0; j < cfg.dim; ++j) {
    pot = sum(pot, scaled(exact_kron(exact_difference(geom, j, s.spacing), exact_gamma(j + 1)),
                          CRational::i()));
  }
  const auto& u = s.model.universe;
  const CRational half_i = CRational::fraction(1, 2) * CRational::i();
  Poly lag(CRational(), u);
  for (int r = 0; r < n; ++r) {
    Poly kin_dot = apply_row(kin, r, dpsi, u), kin_plain = apply_row(kin, r, psi, u);
    lag += half_i * (psibar[r] * kin_dot - dpsibar[r] * kin_plain);
    lag += psibar[r] * apply_row(pot, r, psi, u);
  }
  s.model.lagrangian = s.cell * lag;

  s.analysis = analyze(s.model);
  for (int i = 0; i < n; ++i) {
    s.pi.push_back(*u->find("p_" + (*u)[s.psi[i]].name));
    s.pibar.push_back(*u->find("p_" + (*u)[s.psibar[i]].name));
  }
  return s;
}

SymbolicReport symbolic_checks(const SymbolicDirac& s, const DiracLattice& numeric, int n_max) {
  const auto& a = s.analysis;
  const auto& ps = a.legendre.ps;
  const auto& u = s.model.universe;
  const int n = int(s.psi.size());
  SymbolicReport rep;
  for (const auto& c : a.propagation.constraints.items)
    if (c.stage == Stage::Secondary) ++rep.secondary;

  std::vector<Poly> psi, psibar, pi, pibar;
  for (int i = 0; i < n; ++i) {
    psi.push_back(s.var(Field::Psi, i));
    psibar.push_back(s.var(Field::PsiBar, i));
    pi.push_back(s.var(Field::Pi, i));
    pibar.push_back(s.var(Field::PiBar, i));
  }
  ExactBlocks blocks = exact_blocks(s, numeric.geometry());

  // U1 = B psi, U2 = psibar-line applied to psibar
  const auto& primary = a.legendre.primary;
  const auto& mult = a.propagation.multipliers;
  rep.multipliers_match = primary.size() == std::size_t(2 * n) && mult.particular.size() == primary.size();
  for (std::size_t m = 0; rep.multipliers_match && m < primary.size(); ++m) {
    bool found = false;
    for (int i = 0; i < n && !found; ++i) {
      if (primary[m].expr.contains(s.pi[i])) {
        found = true;
        rep.multipliers_match = mult.particular[m] == apply_row(s.b, i, psi, u);
      } else if (primary[m].expr.contains(s.pibar[i])) {
        found = true;
        rep.multipliers_match = mult.particular[m] == apply_row(blocks.psibar_line, i, psibar, u);
      }
    }
    rep.multipliers_match = rep.multipliers_match && found;
  }

  const Poly& h = a.suite.first_class;
  auto line_ok = [&](const std::vector<Poly>& vars, const ExactMatrix& expected) {
    for (int i = 0; i < n; ++i)
      if (!(gpb(vars[i], h, ps) == apply_row(expected, i, vars, u))) return false;
    return true;
  };
  rep.eom = {line_ok(psi, s.b), line_ok(psibar, blocks.psibar_line), line_ok(pi, blocks.pi_line),
             line_ok(pibar, blocks.pibar_line)};

  std::vector<Poly> nested = psi;
  ExactMatrix bn = ExactMatrix::identity(n);
  for (int k = 0; k <= n_max; ++k) {
    if (k > 0) {
      for (auto& f : nested) f = gpb(f, h, ps);
      bn = bn * s.b;
    }
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) ok = nested[i] == apply_row(bn, i, psi, u);
    rep.theorem1.push_back(ok);
  }

  // numeric pi is the momentum density p / a^d
  const CRational inv_cell = s.cell.inverse();
  auto numeric_var = [&](Field f, int i) {
    Poly v = s.var(f, i);
    return (f == Field::Pi || f == Field::PiBar) ? inv_cell * v : v;
  };
  const Matrix k = numeric.dirac_matrix();
  for (const auto& ref : eqtime_reference()) {
    Matrix block = numeric.block(k, ref.row, ref.col);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Poly sym = gdb(numeric_var(ref.row, i), numeric_var(ref.col, j), a.second_class, ps);
        if (!sym.is_constant()) throw std::logic_error("field bracket is not a constant");
        rep.bridge = std::max(rep.bridge, std::abs(sym.constant_term().to_complex() - block(i, j)));
      }
  }
  return rep;
}

}  // namespace gham::lattice
