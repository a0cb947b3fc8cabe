// Acceptance gate: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gham/constraints.hpp"
#include "gham/dsl.hpp"
#include "gham/graded_algebra.hpp"
#include "gham/lattice.hpp"

using namespace gham;
using namespace gham::lattice;

namespace {

// pinned tolerances and limits
constexpr double kExactTol = 1e-14;       // constructional identities, kernels scaled by a^d
constexpr double kBridgeTol = 1e-14;      // exact model vs matrices
constexpr double kNestedTol = 1e-12;      // relative to max |B^n|
constexpr double kLemmaTol = 1e-11;       // relative
constexpr double kSeriesTol = 1e-10;      // entrywise, absolute
constexpr double kEomTol = 1e-13;
constexpr double kLadderTol = 1e-10;      // relative to 2 E N^d a^d
constexpr double kModeTol = 1e-12;
constexpr double kIdentitySeconds = 30.0;
constexpr double kEqtimeSeconds = 10.0;

// lattice used throughout: spacing is not a power of two so roundoff is exercised
constexpr double kSpacing = 0.3;
constexpr double kMass = 1.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Detail {
  std::ostringstream s;
  bool pass = true;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      s << "[failed: " << what << "] ";
    }
  }
  template <class T>
  Detail& operator<<(const T& v) {
    s << v;
    return *this;
  }
  Outcome done() { return {pass, s.str()}; }
};

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LagrangianModel load(const std::string& name) {
  return dsl::elaborate(dsl::parse(read_file(std::filesystem::path(GHAM_MODELS_DIR) / name)));
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

LatticeConfig lattice1(int n) { return {1, n, kSpacing, kMass}; }

PhaseSpace three_plus_three() {
  PhaseSpace ps(make_universe());
  for (int k = 1; k <= 3; ++k) ps.add_pair("q" + std::to_string(k), PairKind::Even);
  ps.add_pair("th1", PairKind::OddRight);
  ps.add_pair("th2", PairKind::OddRight);
  ps.add_pair("thbar", PairKind::OddLeft);
  return ps;
}

// ---------------------------------------------------------------------------

Outcome graded_algebra_suite() {
  Detail d;
  auto t0 = std::chrono::steady_clock::now();
  std::size_t checks = 0;
  auto count = [&](const GradedAlgebraReport& r) {
    for (const auto& i : r.identities) checks += i.checked;
    return r.all_passed();
  };

  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(GHAM_MODELS_DIR))
    if (e.path().extension() == ".gham") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  int models = 0;
  for (const auto& f : files) {
    auto spec = dsl::parse(read_file(f));
    if (!spec.lagrangian) continue;
    ++models;
    auto m = dsl::elaborate(spec);
    auto an = analyze(m);
    const auto& ps = an.legendre.ps;
    auto basis = monomial_basis(ps, 2);
    std::string name = f.filename().string();
    d.require(count(verify_graded_algebra_exhaustive(gpb_bracket(ps), basis, 4)), "GPB on " + name);
    d.require(count(verify_graded_algebra_exhaustive(make_bracket(BracketKind::GD, an.second_class, ps), basis, 4)),
              "GDB on " + name);
    d.require(count(verify_graded_algebra(ps, make_bracket(BracketKind::GD, an.second_class, ps), 30, 17)),
              "sampled GDB on " + name);
  }

  // 3 even + 3 odd pairs: every monomial of degree <= 3, argument tuples up to total degree 5
  auto ps = three_plus_three();
  d.require(count(verify_graded_algebra_exhaustive(gpb_bracket(ps), monomial_basis(ps, 3), 5)), "GPB on 3+3 pairs");
  // constrained system with 2 even + 2 odd pairs
  auto mixed = analyze(load("mixed.gham"));
  const auto& mps = mixed.legendre.ps;
  d.require(count(verify_graded_algebra_exhaustive(make_bracket(BracketKind::GD, mixed.second_class, mps),
                                                   monomial_basis(mps, 3), 4)),
            "GDB on the mixed model");

  // GD1 antisymmetry and GD2 Leibniz fail on the oscillator, with the predicted residuals
  auto osc = analyze(load("oscillator.gham"));
  const auto& ops = osc.legendre.ps;
  const auto& sc = osc.second_class;
  PolySampler s(ops, 99, 3, 3);
  bool gd1_exact = true, gd2_exact = true, gd1_broken = false, gd2_broken = false;
  for (int k = 0; k < 60; ++k) {
    Poly e = s.even(), a = s.odd(), f = s.even();
    Poly p1, p2;
    for (std::size_t b = 0; b < sc.chi.size(); ++b)
      for (std::size_t bp = 0; bp < sc.chi.size(); ++bp) {
        p1 += gpb(sc.chi[b], e, ops) * (sc.c_inverse(b, bp) * gpb(sc.chi[bp], a, ops));
        p2 += gpb(sc.chi[bp], f, ops) * (sc.c_inverse(b, bp) * gpb(e, sc.chi[b], ops)) * a;
      }
    Poly r1 = gd1(e, a, sc, ops) + gd1(a, e, sc, ops);
    Poly r2 = gd2(e, f * a, sc, ops) - gd2(e, f, sc, ops) * a - f * gd2(e, a, sc, ops);
    gd1_exact = gd1_exact && r1 == CRational(2) * p1;
    gd2_exact = gd2_exact && r2 == CRational(2) * p2;
    gd1_broken = gd1_broken || !r1.is_zero();
    gd2_broken = gd2_broken || !r2.is_zero();
  }
  d.require(gd1_exact && gd1_broken, "GD1 antisymmetry residual");
  d.require(gd2_exact && gd2_broken, "GD2 Leibniz residual");

  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  d.require(secs < kIdentitySeconds, "runtime");
  d << models << " models, " << checks << " identity instances, GD1/GD2 residuals exact, " << secs << " s";
  return d.done();
}

Outcome fermionic_oscillator() {
  Detail d;
  auto m = load("oscillator.gham");
  auto an = analyze(m);
  const auto& ps = an.legendre.ps;
  const CRational half_i = CRational::fraction(1, 2) * CRational::i();
  Poly t = m.var("theta"), tb = m.var("thetabar"), pi = m.var("p_theta"), pib = m.var("p_thetabar");
  const auto& chi = an.second_class.chi;
  d.require(chi.size() == 2, "two second-class constraints");
  if (chi.size() == 2) {
    d.require(chi[0] == pi - half_i * tb, "chi1");
    d.require(chi[1] == pib + half_i * t, "chi2");
  }
  d.require(an.classified.c.rows() == 2 && an.classified.c(0, 1) == CRational::i(), "C12 = i");
  d.require(gdb(t, tb, an.second_class, ps) == Poly(-CRational::i()), "[theta, thetabar] = -i");
  d.require(gdb(t, pi, an.second_class, ps) == Poly(CRational::fraction(1, 2)), "[theta, pi] = 1/2");
  d << "chi1 = " << chi.at(0) << ", chi2 = " << chi.at(1) << ", C12 = " << an.classified.c(0, 1)
    << ", [theta,thetabar]_GD = " << gdb(t, tb, an.second_class, ps);
  return d.done();
}

Outcome gauge_toy() {
  Detail d;
  auto m = load("gauge_toy.gham");
  auto an = analyze(m);
  const auto& ps = an.legendre.ps;
  Poly q2 = m.var("q2"), p1 = m.var("p_q1"), p2 = m.var("p_q2");
  const auto& items = an.classified.items;
  d.require(an.legendre.primary.size() == 1 && an.legendre.primary[0].expr == p2, "primary p2");
  d.require(items.size() == 2 && items[1].expr == p1 && items[1].stage == Stage::Secondary, "secondary p1");
  d.require(std::all_of(items.begin(), items.end(), [](const Constraint& c) { return c.cls == ConstraintClass::First; }),
            "both first class");
  const auto& w = an.suite.w;
  d.require(w.size() == 2 && w[0] != w[1], "two independent multipliers in H_E");
  Poly ext = an.suite.extended;
  d.require(derivative(ext, w.at(0), Side::Left) != Poly() && derivative(ext, w.at(1), Side::Left) != Poly() &&
                derivative(ext, w.at(0), Side::Left) != derivative(ext, w.at(1), Side::Left),
            "multipliers multiply different constraints");
  Poly dv = m.var(m.add_parameter("dv"));
  Poly tau = Poly::generator(ps.universe(), an.suite.tau);
  d.require(gauge_transform(q2, {{0, dv}}, 1, an.suite, an.classified, ps) == tau * dv, "delta q2 = tau dv");
  d << "H_E = " << ext << ", delta q2 = " << gauge_transform(q2, {{0, dv}}, 1, an.suite, an.classified, ps);
  return d.done();
}

Outcome equal_time_table() {
  Detail d;
  auto t0 = std::chrono::steady_clock::now();
  double worst = 0, worst_t = 0;
  for (int n : {2, 8, 16}) {
    DiracLattice model(lattice1(n));
    auto ks = equal_time_gdb(model);
    d.require(ks.size() == 10, "ten kernels");
    for (std::size_t k = 0; k < ks.size(); ++k) {
      const auto& ref = eqtime_reference()[k];
      worst = std::max(worst, max_abs(ks[k].matrix - structure_kernel(model.config(), ref.coefficient, ref.gamma0)) *
                                  model.config().cell());
      worst_t = std::max(worst_t, translation_residual(ks[k], model.geometry()) * model.config().cell());
    }
  }
  d.require(worst <= kExactTol && worst_t <= kExactTol, "kernel coefficients");
  DiracLattice small(lattice1(2));
  auto rep = symbolic_checks(build_symbolic_dirac(small.config()), small, 0);
  d.require(rep.bridge <= kBridgeTol, "bridge");
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  d.require(secs < kEqtimeSeconds, "runtime");
  d << "max kernel residual " << worst << ", translation " << worst_t << ", N=2 bridge " << rep.bridge << ", "
    << secs << " s";
  return d.done();
}

Outcome quantization_map() {
  Detail d;
  DiracLattice model(lattice1(16));
  auto q = quantize(equal_time_gdb(model)[2]);
  double r = max_abs(q.matrix - structure_kernel(model.config(), 1.0, true)) * model.config().cell();
  d.require(q.label == "{psi,psibar}", "label");
  d.require(r <= kExactTol, "i [psi, psibar] = gamma0 delta");
  d << q.label << " residual " << r;
  return d.done();
}

Outcome nested_brackets() {
  Detail d;
  DiracLattice small(lattice1(2));
  auto rep = symbolic_checks(build_symbolic_dirac(small.config()), small, 6);
  bool exact = rep.theorem1.size() == 7 && std::all_of(rep.theorem1.begin(), rep.theorem1.end(), [](bool b) { return b; });
  d.require(exact, "symbolic n <= 6");
  DiracLattice model(lattice1(16));
  auto res = theorem1_check(model, 30);
  double worst = *std::max_element(res.begin(), res.end());
  d.require(res.size() == 31 && worst <= kNestedTol, "matrix powers n <= 30");
  d << "symbolic n<=6 exact at N=2, matrix n<=30 at N=16 max relative residual " << worst;
  return d.done();
}

Outcome lemma_and_series() {
  Detail d;
  DiracLattice model(lattice1(16));
  double lemma = 0;
  for (int k = 0; k <= 8; ++k) lemma = std::max(lemma, verify_lemma(model, k, kLemmaTol).residual);
  d.require(lemma <= kLemmaTol, "lemma k <= 8");
  const double tau = 0.1 / kMass;
  double r = max_abs(series_anticommutator(model, tau, 30).matrix - closed_form_anticommutator(model, tau).matrix);
  d.require(r <= kSeriesTol, "series vs closed form");
  Matrix eq = structure_kernel(model.config(), {0, -1}, true);
  double r0 = max_abs(series_anticommutator(model, 0.0, 30).matrix - eq);
  double c0 = max_abs(closed_form_anticommutator(model, 0.0).matrix - eq) * model.config().cell();
  d.require(r0 == 0.0, "series at tau = 0");
  d.require(c0 <= kExactTol, "closed form at tau = 0");
  d << "lemma max residual " << lemma << ", series-closed " << r << ", tau=0 residuals " << r0 << " / " << c0;
  return d.done();
}

Outcome equations_of_motion() {
  Detail d;
  for (int n : {2, 3}) {
    DiracLattice small(lattice1(n));
    auto rep = symbolic_checks(build_symbolic_dirac(small.config()), small, 0);
    d.require(std::all_of(rep.eom.begin(), rep.eom.end(), [](bool b) { return b; }),
              "symbolic lines at N=" + std::to_string(n));
    d.require(rep.multipliers_match && rep.secondary == 0, "multipliers at N=" + std::to_string(n));
  }
  DiracLattice model(lattice1(16));
  auto eom = equations_of_motion_check(model);
  d.require(eom.passed(kEomTol), "numeric N=16");
  d << "symbolic exact at N=2,3; N=16 lines " << eom.line_residual[0] << " " << eom.line_residual[1] << " "
    << eom.line_residual[2] << " " << eom.line_residual[3] << ", restricted flow " << eom.dirac;
  return d.done();
}

Outcome ladder() {
  Detail d;
  DiracLattice model(lattice1(16));
  auto basis = mode_expansion(model);
  bool ranks = true;
  double res = 0;
  for (const auto& m : basis.modes) {
    ranks = ranks && m.rank_u == 2 && m.rank_v == 2;
    res = std::max(res, m.residual);
  }
  d.require(ranks, "rank 2");
  d.require(res <= kModeTol, "spinor residual");
  auto lr = ladder_algebra(model, basis);
  d.require(lr.passed(kLadderTol), "anticommutators");
  d << basis.modes.size() << " modes, diagonal error " << lr.max_diagonal_error << ", off-diagonal "
    << lr.max_offdiagonal << ", u/v orthogonality " << lr.max_orthogonality;
  return d.done();
}

Outcome naive_table() {
  Detail d;
  auto t = naive_fragility_table();
  d.require(t.matching_cells() == 1, "exactly one matching cell");
  d.require(t.simple.forward_matches && !t.simple.reverse_matches, "simple Lagrangian, forward order only");
  d.require(!t.symmetrized.forward_matches && !t.symmetrized.reverse_matches, "symmetrized fails both orders");
  d << "naive: simple " << t.simple.naive_forward << " / " << t.simple.naive_reverse << ", symmetrized "
    << t.symmetrized.naive_forward << " / " << t.symmetrized.naive_reverse << "; GDB " << t.simple.gdb_forward;
  return d.done();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"graded-algebra identities", graded_algebra_suite},
      {"fermionic oscillator", fermionic_oscillator},
      {"gauge toy", gauge_toy},
      {"lattice equal-time table", equal_time_table},
      {"quantization map", quantization_map},
      {"nested brackets vs B^n", nested_brackets},
      {"lemma and series/closed form", lemma_and_series},
      {"equations of motion", equations_of_motion},
      {"mode and ladder algebra", ladder},
      {"naive derivation table", naive_table},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << k + 1 << ": " << criteria[k].first << " -- "
              << o.detail << std::endl;
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
