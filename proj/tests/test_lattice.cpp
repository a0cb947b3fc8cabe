#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gham/lattice.hpp"

using namespace gham;
using namespace gham::lattice;

namespace {

LatticeConfig cfg1(int n, double a = 0.5, double m = 1.0) { return {1, n, a, m}; }

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("gamma matrices") {
  const auto& g = gammas();
  CHECK(g.clifford_residual() == 0.0);
  // gamma^0 hermitian, gamma^j anti-hermitian
  CHECK(max_abs(g.gamma[0] - g.gamma[0].adjoint()) == 0.0);
  for (int j = 1; j < 4; ++j) CHECK(max_abs(g.gamma[j] + g.gamma[j].adjoint()) == 0.0);
  CHECK_THROWS_AS(exact_gamma(4), std::invalid_argument);
}

TEST_CASE("config validation and geometry") {
  CHECK_THROWS_AS(DiracLattice(LatticeConfig{0, 4, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(DiracLattice(LatticeConfig{1, 1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(DiracLattice(LatticeConfig{1, 4, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(DiracLattice(LatticeConfig{1, 4, 1, -1}), std::invalid_argument);
  Geometry g(LatticeConfig{2, 3, 1, 1});
  CHECK(g.site_count() == 9);
  for (int s = 0; s < 9; ++s) CHECK(g.site(g.coords(s)) == s);
  CHECK(g.shift(g.site({2, 1}), 0, 1) == g.site({0, 1}));
  CHECK(g.difference(g.site({0, 0}), g.site({1, 2})) == g.site({2, 1}));
  // the symmetric difference vanishes identically for N = 2
  CHECK(Geometry(cfg1(2)).symmetric_difference(0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("phase-space counting and constraint matrix") {
  DiracLattice model(cfg1(2));
  CHECK(model.phase_dim() == 32);               // 16 canonical pairs
  CHECK(model.constraint_rows().rows() == 16);  // 16 constraints
  auto cm = constraint_matrix(model);
  // [chi1, chi2] = i gamma^0 delta_lat, both orderings
  const int n = model.components();
  Matrix want = structure_kernel(model.config(), cplx(0, 1), true);
  CHECK(max_abs(cm.c.matrix.block(0, n, n, n) - want) < 1e-14);
  CHECK(max_abs(cm.c.matrix.block(n, 0, n, n) - want) < 1e-14);
  CHECK(max_abs(cm.c.matrix.block(0, 0, n, n)) == 0.0);
  CHECK(max_abs(cm.c.matrix.block(n, n, n, n)) == 0.0);
  CHECK(cm.inverse_residual < 1e-14);
  Matrix want_inv = structure_kernel(model.config(), cplx(0, -1), true);
  CHECK(max_abs(cm.c_inverse.matrix.block(0, n, n, n) - want_inv) < 1e-12);
}

TEST_CASE("equal-time Dirac-bracket kernels") {
  for (int n : {2, 8, 16}) {
    DiracLattice model(cfg1(n, 0.25, 0.7));
    auto kernels = equal_time_gdb(model);
    REQUIRE(kernels.size() == 10);
    const auto& ref = eqtime_reference();
    for (std::size_t k = 0; k < kernels.size(); ++k) {
      Matrix want = structure_kernel(model.config(), ref[k].coefficient, ref[k].gamma0);
      double scale = 1.0 / model.config().cell();
      CHECK_MESSAGE(max_abs(kernels[k].matrix - want) / scale < 1e-12, kernels[k].label);
      CHECK(translation_residual(kernels[k], model.geometry()) < 1e-12);
      auto q = quantize(kernels[k]);
      CHECK(max_abs(q.matrix - cplx(0, 1) * kernels[k].matrix) == 0.0);
    }
    CHECK(kernels[2].label == "[psi,psibar]");
    CHECK(quantize(kernels[2]).label == "{psi,psibar}");
  }
  // 2d lattice
  DiracLattice model2(LatticeConfig{2, 3, 1.0, 0.5});
  auto k2 = equal_time_gdb(model2);
  CHECK(max_abs(k2[2].matrix - structure_kernel(model2.config(), cplx(0, -1), true)) < 1e-12);
}

TEST_CASE("B operator") {
  for (auto cfg : {cfg1(8), LatticeConfig{2, 4, 0.5, 1.3}, LatticeConfig{3, 3, 1.0, 0.4}}) {
    DiracLattice model(cfg);
    CHECK(b_square_residual(model) < 1e-12);
    CHECK(max_abs(model.b_operator() + model.b_operator().adjoint()) < 1e-14);
  }
  DiracLattice massless(LatticeConfig{1, 4, 1.0, 0.0});
  Matrix h = massless.hamiltonian_matrix();
  CHECK(max_abs(h - h.adjoint()) < 1e-14);
  DiracLattice massive(cfg1(6));
  h = massive.hamiltonian_matrix();
  CHECK(max_abs(h - h.adjoint()) < 1e-14);
}

TEST_CASE("Delta function") {
  DiracLattice model(cfg1(16, 0.5, 1.0));
  auto d0 = delta_function(model, 0.0);
  CHECK(d0.values.cwiseAbs().maxCoeff() < 1e-15);
  CHECK(d0.energies.size() == 16);
  // d/dt Delta at t = 0 is -i delta_lat
  Vector dt = delta_derivative(model, 0.0, 1);
  CHECK(std::abs(dt(0) - cplx(0, -2.0)) < 1e-12);
  for (int x = 1; x < 16; ++x) CHECK(std::abs(dt(x)) < 1e-12);
  // odd in t, finite differences against the analytic derivative
  auto dp = delta_function(model, 0.3), dm = delta_function(model, -0.3);
  CHECK((dp.values + dm.values).cwiseAbs().maxCoeff() < 1e-14);
  const double h = 1e-5;
  Vector fd = (delta_function(model, 0.3 + h).values - delta_function(model, 0.3 - h).values) / (2 * h);
  CHECK((fd - delta_derivative(model, 0.3, 1)).cwiseAbs().maxCoeff() < 1e-8);
  // massless zero modes use the limit
  DiracLattice zero(LatticeConfig{1, 4, 1.0, 0.0});
  Vector z = delta_derivative(zero, 0.0, 1);
  CHECK(std::abs(z(0) - cplx(0, -1)) < 1e-12);
  CHECK(std::isfinite(std::abs(delta_function(zero, 0.7).values(0))));
}

TEST_CASE("lemma on powers of the lattice wave operator") {
  for (auto cfg : {cfg1(16, 0.5, 1.0), LatticeConfig{2, 4, 0.5, 0.8}, LatticeConfig{1, 8, 1.0, 0.0}}) {
    DiracLattice model(cfg);
    for (int k = 0; k <= 8; ++k) {
      auto r = verify_lemma(model, k);
      CHECK_MESSAGE(r.passed, "k=" << k << " residual " << r.residual);
    }
  }
  CHECK_THROWS_AS(verify_lemma(DiracLattice(cfg1(4)), -1), std::invalid_argument);
}

TEST_CASE("series and closed form of the unequal-time anticommutator") {
  DiracLattice model(cfg1(16, 0.5, 1.0));
  const double tau = 0.1 / model.config().mass;
  auto series = series_anticommutator(model, tau, 30);
  auto closed = closed_form_anticommutator(model, tau);
  double scale = max_abs(closed.matrix);
  CHECK(max_abs(series.matrix - closed.matrix) / scale < 1e-12);
  CHECK(translation_residual(closed, model.geometry()) < 1e-12);
  auto s0 = series_anticommutator(model, 0.0, 30);
  auto c0 = closed_form_anticommutator(model, 0.0);
  CHECK(max_abs(s0.matrix - structure_kernel(model.config(), cplx(0, -1), true)) == 0.0);
  CHECK(max_abs(c0.matrix - s0.matrix) < 1e-12);
  CHECK_THROWS_AS(series_anticommutator(model, tau, -1), std::invalid_argument);
}

TEST_CASE("equations of motion and nested brackets on the matrix model") {
  for (auto cfg : {cfg1(4), LatticeConfig{2, 3, 0.5, 0.6}, cfg1(16, 0.5, 1.0)}) {
    DiracLattice model(cfg);
    auto eom = equations_of_motion_check(model);
    for (int k = 0; k < 4; ++k) CHECK_MESSAGE(eom.line_residual[k] < 1e-12, "line " << k);
    CHECK(eom.tangency < 1e-12);
    CHECK(eom.dirac < 1e-12);
    CHECK(eom.consistency < 1e-12);
    CHECK(eom.passed(1e-12));
  }
  DiracLattice model(cfg1(16, 0.5, 1.0));
  auto res = theorem1_check(model, 30);
  REQUIRE(res.size() == 31);
  for (std::size_t n = 0; n < res.size(); ++n) CHECK_MESSAGE(res[n] < 1e-12, "n=" << n);
}

TEST_CASE("mode expansion and ladder algebra") {
  for (auto cfg : {cfg1(8, 0.5, 1.0), LatticeConfig{2, 3, 1.0, 0.5}, cfg1(2, 1.0, 2.0)}) {
    DiracLattice model(cfg);
    auto basis = mode_expansion(model);
    REQUIRE(basis.modes.size() == std::size_t(model.geometry().site_count()));
    for (const auto& m : basis.modes) {
      CHECK(m.rank_u == 2);
      CHECK(m.rank_v == 2);
      CHECK(m.residual < 1e-12);
      CHECK(m.gram_condition < 1 + 1e-9);
      CHECK(std::abs(m.u[0].squaredNorm() - 2 * m.energy) < 1e-12);
    }
    auto rep = ladder_algebra(model, basis);
    CHECK(rep.max_diagonal_error < 1e-10);
    CHECK(rep.max_offdiagonal < 1e-10);
    CHECK(rep.max_orthogonality < 1e-10);
    CHECK(rep.passed(1e-10));
  }
  CHECK_THROWS_AS(mode_expansion(DiracLattice(LatticeConfig{1, 4, 1, 0})), UnsupportedConfiguration);
}

TEST_CASE("symmetric difference of delta is odd") {
  for (auto cfg : {cfg1(7), LatticeConfig{2, 4, 0.5, 1}, LatticeConfig{3, 3, 1, 1}}) {
    CHECK(derivative_delta_parity(DiracLattice(cfg)) == 0.0);
  }
}

TEST_CASE("exact lattice model through constraint analysis") {
  for (auto cfg : {LatticeConfig{1, 2, 0.5, 1.0}, LatticeConfig{1, 3, 0.5, 0.75}, LatticeConfig{1, 8, 0.3, 1.0}}) {
    auto sym = build_symbolic_dirac(cfg);
    DiracLattice numeric(cfg);
    const std::size_t n = numeric.components();
    CHECK(sym.analysis.legendre.primary.size() == 2 * n);
    CHECK(sym.analysis.classified.indices(ConstraintClass::Second).size() == 2 * n);
    CHECK(sym.analysis.classified.indices(ConstraintClass::First).empty());
    auto rep = symbolic_checks(sym, numeric, 6);
    CHECK(rep.secondary == 0);
    CHECK(rep.multipliers_match);
    for (int k = 0; k < 4; ++k) CHECK_MESSAGE(rep.eom[k], "line " << k);
    REQUIRE(rep.theorem1.size() == 7);
    for (std::size_t k = 0; k < rep.theorem1.size(); ++k) CHECK_MESSAGE(rep.theorem1[k], "n=" << k);
    CHECK(rep.bridge < 1e-14);
    // exact B matches the numeric operator
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        CHECK(std::abs(sym.b(r, c).to_complex() - numeric.b_operator()(r, c)) < 1e-15);
  }
}

TEST_CASE("small identities from the operator definitions") {
  // constant spinor, m = 0: the symmetric difference kills it
  DiracLattice massless(LatticeConfig{1, 6, 0.5, 0.0});
  Vector c(massless.components());
  for (int x = 0; x < 6; ++x) c.segment<4>(4 * x) << 1.0, cplx(0, 2), -0.5, 3.0;
  CHECK((massless.b_operator() * c).cwiseAbs().maxCoeff() < 1e-14);

  // two-term series
  DiracLattice model(cfg1(8, 0.5, 1.0));
  const double tau = 1e-3;
  Matrix x = structure_kernel(model.config(), cplx(0, -1), true);
  Matrix two = x + tau * model.b_operator() * x;
  CHECK(max_abs(series_anticommutator(model, tau, 1).matrix - two) < 1e-15);

  // tr(gamma^0 K) at coincident sites for tau -> 0
  auto k = closed_form_anticommutator(model, 1e-9);
  cplx tr = (gammas().gamma[0] * k.matrix.block<4, 4>(0, 0)).trace();
  CHECK(std::abs(tr - cplx(0, -4.0 / model.config().cell())) < 1e-7);

  // rest-frame spinors
  auto basis = mode_expansion(model);
  const auto& rest = basis.modes[basis.mode_index({0})];
  CHECK(rest.energy == doctest::Approx(1.0));
  for (const auto& u : rest.u) CHECK(((gammas().gamma[0] - Matrix4::Identity()) * u).norm() < 1e-14);
}

TEST_CASE("series and closed form agree whenever the truncation bound is tiny") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int tried = 0;
  for (int trial = 0; trial < 40; ++trial) {
    LatticeConfig cfg{1 + int(rng() % 2), 3 + int(rng() % 5), 0.25 + unit(rng), 0.1 + 2 * unit(rng)};
    if (cfg.dim == 2 && cfg.sites > 5) cfg.sites = 5;
    DiracLattice model(cfg);
    const int n_max = 10 + int(rng() % 25);
    const double tau = (2 * unit(rng) - 1) * 3.0 / max_energy(model);
    double bound = std::pow(std::abs(tau) * max_energy(model), n_max + 1) / std::tgamma(n_max + 2.0);
    if (bound >= 1e-12) continue;
    ++tried;
    auto s = series_anticommutator(model, tau, n_max);
    auto c = closed_form_anticommutator(model, tau);
    CHECK(max_abs(s.matrix - c.matrix) * model.config().cell() < 1e-10);
  }
  CHECK(tried > 10);
}
