#pragma once

// Free Dirac field on a periodic spatial lattice.
//
// Site-spinor vectors are indexed 4*site + l. Brackets of the field variables are
// densities: [psi_l(x), pi_l'(x')] = delta_ll' delta_lat(x - x') with
// delta_lat = Kronecker / a^d, and kernels compose with the measure a^d.

#include <array>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gham/constraints.hpp"

namespace gham::lattice {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Matrix4 = Eigen::Matrix4cd;
using Spinor = Eigen::Vector4cd;

// Dirac representation; exact entries in {0, +-1, +-i}.
ExactMatrix exact_gamma(int a);

struct GammaSet {
  std::array<Matrix4, 4> gamma;
  Eigen::Matrix4d eta;
  GammaSet();  // throws std::logic_error if the Clifford relations fail
  double clifford_residual() const;
};

const GammaSet& gammas();

struct LatticeConfig {
  int dim = 1;
  int sites = 2;  // per axis
  double spacing = 1.0;
  double mass = 1.0;

  void validate() const;  // std::invalid_argument
  int site_count() const;
  double cell() const;    // a^d
  double volume() const;  // N^d a^d
};

class Geometry {
 public:
  explicit Geometry(const LatticeConfig& cfg);
  int site_count() const { return count_; }
  std::vector<int> coords(int site) const;
  int site(const std::vector<int>& coords) const;  // coordinates taken mod N
  int shift(int site, int axis, int step) const;
  int difference(int a, int b) const;  // site of coords(a) - coords(b)
  Eigen::MatrixXd symmetric_difference(int axis) const;
  Eigen::MatrixXd laplacian() const;  // sum_j D_j D_j

 private:
  int dim_, n_, count_;
  double a_;
};

enum class Field { Psi, Pi, PsiBar, PiBar };
const char* to_string(Field f);
constexpr std::array<Field, 4> kFields = {Field::Psi, Field::Pi, Field::PsiBar, Field::PiBar};

struct BracketKernel {
  std::string label;
  Field row = Field::Psi, col = Field::Psi;
  Matrix matrix;  // (4*site + l, 4*site' + l')
};

// max over shifts of |K(x+s, x'+s) - K(x, x')|
double translation_residual(const BracketKernel& k, const Geometry& g);

// c * delta_lat (x) S with S = identity or gamma^0
Matrix structure_kernel(const LatticeConfig& cfg, cplx c, bool gamma0);

struct KernelExpectation {
  Field row, col;
  cplx coefficient;
  bool gamma0;
};

// The ten equal-time Dirac-bracket kernels among psi, pi, psibar, pibar.
const std::vector<KernelExpectation>& eqtime_reference();

class DiracLattice {
 public:
  explicit DiracLattice(LatticeConfig cfg);

  const LatticeConfig& config() const { return cfg_; }
  const Geometry& geometry() const { return geom_; }
  int components() const { return 4 * geom_.site_count(); }
  int phase_dim() const { return 16 * geom_.site_count(); }
  int index(Field f, int site, int l) const;
  int offset(Field f) const;

  const Matrix& omega() const { return omega_; }                // basic brackets of z
  const Matrix& constraint_rows() const { return phi_; }        // chi1 rows, then chi2 rows
  const Matrix& b_operator() const { return b_; }
  Matrix hamiltonian_matrix() const;  // h with H = psi^dagger h psi, psibar = psi^dagger gamma^0
  Matrix hamiltonian_form() const;    // H = z^T A z
  Matrix first_class_form() const;    // H'
  Matrix flow() const;                // dz/dt = M z under H'
  Matrix dirac_matrix() const;        // Omega - Omega Phi^T C^-1 Phi Omega
  Matrix block(const Matrix& m, Field r, Field c) const;

 private:
  LatticeConfig cfg_;
  Geometry geom_;
  std::vector<Eigen::MatrixXd> d_;
  Matrix omega_, phi_, b_;
};

Matrix kron(const Eigen::MatrixXd& sites, const Matrix4& spin);

struct ConstraintMatrices {
  BracketKernel c;          // [chi_i, chi_j] in density normalization
  BracketKernel c_inverse;  // kernel inverse: C a^d C^-1 = delta_lat
  double inverse_residual = 0;
};

ConstraintMatrices constraint_matrix(const DiracLattice& model);

std::vector<BracketKernel> equal_time_gdb(const DiracLattice& model);

// anticommutator kernel {F, G} = i [F, G]_GD
BracketKernel quantize(const BracketKernel& k);

// max |B^2 - (Laplacian - m^2)|
double b_square_residual(const DiracLattice& model);

// Kernel of [psi(t + tau, x'), psibar(t, x)]_GD as a truncated exponential series.
BracketKernel series_anticommutator(const DiracLattice& model, double tau, int n_max);

struct DeltaFunction {
  double t = 0;
  Vector values;                // over sites
  std::vector<double> energies;  // per mode, sorted mode index
};

DeltaFunction delta_function(const DiracLattice& model, double t);

// d^k/dt^k of the mode sum, evaluated analytically per mode.
Vector delta_derivative(const DiracLattice& model, double t, int order);

struct LemmaReport {
  int k = 0;
  double residual = 0;  // max |lhs - rhs| / max(1, max |lhs|)
  bool passed = false;
};

LemmaReport verify_lemma(const DiracLattice& model, int k, double tol = 1e-11);

BracketKernel closed_form_anticommutator(const DiracLattice& model, double tau);

// largest |E_p|
double max_energy(const DiracLattice& model);

struct EomReport {
  std::array<double, 4> line_residual{};  // psi, psibar, pi, pibar
  double tangency = 0;     // flow preserves the constraint surface
  double dirac = 0;        // restricted psi flow vs B
  double consistency = 0;  // d chi/dt stays in the span of the constraints
  bool passed(double tol) const;
};

EomReport equations_of_motion_check(const DiracLattice& model);

// relative max-norm residual of the psi rows of M^n against B^n, n = 0..n_max
std::vector<double> theorem1_check(const DiracLattice& model, int n_max);

struct Mode {
  std::vector<int> n;
  std::vector<double> k;  // 2 pi n / (N a)
  std::vector<double> p;  // sin(k a) / a
  double energy = 0;
  std::array<Spinor, 2> u, v;
  int rank_u = 0, rank_v = 0;
  double residual = 0;  // max |(pslash -+ m) w|
  double gram_condition = 0;
};

struct ModeBasis {
  std::vector<Mode> modes;
  int mode_index(const std::vector<int>& n) const;
};

ModeBasis mode_expansion(const DiracLattice& model);

struct LadderReport {
  double expected_diagonal_scale = 0;  // N^d a^d
  double max_diagonal_error = 0;       // relative to 2 E N^d a^d
  double max_offdiagonal = 0;          // all other anticommutators
  double max_orthogonality = 0;        // |u^dagger(p) v(-p)|
  bool passed(double tol) const;
};

LadderReport ladder_algebra(const DiracLattice& model, const ModeBasis& basis);

// max |dD(-x) + dD(x)| for the symmetric difference of delta_lat
double derivative_delta_parity(const DiracLattice& model);

// ----------------------------------------------------------------------------
// Exact model on the same lattice, run through constraint analysis.

struct SymbolicDirac {
  LatticeConfig config;
  CRational spacing, mass, cell;  // exact binary values of the doubles
  LagrangianModel model;
  Analysis analysis;
  std::vector<GeneratorId> psi, psibar, pi, pibar;  // index 4*site + l
  ExactMatrix b;                                    // exact B

  Poly var(Field f, int i) const;
};

SymbolicDirac build_symbolic_dirac(const LatticeConfig& cfg);

struct SymbolicReport {
  std::size_t secondary = 0;
  bool multipliers_match = false;  // U1 = B psi, U2 as expected
  std::vector<bool> theorem1;      // n = 0..n_max, exact
  std::array<bool, 4> eom{};       // exact line checks
  double bridge = 0;               // max |symbolic - numeric| over all basic kernels
};

SymbolicReport symbolic_checks(const SymbolicDirac& s, const DiracLattice& numeric, int n_max);

}  // namespace gham::lattice
