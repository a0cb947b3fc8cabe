#include "gham/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gham::lattice {

namespace {

const cplx I(0.0, 1.0);

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

Matrix4 to_complex(const ExactMatrix& m) {
  Matrix4 out;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out(r, c) = m(r, c).to_complex();
  return out;
}

}  // namespace

ExactMatrix exact_gamma(int a) {
  if (a < 0 || a > 3) throw std::invalid_argument("gamma index out of range");
  ExactMatrix g(4, 4);
  if (a == 0) {
    g(0, 0) = g(1, 1) = CRational(1);
    g(2, 2) = g(3, 3) = CRational(-1);
    return g;
  }
  // sigma_a in the off-diagonal blocks: [[0, s], [-s, 0]]
  ExactMatrix s(2, 2);
  const CRational i = CRational::i();
  if (a == 1) {
    s(0, 1) = s(1, 0) = CRational(1);
  } else if (a == 2) {
    s(0, 1) = -i;
    s(1, 0) = i;
  } else {
    s(0, 0) = CRational(1);
    s(1, 1) = CRational(-1);
  }
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      g(r, c + 2) = s(r, c);
      g(r + 2, c) = -s(r, c);
    }
  return g;
}

GammaSet::GammaSet() {
  for (int a = 0; a < 4; ++a) gamma[a] = to_complex(exact_gamma(a));
  eta = Eigen::Vector4d(1, -1, -1, -1).asDiagonal();
  if (clifford_residual() > 1e-14) throw std::logic_error("gamma matrices violate the Clifford relations");
}

double GammaSet::clifford_residual() const {
  double r = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      Matrix4 ac = gamma[a] * gamma[b] + gamma[b] * gamma[a] - 2.0 * eta(a, b) * Matrix4::Identity();
      r = std::max(r, ac.cwiseAbs().maxCoeff());
    }
  return r;
}

const GammaSet& gammas() {
  static const GammaSet g;
  return g;
}

void LatticeConfig::validate() const {
  if (dim < 1 || dim > 3) throw std::invalid_argument("dim must be 1, 2 or 3");
  if (sites < 2) throw std::invalid_argument("sites must be at least 2");
  if (!(spacing > 0)) throw std::invalid_argument("spacing must be positive");
  if (!(mass >= 0)) throw std::invalid_argument("mass must be non-negative");
}

int LatticeConfig::site_count() const {
  int s = 1;
  for (int j = 0; j < dim; ++j) s *= sites;
  return s;
}

double LatticeConfig::cell() const { return std::pow(spacing, dim); }
double LatticeConfig::volume() const { return site_count() * cell(); }

// ---------------------------------------------------------------------------

Geometry::Geometry(const LatticeConfig& cfg)
    : dim_(cfg.dim), n_(cfg.sites), count_(cfg.site_count()), a_(cfg.spacing) {}

std::vector<int> Geometry::coords(int site) const {
  std::vector<int> c(dim_);
  for (int j = 0; j < dim_; ++j) {
    c[j] = site % n_;
    site /= n_;
  }
  return c;
}

int Geometry::site(const std::vector<int>& coords) const {
  int s = 0;
  for (int j = dim_ - 1; j >= 0; --j) s = s * n_ + ((coords[j] % n_) + n_) % n_;
  return s;
}

int Geometry::shift(int s, int axis, int step) const {
  auto c = coords(s);
  c[axis] += step;
  return site(c);
}

int Geometry::difference(int a, int b) const {
  auto ca = coords(a), cb = coords(b);
  for (int j = 0; j < dim_; ++j) ca[j] -= cb[j];
  return site(ca);
}

Eigen::MatrixXd Geometry::symmetric_difference(int axis) const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(count_, count_);
  for (int x = 0; x < count_; ++x) {
    d(x, shift(x, axis, 1)) += 0.5 / a_;
    d(x, shift(x, axis, -1)) -= 0.5 / a_;
  }
  return d;
}

Eigen::MatrixXd Geometry::laplacian() const {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(count_, count_);
  for (int j = 0; j < dim_; ++j) {
    Eigen::MatrixXd d = symmetric_difference(j);
    l += d * d;
  }
  return l;
}

const char* to_string(Field f) {
  switch (f) {
    case Field::Psi: return "psi";
    case Field::Pi: return "pi";
    case Field::PsiBar: return "psibar";
    case Field::PiBar: return "pibar";
  }
  return "?";
}

Matrix kron(const Eigen::MatrixXd& sites, const Matrix4& spin) {
  const auto s = sites.rows();
  Matrix out = Matrix::Zero(4 * s, 4 * sites.cols());
  for (Eigen::Index x = 0; x < s; ++x)
    for (Eigen::Index y = 0; y < sites.cols(); ++y)
      if (sites(x, y) != 0.0) out.block<4, 4>(4 * x, 4 * y) = sites(x, y) * spin;
  return out;
}

double translation_residual(const BracketKernel& k, const Geometry& g) {
  const int s = g.site_count();
  double r = 0;
  for (int x = 0; x < s; ++x)
    for (int y = 0; y < s; ++y) {
      // compare against the representative with x shifted to the origin
      int d = g.difference(y, x);
      auto ref = k.matrix.block<4, 4>(0, 4 * d);
      r = std::max(r, (k.matrix.block<4, 4>(4 * x, 4 * y) - ref).cwiseAbs().maxCoeff());
    }
  return r;
}

Matrix structure_kernel(const LatticeConfig& cfg, cplx c, bool gamma0) {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(cfg.site_count(), cfg.site_count());
  Matrix4 s = gamma0 ? gammas().gamma[0] : Matrix4::Identity();
  return (c / cfg.cell()) * kron(id, s);
}

const std::vector<KernelExpectation>& eqtime_reference() {
  static const std::vector<KernelExpectation> ref = {
      {Field::Psi, Field::Psi, 0.0, false},
      {Field::Psi, Field::Pi, 0.5, false},
      {Field::Psi, Field::PsiBar, -I, true},
      {Field::Psi, Field::PiBar, 0.0, false},
      {Field::Pi, Field::Pi, 0.0, false},
      {Field::Pi, Field::PsiBar, 0.0, false},
      {Field::Pi, Field::PiBar, -0.25 * I, true},
      {Field::PsiBar, Field::PsiBar, 0.0, false},
      {Field::PsiBar, Field::PiBar, -0.5, false},
      {Field::PiBar, Field::PiBar, 0.0, false},
  };
  return ref;
}

// ---------------------------------------------------------------------------

DiracLattice::DiracLattice(LatticeConfig cfg) : cfg_(cfg), geom_((cfg.validate(), cfg)) {
  const int s = geom_.site_count();
  const int n = 4 * s;
  const auto& g = gammas().gamma;
  for (int j = 0; j < cfg_.dim; ++j) d_.push_back(geom_.symmetric_difference(j));

  const double inv_cell = 1.0 / cfg_.cell();
  omega_ = Matrix::Zero(16 * s, 16 * s);
  for (int k = 0; k < n; ++k) {
    omega_(offset(Field::Psi) + k, offset(Field::Pi) + k) = inv_cell;
    omega_(offset(Field::Pi) + k, offset(Field::Psi) + k) = inv_cell;
    omega_(offset(Field::PsiBar) + k, offset(Field::PiBar) + k) = -inv_cell;
    omega_(offset(Field::PiBar) + k, offset(Field::PsiBar) + k) = -inv_cell;
  }

  // chi1 = pi - (i/2) psibar gamma0, chi2 = pibar + (i/2) gamma0 psi
  phi_ = Matrix::Zero(2 * n, 16 * s);
  for (int x = 0; x < s; ++x)
    for (int l = 0; l < 4; ++l) {
      phi_(4 * x + l, index(Field::Pi, x, l)) = 1.0;
      phi_(n + 4 * x + l, index(Field::PiBar, x, l)) = 1.0;
      for (int k = 0; k < 4; ++k) {
        phi_(4 * x + l, index(Field::PsiBar, x, k)) = -0.5 * I * g[0](k, l);
        phi_(n + 4 * x + l, index(Field::Psi, x, k)) = 0.5 * I * g[0](l, k);
      }
    }

  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(s, s);
  b_ = -I * cfg_.mass * kron(id, g[0]);
  for (int j = 0; j < cfg_.dim; ++j) b_ -= kron(d_[j], g[0] * g[j + 1]);
}

int DiracLattice::offset(Field f) const { return int(f) * components(); }

int DiracLattice::index(Field f, int site, int l) const { return offset(f) + 4 * site + l; }

Matrix DiracLattice::block(const Matrix& m, Field r, Field c) const {
  return m.block(offset(r), offset(c), components(), components());
}

Matrix DiracLattice::hamiltonian_matrix() const {
  const auto& g = gammas().gamma;
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(geom_.site_count(), geom_.site_count());
  Matrix a = cfg_.mass * kron(id, Matrix4::Identity());
  for (int j = 0; j < cfg_.dim; ++j) a -= I * kron(d_[j], g[j + 1]);
  return cfg_.cell() * kron(id, g[0]) * a;
}

Matrix DiracLattice::hamiltonian_form() const {
  const auto& g = gammas().gamma;
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(geom_.site_count(), geom_.site_count());
  Matrix a = cfg_.mass * kron(id, Matrix4::Identity());
  for (int j = 0; j < cfg_.dim; ++j) a -= I * kron(d_[j], g[j + 1]);
  Matrix form = Matrix::Zero(phase_dim(), phase_dim());
  form.block(offset(Field::PsiBar), offset(Field::Psi), components(), components()) = cfg_.cell() * a;
  return form;
}

Matrix DiracLattice::first_class_form() const {
  const auto& g = gammas().gamma;
  const int n = components();
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(geom_.site_count(), geom_.site_count());
  // U1 = B psi; U2 = -d_j psibar gamma^j gamma^0 + i m psibar gamma^0 (row)
  Matrix u1 = Matrix::Zero(n, phase_dim());
  u1.block(0, offset(Field::Psi), n, n) = b_;
  Matrix u2coef = I * cfg_.mass * kron(id, g[0].transpose());
  for (int j = 0; j < cfg_.dim; ++j) u2coef -= kron(d_[j], (g[j + 1] * g[0]).transpose());
  Matrix u2 = Matrix::Zero(n, phase_dim());
  u2.block(0, offset(Field::PsiBar), n, n) = u2coef;
  Matrix phi1 = phi_.topRows(n), phi2 = phi_.bottomRows(n);
  return hamiltonian_form() + cfg_.cell() * (phi1.transpose() * u1 + u2.transpose() * phi2);
}

Matrix DiracLattice::flow() const {
  Matrix a = first_class_form();
  return omega_ * (a - a.transpose());
}

Matrix DiracLattice::dirac_matrix() const {
  Matrix c = phi_ * omega_ * phi_.transpose();
  Matrix right = phi_ * omega_;
  Matrix solved = c.partialPivLu().solve(right);
  return omega_ - right.transpose() * solved;
}

// ---------------------------------------------------------------------------

ConstraintMatrices constraint_matrix(const DiracLattice& model) {
  const auto& phi = model.constraint_rows();
  Matrix c = phi * model.omega() * phi.transpose();
  Eigen::FullPivLU<Matrix> lu(c);
  if (!lu.isInvertible()) throw std::runtime_error("constraint matrix is singular");
  const double cell = model.config().cell();
  Matrix inv = lu.inverse() / (cell * cell);
  ConstraintMatrices out;
  out.c = {"C", Field::Pi, Field::PiBar, c};
  out.c_inverse = {"C^-1", Field::Pi, Field::PiBar, inv};
  Matrix prod = cell * (c * cell * inv);
  out.inverse_residual = max_abs(prod - Matrix::Identity(c.rows(), c.cols()));
  return out;
}

std::vector<BracketKernel> equal_time_gdb(const DiracLattice& model) {
  Matrix k = model.dirac_matrix();
  std::vector<BracketKernel> out;
  for (const auto& ref : eqtime_reference()) {
    std::string label = std::string("[") + to_string(ref.row) + "," + to_string(ref.col) + "]";
    out.push_back({label, ref.row, ref.col, model.block(k, ref.row, ref.col)});
  }
  return out;
}

BracketKernel quantize(const BracketKernel& k) {
  return {"{" + k.label.substr(1, k.label.size() - 2) + "}", k.row, k.col, I * k.matrix};
}

double b_square_residual(const DiracLattice& model) {
  const auto& cfg = model.config();
  Eigen::MatrixXd l = model.geometry().laplacian();
  l -= cfg.mass * cfg.mass * Eigen::MatrixXd::Identity(l.rows(), l.cols());
  const Matrix& b = model.b_operator();
  return max_abs(b * b - kron(l, Matrix4::Identity()));
}

BracketKernel series_anticommutator(const DiracLattice& model, double tau, int n_max) {
  if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
  const auto& cfg = model.config();
  Matrix term = structure_kernel(cfg, -I, true);
  Matrix sum = term;
  for (int n = 1; n <= n_max; ++n) {
    term = (tau / n) * (model.b_operator() * term);
    sum += term;
  }
  return {"[psi(t+tau),psibar(t)] series", Field::Psi, Field::PsiBar, sum};
}

// ---------------------------------------------------------------------------
// mode sums

namespace {

struct ModeSum {
  std::vector<std::vector<int>> n;
  std::vector<double> energy;
};

ModeSum modes_of(const DiracLattice& model) {
  const auto& cfg = model.config();
  const auto& geom = model.geometry();
  ModeSum out;
  for (int m = 0; m < geom.site_count(); ++m) {
    auto n = geom.coords(m);
    double e2 = cfg.mass * cfg.mass;
    for (int j = 0; j < cfg.dim; ++j) {
      double s = std::sin(2 * std::numbers::pi * n[j] / cfg.sites) / cfg.spacing;
      e2 += s * s;
    }
    out.n.push_back(std::move(n));
    out.energy.push_back(std::sqrt(e2));
  }
  return out;
}

double phase(const std::vector<int>& n, const std::vector<int>& c, int sites) {
  long dot = 0;
  for (std::size_t j = 0; j < n.size(); ++j) dot += long(n[j]) * c[j];
  return 2 * std::numbers::pi * double(dot % sites) / sites;
}

}  // namespace

Vector delta_derivative(const DiracLattice& model, double t, int order) {
  const auto& cfg = model.config();
  const auto& geom = model.geometry();
  ModeSum ms = modes_of(model);
  const double vol = cfg.volume();
  Vector out = Vector::Zero(geom.site_count());
  for (int x = 0; x < geom.site_count(); ++x) {
    auto c = geom.coords(x);
    cplx acc = 0;
    for (std::size_t p = 0; p < ms.n.size(); ++p) {
      double e = ms.energy[p];
      double th = phase(ms.n[p], c, cfg.sites);
      if (e < 1e-300) {
        // E -> 0 limit of the odd combination: -i t cos(theta) / V
        double ct = std::cos(th);
        if (order == 0) acc += -I * t * ct / vol;
        if (order == 1) acc += -I * ct / vol;
        continue;
      }
      cplx w = 1.0 / (vol * 2.0 * e);
      cplx fwd = std::pow(-I * e, order) * std::exp(-I * (e * t - th));
      cplx bwd = std::pow(I * e, order) * std::exp(I * (e * t - th));
      acc += w * (fwd - bwd);
    }
    out(x) = acc;
  }
  return out;
}

DeltaFunction delta_function(const DiracLattice& model, double t) {
  DeltaFunction d;
  d.t = t;
  d.values = delta_derivative(model, t, 0);
  d.energies = modes_of(model).energy;
  return d;
}

double max_energy(const DiracLattice& model) {
  auto e = modes_of(model).energy;
  return *std::max_element(e.begin(), e.end());
}

LemmaReport verify_lemma(const DiracLattice& model, int k, double tol) {
  if (k < 0) throw std::invalid_argument("k must be non-negative");
  const auto& cfg = model.config();
  Eigen::MatrixXd op = model.geometry().laplacian();
  op -= cfg.mass * cfg.mass * Eigen::MatrixXd::Identity(op.rows(), op.cols());
  Eigen::VectorXd lhs = Eigen::VectorXd::Zero(op.rows());
  lhs(0) = 1.0 / cfg.cell();
  for (int r = 0; r < k; ++r) lhs = op * lhs;
  Vector rhs = I * delta_derivative(model, 0.0, 2 * k + 1);
  LemmaReport rep;
  rep.k = k;
  double scale = std::max(1.0, lhs.cwiseAbs().maxCoeff());
  rep.residual = (lhs.cast<cplx>() - rhs).cwiseAbs().maxCoeff() / scale;
  rep.passed = rep.residual <= tol;
  return rep;
}

BracketKernel closed_form_anticommutator(const DiracLattice& model, double tau) {
  const auto& cfg = model.config();
  const auto& geom = model.geometry();
  const auto& g = gammas().gamma;
  Vector delta = delta_derivative(model, tau, 0);
  Vector delta_t = delta_derivative(model, tau, 1);
  const int s = geom.site_count();
  Matrix k = Matrix::Zero(4 * s, 4 * s);
  for (int xp = 0; xp < s; ++xp)
    for (int x = 0; x < s; ++x) {
      int r = geom.difference(xp, x);
      Matrix4 op = I * g[0] * delta_t(r) + cfg.mass * delta(r) * Matrix4::Identity();
      for (int j = 0; j < cfg.dim; ++j) {
        cplx dj = (delta(geom.shift(r, j, 1)) - delta(geom.shift(r, j, -1))) / (2.0 * cfg.spacing);
        op += I * g[j + 1] * dj;
      }
      k.block<4, 4>(4 * xp, 4 * x) = -I * op;
    }
  return {"[psi(t+tau),psibar(t)] closed form", Field::Psi, Field::PsiBar, k};
}

double derivative_delta_parity(const DiracLattice& model) {
  const auto& geom = model.geometry();
  double r = 0;
  for (int j = 0; j < model.config().dim; ++j) {
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(geom.site_count());
    delta(0) = 1.0 / model.config().cell();
    Eigen::VectorXd d = geom.symmetric_difference(j) * delta;
    for (int x = 0; x < geom.site_count(); ++x) {
      int minus = geom.difference(0, x);
      r = std::max(r, std::abs(d(minus) + d(x)));
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// equations of motion

bool EomReport::passed(double tol) const {
  for (double r : line_residual)
    if (r > tol) return false;
  return tangency <= tol && dirac <= tol && consistency <= tol;
}

EomReport equations_of_motion_check(const DiracLattice& model) {
  const auto& cfg = model.config();
  const auto& g = gammas().gamma;
  const int s = model.geometry().site_count();
  const int n = model.components();
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(s, s);
  std::vector<Eigen::MatrixXd> d;
  for (int j = 0; j < cfg.dim; ++j) d.push_back(model.geometry().symmetric_difference(j));

  const Matrix flow = model.flow();
  std::array<Matrix, 4> expected;
  expected[0] = model.b_operator();
  expected[1] = I * cfg.mass * kron(id, g[0].transpose());
  expected[2] = I * cfg.mass * kron(id, g[0].transpose());
  expected[3] = -I * cfg.mass * kron(id, g[0]);
  for (int j = 0; j < cfg.dim; ++j) {
    expected[1] -= kron(d[j], (g[j + 1] * g[0]).transpose());
    expected[2] -= kron(d[j], (g[0] * g[j + 1]).transpose());
    expected[3] -= kron(d[j], g[j + 1] * g[0]);
  }
  const std::array<Field, 4> rows = {Field::Psi, Field::PsiBar, Field::Pi, Field::PiBar};
  EomReport rep;
  for (int k = 0; k < 4; ++k) {
    Matrix want = Matrix::Zero(n, model.phase_dim());
    want.block(0, model.offset(rows[k]), n, n) = expected[k];
    rep.line_residual[k] = max_abs(flow.middleRows(model.offset(rows[k]), n) - want);
  }

  // constraint surface parametrized by (psi, psibar)
  Matrix p = Matrix::Zero(model.phase_dim(), 2 * n);
  p.block(model.offset(Field::Psi), 0, n, n) = Matrix::Identity(n, n);
  p.block(model.offset(Field::PsiBar), n, n, n) = Matrix::Identity(n, n);
  p.block(model.offset(Field::Pi), n, n, n) = kron(id, (0.5 * I * g[0]).transpose());
  p.block(model.offset(Field::PiBar), 0, n, n) = kron(id, -0.5 * I * g[0]);
  Matrix mp = flow * p;
  Matrix reduced(2 * n, 2 * n);
  reduced.topRows(n) = mp.middleRows(model.offset(Field::Psi), n);
  reduced.bottomRows(n) = mp.middleRows(model.offset(Field::PsiBar), n);
  rep.tangency = max_abs(mp - p * reduced);
  rep.dirac = std::max(max_abs(reduced.block(0, 0, n, n) - model.b_operator()),
                       max_abs(reduced.block(0, n, n, n)));

  const Matrix& phi = model.constraint_rows();
  Matrix proj = phi.transpose() * (phi * phi.transpose()).partialPivLu().solve(phi);
  Matrix rate = phi * flow;
  rep.consistency = max_abs(rate - rate * proj);
  return rep;
}

std::vector<double> theorem1_check(const DiracLattice& model, int n_max) {
  const int n = model.components();
  const Matrix flow = model.flow();
  Matrix rows = Matrix::Zero(n, model.phase_dim());
  rows.block(0, model.offset(Field::Psi), n, n) = Matrix::Identity(n, n);
  Matrix bn = Matrix::Identity(n, n);
  std::vector<double> out;
  for (int k = 0; k <= n_max; ++k) {
    if (k > 0) {
      rows = rows * flow;
      bn = bn * model.b_operator();
    }
    Matrix want = Matrix::Zero(n, model.phase_dim());
    want.block(0, model.offset(Field::Psi), n, n) = bn;
    out.push_back(max_abs(rows - want) / std::max(1.0, max_abs(bn)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// modes and ladder operators

int ModeBasis::mode_index(const std::vector<int>& n) const {
  for (std::size_t k = 0; k < modes.size(); ++k)
    if (modes[k].n == n) return int(k);
  return -1;
}

ModeBasis mode_expansion(const DiracLattice& model) {
  const auto& cfg = model.config();
  if (!(cfg.mass > 0)) {
    throw UnsupportedConfiguration("mode expansion needs m > 0 (massless zero modes are degenerate)");
  }
  const auto& g = gammas().gamma;
  ModeSum ms = modes_of(model);
  ModeBasis basis;
  for (std::size_t k = 0; k < ms.n.size(); ++k) {
    Mode mode;
    mode.n = ms.n[k];
    mode.energy = ms.energy[k];
    Matrix4 pslash = mode.energy * g[0];
    for (int j = 0; j < cfg.dim; ++j) {
      double kj = 2 * std::numbers::pi * mode.n[j] / (cfg.sites * cfg.spacing);
      mode.k.push_back(kj);
      mode.p.push_back(std::sin(kj * cfg.spacing) / cfg.spacing);
      pslash -= mode.p.back() * g[j + 1];
    }
    const Matrix4 id = Matrix4::Identity();
    Matrix4 minus = pslash - cfg.mass * id, plus = pslash + cfg.mass * id;
    mode.rank_u = 4 - int(Eigen::FullPivLU<Matrix4>(minus).setThreshold(1e-10).rank());
    mode.rank_v = 4 - int(Eigen::FullPivLU<Matrix4>(plus).setThreshold(1e-10).rank());

    auto orthonormal = [&](Spinor a, Spinor b) {
      a.normalize();
      b -= a.dot(b) * a;
      b.normalize();
      double s = std::sqrt(2 * mode.energy);
      return std::array<Spinor, 2>{s * a, s * b};
    };
    // (pslash + m)(pslash - m) = 0 on shell, so columns of pslash +- m span the solutions
    mode.u = orthonormal(plus.col(0), plus.col(1));
    mode.v = orthonormal(minus.col(2), minus.col(3));
    mode.residual = 0;
    for (int s = 0; s < 2; ++s) {
      mode.residual = std::max(mode.residual, (minus * mode.u[s]).cwiseAbs().maxCoeff());
      mode.residual = std::max(mode.residual, (plus * mode.v[s]).cwiseAbs().maxCoeff());
    }
    Eigen::Matrix<cplx, 4, 2> uu;
    uu << mode.u[0], mode.u[1];
    Eigen::JacobiSVD<Eigen::Matrix2cd> svd(uu.adjoint() * uu);
    auto sv = svd.singularValues();
    mode.gram_condition = sv(0) / sv(1);
    if (!(mode.gram_condition < 1e12)) {
      throw std::runtime_error("ill-conditioned mode inversion: condition number " +
                               std::to_string(mode.gram_condition));
    }
    basis.modes.push_back(std::move(mode));
  }
  return basis;
}

bool LadderReport::passed(double tol) const {
  return max_diagonal_error <= tol && max_offdiagonal <= tol && max_orthogonality <= tol;
}

LadderReport ladder_algebra(const DiracLattice& model, const ModeBasis& basis) {
  const auto& cfg = model.config();
  const auto& geom = model.geometry();
  const int s = geom.site_count();
  const int n = model.components();
  const std::size_t nm = basis.modes.size();
  const Matrix& b = model.b_operator();

  // rows: a_sigma(p) for all (p, sigma), then a^c dagger_sigma(p)
  Matrix ops = Matrix::Zero(4 * nm, n);
  std::vector<double> energy(4 * nm);
  for (std::size_t m = 0; m < nm; ++m) {
    const Mode& mode = basis.modes[m];
    for (int sg = 0; sg < 2; ++sg) {
      Eigen::RowVectorXcd ru(n), rv(n);
      for (int x = 0; x < s; ++x) {
        double th = phase(mode.n, geom.coords(x), cfg.sites);
        for (int l = 0; l < 4; ++l) {
          ru(4 * x + l) = std::exp(-I * th) * std::conj(mode.u[sg](l));
          rv(4 * x + l) = std::exp(I * th) * std::conj(mode.v[sg](l));
        }
      }
      const double f = cfg.cell() / (2 * mode.energy);
      std::size_t ia = 2 * m + sg, ic = 2 * nm + 2 * m + sg;
      ops.row(ia) = f * (mode.energy * ru + I * (ru * b));
      ops.row(ic) = f * (mode.energy * rv - I * (rv * b));
      energy[ia] = energy[ic] = mode.energy;
    }
  }

  Matrix k = model.dirac_matrix();
  Matrix q_bar = I * model.block(k, Field::Psi, Field::PsiBar);
  Matrix q_psi = I * model.block(k, Field::Psi, Field::Psi);
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(s, s);
  Matrix to_dagger = kron(id, gammas().gamma[0]);  // psi^dagger = psibar gamma^0
  Matrix mixed = ops * q_bar * to_dagger * ops.adjoint();
  Matrix same = ops * q_psi * ops.transpose();

  LadderReport rep;
  rep.expected_diagonal_scale = cfg.volume();
  double top = 0;
  for (Eigen::Index i = 0; i < ops.rows(); ++i) top = std::max(top, 2 * energy[i] * cfg.volume());
  for (Eigen::Index i = 0; i < mixed.rows(); ++i)
    for (Eigen::Index j = 0; j < mixed.cols(); ++j) {
      if (i == j) {
        double want = 2 * energy[i] * cfg.volume();
        rep.max_diagonal_error = std::max(rep.max_diagonal_error, std::abs(mixed(i, j) - want) / want);
      } else {
        rep.max_offdiagonal = std::max(rep.max_offdiagonal, std::abs(mixed(i, j)) / top);
      }
    }
  rep.max_offdiagonal = std::max(rep.max_offdiagonal, max_abs(same) / top);

  for (std::size_t m = 0; m < nm; ++m) {
    std::vector<int> neg = basis.modes[m].n;
    for (auto& c : neg) c = (cfg.sites - c) % cfg.sites;
    const Mode& other = basis.modes[basis.mode_index(neg)];
    for (int a = 0; a < 2; ++a)
      for (int c = 0; c < 2; ++c) {
        double o = std::abs(basis.modes[m].u[a].dot(other.v[c])) / (2 * basis.modes[m].energy);
        rep.max_orthogonality = std::max(rep.max_orthogonality, o);
      }
  }
  return rep;
}

}  // namespace gham::lattice
