#include "gham/exact_matrix.hpp"

#include <stdexcept>

namespace gham {

ExactMatrix ExactMatrix::identity(std::size_t n) {
  ExactMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = CRational(1);
  return m;
}

ExactMatrix ExactMatrix::transpose() const {
  ExactMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

ExactMatrix ExactMatrix::submatrix(const std::vector<std::size_t>& rows,
                                   const std::vector<std::size_t>& cols) const {
  ExactMatrix s(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) s(r, c) = (*this)(rows[r], cols[c]);
  return s;
}

bool ExactMatrix::is_zero() const {
  for (const auto& v : data_)
    if (!v.is_zero()) return false;
  return true;
}

ExactMatrix operator*(const ExactMatrix& a, const ExactMatrix& b) {
  if (a.cols_ != b.rows_) throw std::invalid_argument("matrix dimension mismatch");
  ExactMatrix p(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const CRational& x = a(i, k);
      if (x.is_zero()) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) {
        if (!b(k, j).is_zero()) p(i, j) += x * b(k, j);
      }
    }
  return p;
}

std::string ExactMatrix::to_string() const {
  std::string s = "[";
  for (std::size_t r = 0; r < rows_; ++r) {
    s += r ? "; " : "";
    for (std::size_t c = 0; c < cols_; ++c) s += (c ? ", " : "") + (*this)(r, c).to_string();
  }
  return s + "]";
}

namespace {

// Gauss-Jordan elimination; `on_row_op` mirrors each row operation onto a payload.
template <typename Payload>
RowEchelon eliminate(ExactMatrix m, std::vector<Payload>* payload) {
  RowEchelon out;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t p = row;
    while (p < m.rows() && m(p, col).is_zero()) ++p;
    if (p == m.rows()) continue;
    if (p != row) {
      for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(p, c), m(row, c));
      if (payload) std::swap((*payload)[p], (*payload)[row]);
    }
    CRational inv = m(row, col).inverse();
    for (std::size_t c = 0; c < m.cols(); ++c) m(row, c) *= inv;
    if (payload) (*payload)[row] *= inv;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == row || m(r, col).is_zero()) continue;
      CRational f = m(r, col);
      for (std::size_t c = 0; c < m.cols(); ++c) {
        if (!m(row, c).is_zero()) m(r, c) -= f * m(row, c);
      }
      if (payload) (*payload)[r] -= (*payload)[row] * f;
    }
    out.pivots.push_back(col);
    ++row;
  }
  out.reduced = std::move(m);
  return out;
}

}  // namespace

RowEchelon rref(ExactMatrix m) { return eliminate<Poly>(std::move(m), nullptr); }

std::size_t rank(const ExactMatrix& m) { return rref(m).pivots.size(); }

std::optional<ExactMatrix> inverse(const ExactMatrix& m) {
  if (m.rows() != m.cols()) return std::nullopt;
  const std::size_t n = m.rows();
  ExactMatrix aug(n, 2 * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) aug(r, c) = m(r, c);
    aug(r, n + r) = CRational(1);
  }
  RowEchelon e = rref(std::move(aug));
  if (e.pivots.size() < n || (n > 0 && e.pivots[n - 1] != n - 1)) return std::nullopt;
  std::vector<std::size_t> rows(n), cols(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i] = i;
    cols[i] = n + i;
  }
  return e.reduced.submatrix(rows, cols);
}

std::vector<std::vector<CRational>> null_space(const ExactMatrix& m) {
  RowEchelon e = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : e.pivots) is_pivot[p] = true;
  std::vector<std::vector<CRational>> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<CRational> v(m.cols());
    v[free] = CRational(1);
    for (std::size_t r = 0; r < e.pivots.size(); ++r) v[e.pivots[r]] = -e.reduced(r, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

PolyLinearSolution solve_linear(const ExactMatrix& a, const std::vector<Poly>& b) {
  if (b.size() != a.rows()) throw std::invalid_argument("right-hand side size mismatch");
  std::vector<Poly> rhs = b;
  RowEchelon e = eliminate(a, &rhs);
  PolyLinearSolution s;
  s.particular.assign(a.cols(), Poly());
  for (std::size_t r = 0; r < e.pivots.size(); ++r) s.particular[e.pivots[r]] = rhs[r];
  for (std::size_t r = e.pivots.size(); r < rhs.size(); ++r) {
    if (!rhs[r].is_zero()) s.obstructions.push_back(rhs[r]);
  }
  s.homogeneous_basis = null_space(a);
  return s;
}

}  // namespace gham
