#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gham/poly.hpp"
#include "gham/rational.hpp"

namespace gham {

// Dense matrix over CRational.
class ExactMatrix {
 public:
  ExactMatrix() = default;
  ExactMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  static ExactMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  CRational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const CRational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  ExactMatrix transpose() const;
  ExactMatrix submatrix(const std::vector<std::size_t>& rows,
                        const std::vector<std::size_t>& cols) const;
  bool is_zero() const;

  friend ExactMatrix operator*(const ExactMatrix& a, const ExactMatrix& b);
  friend bool operator==(const ExactMatrix& a, const ExactMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  std::string to_string() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<CRational> data_;
};

struct RowEchelon {
  ExactMatrix reduced;              // reduced row echelon form
  std::vector<std::size_t> pivots;  // pivot column of each nonzero row
};

RowEchelon rref(ExactMatrix m);
std::size_t rank(const ExactMatrix& m);
std::optional<ExactMatrix> inverse(const ExactMatrix& m);
// Basis of {x : m x = 0}; each vector has a 1 in its free coordinate.
std::vector<std::vector<CRational>> null_space(const ExactMatrix& m);

// Solution of A x = b where b holds polynomials and A is constant.
struct PolyLinearSolution {
  std::vector<Poly> particular;                           // free unknowns set to zero
  std::vector<std::vector<CRational>> homogeneous_basis;  // null space of A
  std::vector<Poly> obstructions;  // combinations of b that must vanish for solvability
};

PolyLinearSolution solve_linear(const ExactMatrix& a, const std::vector<Poly>& b);

}  // namespace gham
