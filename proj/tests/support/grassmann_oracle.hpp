#pragma once

// Dense model of the exterior algebra on n odd generators. Basis elements are
// bitmasks; the product sign counts crossings. Derivatives are obtained from the
// variation definition by shifting a generator by an auxiliary odd increment,
// so nothing here shares code with the sparse normal-form implementation.

#include <cstdint>
#include <vector>

#include "gham/poly.hpp"

namespace oracle {

class Dense {
 public:
  explicit Dense(unsigned n) : n_(n), c_(std::size_t{1} << n) {}
  static Dense basis(unsigned n, std::uint32_t mask);
  static Dense generator(unsigned n, unsigned k) { return basis(n, 1u << k); }

  unsigned n() const { return n_; }
  const gham::CRational& operator[](std::uint32_t mask) const { return c_[mask]; }
  gham::CRational& operator[](std::uint32_t mask) { return c_[mask]; }

  Dense operator+(const Dense& o) const;
  Dense operator-(const Dense& o) const;
  Dense operator*(const Dense& o) const;
  Dense scaled(const gham::CRational& s) const;
  bool operator==(const Dense& o) const { return n_ == o.n_ && c_ == o.c_; }

  // Embedding into an algebra with one extra generator placed last.
  Dense widen() const;

 private:
  unsigned n_;
  std::vector<gham::CRational> c_;
};

// delta f = delta(theta_k) * dL f  and  delta f = dR f * delta(theta_k).
Dense left_derivative(const Dense& f, unsigned k);
Dense right_derivative(const Dense& f, unsigned k);

// Converts a polynomial in the odd generators `ids` (ids[k] -> index k).
Dense from_poly(const gham::Poly& p, const std::vector<gham::GeneratorId>& ids);

}  // namespace oracle
