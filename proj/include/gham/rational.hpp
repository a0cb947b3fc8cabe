#pragma once

#include <complex>
#include <compare>
#include <ostream>
#include <string>

#include <gmpxx.h>

namespace gham {

// Exact complex number with rational real and imaginary parts.
class CRational {
 public:
  CRational() = default;
  CRational(long v) : re_(v) {}  // NOLINT(google-explicit-constructor)
  CRational(mpq_class re) : re_(std::move(re)) { re_.canonicalize(); }  // NOLINT
  CRational(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }

  static CRational i() { return {mpq_class(0), mpq_class(1)}; }
  static CRational fraction(long num, long den) { return CRational(mpq_class(num, den)); }
  // Exact binary value of a double (0.5 -> 1/2, 0.1 -> 3602879701896397/36028797018963968).
  static CRational from_double(double re, double im = 0.0);

  const mpq_class& real() const { return re_; }
  const mpq_class& imag() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_one() const { return re_ == 1 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }

  CRational conj() const { return {re_, -im_}; }
  CRational inverse() const;  // throws std::domain_error on zero
  std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

  CRational& operator+=(const CRational& o);
  CRational& operator-=(const CRational& o);
  CRational& operator*=(const CRational& o);
  CRational& operator/=(const CRational& o) { return *this *= o.inverse(); }

  friend CRational operator+(CRational a, const CRational& b) { return a += b; }
  friend CRational operator-(CRational a, const CRational& b) { return a -= b; }
  friend CRational operator*(CRational a, const CRational& b) { return a *= b; }
  friend CRational operator/(CRational a, const CRational& b) { return a /= b; }
  CRational operator-() const { return {-re_, -im_}; }

  friend bool operator==(const CRational& a, const CRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  // Total order (real part first) so coefficients can live in ordered containers.
  friend std::strong_ordering operator<=>(const CRational& a, const CRational& b);

  // Plain form: "3/4", "-i", "1/2*i", "(1 - 2*i)"; parenthesized only when both parts are nonzero.
  std::string to_string() const;

 private:
  mpq_class re_{0};
  mpq_class im_{0};
};

std::ostream& operator<<(std::ostream& os, const CRational& c);

}  // namespace gham
