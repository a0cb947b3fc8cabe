#include "gham/rational.hpp"

#include <stdexcept>

namespace gham {

CRational CRational::from_double(double re, double im) {
  return {mpq_class(re), mpq_class(im)};
}

CRational CRational::inverse() const {
  mpq_class norm = re_ * re_ + im_ * im_;
  if (sgn(norm) == 0) throw std::domain_error("division by zero coefficient");
  return {re_ / norm, -im_ / norm};
}

CRational& CRational::operator+=(const CRational& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

CRational& CRational::operator-=(const CRational& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

CRational& CRational::operator*=(const CRational& o) {
  if (sgn(im_) == 0 && sgn(o.im_) == 0) {
    re_ *= o.re_;
    return *this;
  }
  mpq_class re = re_ * o.re_ - im_ * o.im_;
  mpq_class im = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

std::strong_ordering operator<=>(const CRational& a, const CRational& b) {
  int c = cmp(a.re_, b.re_);
  if (c == 0) c = cmp(a.im_, b.im_);
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

namespace {

std::string imag_part(const mpq_class& im) {
  if (im == 1) return "i";
  if (im == -1) return "-i";
  return im.get_str() + "*i";
}

}  // namespace

std::string CRational::to_string() const {
  if (sgn(im_) == 0) return re_.get_str();
  if (sgn(re_) == 0) return imag_part(im_);
  std::string s = "(" + re_.get_str();
  if (sgn(im_) > 0) {
    s += " + " + imag_part(im_);
  } else {
    s += " - " + imag_part(mpq_class(-im_));
  }
  return s + ")";
}

std::ostream& operator<<(std::ostream& os, const CRational& c) { return os << c.to_string(); }

}  // namespace gham
