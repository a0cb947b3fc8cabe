#include "support/grassmann_oracle.hpp"

#include <bit>
#include <stdexcept>

namespace oracle {

using gham::CRational;

Dense Dense::basis(unsigned n, std::uint32_t mask) {
  Dense d(n);
  d.c_[mask] = CRational(1);
  return d;
}

Dense Dense::operator+(const Dense& o) const {
  Dense r = *this;
  for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] += o.c_[i];
  return r;
}

Dense Dense::operator-(const Dense& o) const {
  Dense r = *this;
  for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] -= o.c_[i];
  return r;
}

Dense Dense::scaled(const CRational& s) const {
  Dense r = *this;
  for (auto& v : r.c_) v *= s;
  return r;
}

Dense Dense::operator*(const Dense& o) const {
  Dense r(n_);
  for (std::uint32_t a = 0; a < c_.size(); ++a) {
    if (c_[a].is_zero()) continue;
    for (std::uint32_t b = 0; b < o.c_.size(); ++b) {
      if (o.c_[b].is_zero() || (a & b)) continue;
      // e_a e_b: every bit of b jumps over the bits of a above it.
      int crossings = 0;
      for (std::uint32_t bb = b; bb; bb &= bb - 1) {
        unsigned k = static_cast<unsigned>(std::countr_zero(bb));
        crossings += std::popcount(a >> (k + 1));
      }
      CRational v = c_[a] * o.c_[b];
      r.c_[a | b] += crossings % 2 ? -v : v;
    }
  }
  return r;
}

Dense Dense::widen() const {
  Dense r(n_ + 1);
  for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = c_[i];
  return r;
}

namespace {

// f with theta_k replaced by theta_k + eps (eps = generator n), product by product.
Dense shifted(const Dense& f, unsigned k) {
  const unsigned n = f.n();
  Dense out(n + 1);
  for (std::uint32_t s = 0; s < (1u << n); ++s) {
    if (f[s].is_zero()) continue;
    Dense prod = Dense::basis(n + 1, 0).scaled(f[s]);
    for (unsigned j = 0; j < n; ++j) {
      if (!(s >> j & 1u)) continue;
      Dense factor = Dense::generator(n + 1, j);
      if (j == k) factor = factor + Dense::generator(n + 1, n);
      prod = prod * factor;
    }
    out = out + prod;
  }
  return out;
}

Dense linear_in_eps(const Dense& f, unsigned k, bool left) {
  const unsigned n = f.n();
  Dense d = shifted(f, k) - f.widen();
  Dense x(n);
  const std::uint32_t eps = 1u << n;
  for (std::uint32_t s = 0; s < (1u << n); ++s) {
    const CRational& v = d[s | eps];
    if (v.is_zero()) continue;
    // eps * e_s = (-1)^|s| e_{s|eps};  e_s * eps = e_{s|eps}.
    x[s] = (left && std::popcount(s) % 2) ? -v : v;
  }
  return x;
}

}  // namespace

Dense left_derivative(const Dense& f, unsigned k) { return linear_in_eps(f, k, true); }
Dense right_derivative(const Dense& f, unsigned k) { return linear_in_eps(f, k, false); }

Dense from_poly(const gham::Poly& p, const std::vector<gham::GeneratorId>& ids) {
  const unsigned n = static_cast<unsigned>(ids.size());
  Dense out(n);
  for (const auto& [m, c] : p.terms()) {
    if (!m.even.empty()) throw std::invalid_argument("oracle handles odd generators only");
    Dense term = Dense::basis(n, 0).scaled(c);
    for (auto g : m.odd) {
      unsigned k = 0;
      while (k < n && ids[k] != g) ++k;
      if (k == n) throw std::invalid_argument("generator outside oracle algebra");
      term = term * Dense::generator(n, k);
    }
    out = out + term;
  }
  return out;
}

}  // namespace oracle
