#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gham/exact_matrix.hpp"
#include "gham/poly.hpp"
#include "support/grassmann_oracle.hpp"

using namespace gham;

namespace {

struct Odd {
  UniversePtr u = make_universe();
  std::vector<GeneratorId> ids;
  explicit Odd(unsigned n) {
    for (unsigned k = 0; k < n; ++k) ids.push_back(u->add("t" + std::to_string(k + 1), Parity::Odd));
  }
  Poly g(unsigned k) const { return Poly::generator(u, ids[k]); }
  Poly basis(std::uint32_t mask) const {
    Poly p(CRational(1), u);
    for (unsigned k = 0; k < ids.size(); ++k)
      if (mask >> k & 1u) p = p * g(k);
    return p;
  }
};

Poly random_poly(const Odd& a, std::mt19937_64& rng, unsigned terms) {
  std::uniform_int_distribution<std::uint32_t> mask(0, (1u << a.ids.size()) - 1);
  std::uniform_int_distribution<long> coef(-4, 4);
  Poly p(CRational(), a.u);
  for (unsigned t = 0; t < terms; ++t) {
    // random factor order exercises the reordering sign
    std::vector<unsigned> order;
    auto m = mask(rng);
    for (unsigned k = 0; k < a.ids.size(); ++k)
      if (m >> k & 1u) order.push_back(k);
    std::shuffle(order.begin(), order.end(), rng);
    Poly term(CRational(mpq_class(coef(rng)), mpq_class(coef(rng))), a.u);
    for (auto k : order) term = term * a.g(k);
    p += term;
  }
  return p;
}

}  // namespace

TEST_CASE("odd generators are nilpotent and anticommute") {
  Odd a(2);
  CHECK((a.g(0) * a.g(0)).is_zero());
  CHECK((a.g(0) * a.g(1) + a.g(1) * a.g(0)).is_zero());
}

TEST_CASE("even generators commute with odd ones") {
  auto u = make_universe();
  auto q = Poly::generator(u, u->add("q", Parity::Even));
  auto t = Poly::generator(u, u->add("t", Parity::Odd));
  CHECK((q * t - t * q).is_zero());
  CHECK(pow(q, 3).to_string() == "q^3");
}

TEST_CASE("parity split") {
  Odd a(2);
  Poly one(CRational(1), a.u);
  auto [e, o] = parity_split(one + a.g(0));
  CHECK(e == one);
  CHECK(o == a.g(0));
  auto [e2, o2] = parity_split(a.g(0) * a.g(1));
  CHECK(e2 == a.g(0) * a.g(1));
  CHECK(o2.is_zero());
  auto [e3, o3] = parity_split(Poly());
  CHECK(e3.is_zero());
  CHECK(o3.is_zero());
}

TEST_CASE("left and right derivatives of a product") {
  Odd a(2);
  auto f = a.g(0) * a.g(1);
  CHECK(derivative(f, a.ids[0], Side::Left) == a.g(1));
  CHECK(derivative(f, a.ids[0], Side::Right) == -a.g(1));
  auto u = a.u;
  auto q = Poly::generator(u, u->add("q", Parity::Even));
  CHECK(derivative(q * a.g(0), u->find("q").value(), Side::Left) == a.g(0));
  CHECK(derivative(q * a.g(0), u->find("q").value(), Side::Right) == a.g(0));
  CHECK_THROWS_AS(derivative(f, 99, Side::Left), UnknownGenerator);
}

TEST_CASE("universe mismatch is rejected") {
  Odd a(1), b(1);
  CHECK_THROWS_AS(a.g(0) * b.g(0), UniverseMismatch);
}

TEST_CASE("products agree with the dense oracle on every basis pair") {
  Odd a(5);
  for (std::uint32_t x = 0; x < 32; ++x)
    for (std::uint32_t y = 0; y < 32; ++y) {
      auto lhs = oracle::from_poly(a.basis(x) * a.basis(y), a.ids);
      auto rhs = oracle::Dense::basis(5, x) * oracle::Dense::basis(5, y);
      REQUIRE(lhs == rhs);
    }
}

TEST_CASE("derivatives agree with the variation-definition oracle") {
  Odd a(5);
  for (std::uint32_t s = 0; s < 32; ++s) {
    auto f = a.basis(s);
    auto df = oracle::from_poly(f, a.ids);
    for (unsigned k = 0; k < 5; ++k) {
      REQUIRE(oracle::from_poly(derivative(f, a.ids[k], Side::Left), a.ids) ==
              oracle::left_derivative(df, k));
      REQUIRE(oracle::from_poly(derivative(f, a.ids[k], Side::Right), a.ids) ==
              oracle::right_derivative(df, k));
    }
  }
}

TEST_CASE("graded commutativity, associativity and canonical form on random polys") {
  Odd a(5);
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    auto x = random_poly(a, rng, 4), y = random_poly(a, rng, 4), z = random_poly(a, rng, 4);
    CHECK((x * y) * z == x * (y * z));
    auto [xe, xo] = parity_split(x);
    auto [ye, yo] = parity_split(y);
    CHECK(xe * y == y * xe);
    CHECK(xo * yo == -(yo * xo));
    CHECK(oracle::from_poly(x * y, a.ids) ==
          oracle::from_poly(x, a.ids) * oracle::from_poly(y, a.ids));
  }
  // two construction orders
  CHECK(a.g(2) * a.g(0) * a.g(1) == a.g(0) * a.g(1) * a.g(2));
  CHECK(a.g(1) * a.g(0) * a.g(2) == -(a.g(0) * a.g(1) * a.g(2)));
}

TEST_CASE("derivative parity and side relation") {
  Odd a(4);
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 40; ++rep) {
    auto [fe, fo] = parity_split(random_poly(a, rng, 5));
    for (unsigned k = 0; k < 4; ++k) {
      auto id = a.ids[k];
      CHECK(derivative(fe, id, Side::Left) == -derivative(fe, id, Side::Right));
      CHECK(derivative(fo, id, Side::Left) == derivative(fo, id, Side::Right));
      CHECK(derivative(fe, id, Side::Left).is_odd());
      CHECK(derivative(fo, id, Side::Right).is_even());
    }
  }
}

TEST_CASE("mixed second-derivative identities, exhaustive over six odd generators") {
  Odd a(6);
  for (std::uint32_t s = 0; s < 64; ++s) {
    auto f = a.basis(s);
    for (auto k : a.ids)
      for (auto l : a.ids) {
        auto rep = check_mixed_derivative_identities(f, k, l);
        REQUIRE_MESSAGE(rep.passed, rep.violated);
      }
  }
  Odd b(3);
  CHECK(check_mixed_derivative_identities(b.g(0) * b.g(1) * b.g(2), b.ids[0], b.ids[1]).passed);
  CHECK(check_mixed_derivative_identities(b.g(0), b.ids[0], b.ids[0]).passed);
  auto u = b.u;
  auto q = u->add("q", Parity::Even);
  CHECK_THROWS_AS(check_mixed_derivative_identities(b.g(0), q, b.ids[0]), std::invalid_argument);
}

TEST_CASE("mixed derivative identities on random degree <= 4 polys in four generators") {
  Odd a(4);
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 30; ++rep) {
    auto f = random_poly(a, rng, 6);
    for (auto k : a.ids)
      for (auto l : a.ids) CHECK(check_mixed_derivative_identities(f, k, l).passed);
  }
}

TEST_CASE("substitution is a parity-preserving homomorphism") {
  Odd a(3);
  auto f = a.g(0) * a.g(1) + a.g(2);
  auto img = substitute(f, {{a.ids[0], a.g(2)}});
  CHECK(img == a.g(2) * a.g(1) + a.g(2));
  CHECK_THROWS_AS(substitute(f, {{a.ids[0], a.g(1) * a.g(2)}}), std::invalid_argument);
}

TEST_CASE("printing") {
  Odd a(2);
  CHECK((a.g(1) * a.g(0)).to_string() == "-t1*t2");
  CHECK(Poly(CRational::i()).to_string() == "i");
  CHECK(Poly(-CRational::i()).to_string() == "-i");
  CHECK((CRational::fraction(1, 2) * CRational::i() * a.g(0)).to_string() == "1/2*i*t1");
  CHECK(Poly(CRational(mpq_class(1), mpq_class(-2))).to_string() == "(1 - 2*i)");
}

TEST_CASE("exact linear algebra") {
  ExactMatrix m(2, 2);
  m(0, 1) = CRational::i();
  m(1, 0) = -CRational::i();
  auto inv = inverse(m);
  REQUIRE(inv);
  CHECK(m * *inv == ExactMatrix::identity(2));
  ExactMatrix s(2, 3);
  s(0, 0) = 1;
  s(0, 1) = 2;
  s(1, 0) = 2;
  s(1, 1) = 4;
  CHECK(rank(s) == 1);
  auto ns = null_space(s);
  CHECK(ns.size() == 2);
  for (const auto& v : ns) {
    for (std::size_t r = 0; r < 2; ++r) {
      CRational acc;
      for (std::size_t c = 0; c < 3; ++c) acc += s(r, c) * v[c];
      CHECK(acc.is_zero());
    }
  }
  CHECK_FALSE(inverse(s));
}
