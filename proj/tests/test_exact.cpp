#include <doctest.h>

#include <random>
#include <set>

#include "heckepair/exact.hpp"
#include "support.hpp"

using namespace heckepair;
using namespace testing_support;

namespace {

// Row module of x lies inside the row module of y: x y^-1 integral.
bool rows_inside(const IMat2& x, const IMat2& y) {
  return to_integral(to_rational(x) * inverse(y)).has_value();
}

bool same_row_module(const IMat2& x, const IMat2& y) { return rows_inside(x, y) && rows_inside(y, x); }

// Every lower-triangular candidate with 0 <= c < a and ad = |det|.
std::vector<IMat2> hnf_candidates(const IMat2& m) {
  std::vector<IMat2> out;
  const long n = Int(abs(m.det())).get_si();
  for (long a = 1; a <= n; ++a) {
    if (n % a) continue;
    for (long c = 0; c < a; ++c) {
      const IMat2 h = im(a, 0, c, n / a);
      if (same_row_module(h, m)) out.push_back(h);
    }
  }
  return out;
}

// Divisors found by exhaustive search: d1 = gcd of entries by trial.
Int trial_gcd(const IMat2& m) {
  Int best = 1;
  const long lim = std::max({Int(abs(m.a)), Int(abs(m.b)), Int(abs(m.c)), Int(abs(m.d))}).get_si();
  for (long g = 1; g <= lim; ++g)
    if (m.a % g == 0 && m.b % g == 0 && m.c % g == 0 && m.d % g == 0) best = g;
  return best;
}

}  // namespace

TEST_SUITE("exact") {
  TEST_CASE("hnf of the identity is the identity with trivial transform") {
    const auto r = hnf(IMat2::identity());
    CHECK(r.form.matrix == IMat2::identity());
    CHECK(r.transform == IMat2::identity());
  }

  TEST_CASE("hnf of [[2,0],[1,3]] agrees with the candidate search") {
    const IMat2 m = im(2, 0, 1, 3);
    const auto r = hnf(m);
    const auto cands = hnf_candidates(m);
    REQUIRE(cands.size() == 1);
    CHECK(r.form.matrix == cands.front());
    CHECK(r.form.a() == 2);
    CHECK(r.form.d() == 3);
    CHECK(r.form.c() >= 0);
    CHECK(r.form.c() < r.form.a());
  }

  TEST_CASE("unimodular input has identity hnf") {
    CHECK(hnf(im(0, 1, -1, 0)).form.matrix == IMat2::identity());
  }

  TEST_CASE("singular input is rejected") {
    CHECK_THROWS_AS(hnf(im(1, 2, 2, 4)), SingularMatrixError);
    CHECK_THROWS_AS(snf(im(0, 0, 0, 0)), SingularMatrixError);
  }

  TEST_CASE("hnf: transform, idempotence and uniqueness on random input") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 200; ++t) {
      const IMat2 m = random_nonsingular(rng);
      const auto r = hnf(m);
      CHECK(r.transform * m == r.form.matrix);
      CHECK(is_unimodular(r.transform));
      CHECK(r.form.matrix.b == 0);
      CHECK(r.form.a() > 0);
      CHECK(r.form.d() > 0);
      CHECK(r.form.c() >= 0);
      CHECK(r.form.c() < r.form.a());
      CHECK(hnf(r.form.matrix).form == r.form);
      CHECK(hnf(random_unimodular(rng) * m).form == r.form);
      if (t < 40) {
        const auto cands = hnf_candidates(m);
        REQUIRE(cands.size() == 1);
        CHECK(cands.front() == r.form.matrix);
      }
    }
  }

  TEST_CASE("hnf_rows spans the stacked module") {
    const std::vector<IVec2> rows{{Int(4), Int(0)}, {Int(0), Int(6)}, {Int(2), Int(3)}};
    const HnfForm h = hnf_rows(rows);
    // (4,0) = 2(2,3) - (0,6), so the module is spanned by (2,3), (0,6).
    CHECK(same_row_module(h.matrix, im(2, 3, 0, 6)));
    CHECK(hnf_rows(std::vector<IVec2>{{Int(2), Int(0)}, {Int(1), Int(3)}}).matrix == im(2, 0, 1, 3));
  }

  TEST_CASE("snf examples") {
    const auto a = snf(IMat2::diag(Int(1), Int(5)));
    CHECK(a.d1 == 1);
    CHECK(a.d2 == 5);
    const auto b = snf(im(2, 1, 0, 2));
    CHECK(b.d1 == 1);
    CHECK(b.d2 == 4);
    const auto c = snf(IMat2::diag(Int(3), Int(3)));
    CHECK(c.d1 == 3);
    CHECK(c.d2 == 3);
  }

  TEST_CASE("snf invariants and reconstruction on random input") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 300; ++t) {
      const IMat2 m = random_nonsingular(rng, 12);
      const auto s = snf(m);
      CHECK(s.d1 > 0);
      CHECK(s.d2 % s.d1 == 0);
      CHECK(s.d1 * s.d2 == abs(m.det()));
      CHECK(s.d1 == trial_gcd(m));
      CHECK(is_unimodular(s.left));
      CHECK(is_unimodular(s.right));
      CHECK(s.left * m * s.right == IMat2::diag(s.d1, s.d2));
      const QMat2 back = inverse(s.left) * to_rational(IMat2::diag(s.d1, s.d2)) * inverse(s.right);
      CHECK(back == to_rational(m));
    }
  }

  TEST_CASE("sl2_mod small moduli match direct enumeration") {
    CHECK(sl2_mod(1).size() == 1);
    CHECK(sl2_mod(2).size() == 6);
    CHECK(sl2_mod(3).size() == 24);
    for (std::uint64_t m = 1; m <= 6; ++m) {
      std::set<ModMat> brute;
      for (std::uint64_t a = 0; a < m; ++a)
        for (std::uint64_t b = 0; b < m; ++b)
          for (std::uint64_t c = 0; c < m; ++c)
            for (std::uint64_t d = 0; d < m; ++d)
              if ((a * d + m * m - b * c % m) % m == 1 % m) brute.insert(ModMat{m, {a, b, c, d}});
      const auto got = sl2_mod(m);
      CHECK(std::set<ModMat>(got.begin(), got.end()) == brute);
      CHECK(got.size() == brute.size());
    }
  }

  TEST_CASE("sl2_mod count matches the product formula up to 12") {
    for (std::uint64_t m = 1; m <= 12; ++m) {
      Rat f(static_cast<unsigned long>(m * m * m));
      for (const auto& [p, e] : factorize(m)) f *= Rat(1) - make_rat(Int(1), Int(static_cast<unsigned long>(p * p)));
      CHECK(Rat(static_cast<unsigned long>(sl2_mod(m).size())) == f);
      for (const auto& x : sl2_mod(m)) CHECK(x.det() == 1 % m);
    }
  }

  TEST_CASE("sl2_mod respects the cap") {
    CHECK_THROWS_AS(sl2_mod(12, 100), SizeCapError);
  }

  TEST_CASE("padic_snf examples") {
    const auto id = padic_snf(IMat2::identity(), 5, 3);
    CHECK(id.a == 0);
    CHECK(id.b == 0);
    const auto d = padic_snf(IMat2::diag(Int(1), Int(3)), 3, 3);
    CHECK(d.a == 0);
    CHECK(d.b == 1);
    const auto j = padic_snf(im(2, 1, 0, 2), 2, 4);
    CHECK(j.a == 0);
    CHECK(j.b == 2);
    CHECK(j.modulus == 16);
  }

  TEST_CASE("padic_snf recomposes mod p^k with unit factors") {
    std::mt19937_64 rng(13);
    for (std::uint64_t p : {2, 3, 5}) {
      for (int t = 0; t < 100; ++t) {
        const IMat2 m = random_nonsingular(rng, 20);
        const unsigned k = 6;
        const unsigned v = valuation(abs(m.det()), p);
        if (v >= k) {
          CHECK_THROWS_AS(padic_snf(m, p, k), RegularityError);
          continue;
        }
        const auto f = padic_snf(m, p, k);
        CHECK(f.a <= f.b);
        CHECK(f.a + f.b == v);
        // The smaller exponent is the least valuation of an entry.
        unsigned least = k;
        for (const Int& e : {m.a, m.b, m.c, m.d})
          if (e != 0) least = std::min(least, valuation(abs(e), p));
        CHECK(f.a == least);
        const IMat2 back =
            f.left_unit * IMat2::diag(ipow(Int(static_cast<unsigned long>(p)), f.a),
                                      ipow(Int(static_cast<unsigned long>(p)), f.b)) *
            f.right_unit;
        const IMat2 diff = back - m;
        for (const Int& e : {diff.a, diff.b, diff.c, diff.d}) CHECK(e % f.modulus == 0);
        CHECK(f.left_unit.det() % p != 0);
        CHECK(f.right_unit.det() % p != 0);
      }
    }
  }

  TEST_CASE("number theory helpers") {
    CHECK(sigma1(12) == 28);
    CHECK(divisors(12) == std::vector<std::uint64_t>{1, 2, 3, 4, 6, 12});
    CHECK(valuation(Int(48), 2) == 4);
    CHECK(is_prime(97));
    CHECK_FALSE(is_prime(91));
    CHECK(floor_div(Int(-7), Int(2)) == -4);
    CHECK(mod_positive(Int(-7), Int(5)) == 3);
    CHECK_THROWS_AS(make_rat(Int(1), Int(0)), InvalidArgument);
  }
}
