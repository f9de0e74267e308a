#pragma once

#include <random>

#include "heckepair/exact.hpp"

namespace testing_support {

using heckepair::Int;
using heckepair::IMat2;
using heckepair::QMat2;
using heckepair::Rat;

inline Rat r(long n, long d = 1) { return heckepair::make_rat(Int(n), Int(d)); }

inline IMat2 im(long a, long b, long c, long d) { return IMat2{Int(a), Int(b), Int(c), Int(d)}; }

inline QMat2 qm(const Rat& a, const Rat& b, const Rat& c, const Rat& d) { return QMat2{a, b, c, d}; }

/// Product of a few random elementary matrices; determinant +-1.
inline IMat2 random_unimodular(std::mt19937_64& rng, bool allow_negative = true) {
  std::uniform_int_distribution<int> pick(0, allow_negative ? 2 : 1), shift(-3, 3);
  IMat2 u = IMat2::identity();
  for (int i = 0; i < 6; ++i) {
    const int k = shift(rng);
    switch (pick(rng)) {
      case 0: u = im(1, k, 0, 1) * u; break;
      case 1: u = im(1, 0, k, 1) * u; break;
      default: u = im(0, 1, 1, 0) * u; break;
    }
  }
  return u;
}

/// Random nonsingular integer matrix with entries in [-lim, lim].
inline IMat2 random_nonsingular(std::mt19937_64& rng, int lim = 9) {
  std::uniform_int_distribution<int> e(-lim, lim);
  for (;;) {
    IMat2 m = im(e(rng), e(rng), e(rng), e(rng));
    if (m.det() != 0) return m;
  }
}

/// A determinant-one integer matrix congruent to x modulo its modulus.
inline IMat2 sl2_lift(const heckepair::ModMat& x) {
  const IMat2 e = x.lift();
  const Int m(static_cast<unsigned long>(x.modulus));
  // Move the bottom row to a coprime pair, then correct the top row.
  const Int c = e.c == 0 ? m : e.c;
  Int d = e.d;
  while (gcd(c, d) != 1) d += m;
  Int g, s, u;
  mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), u.get_mpz_t(), d.get_mpz_t(), c.get_mpz_t());
  const Int k = (1 - (e.a * d - e.b * c)) / m;
  // s d + u c = 1, so (a + m k s) d - (b - m k u) c = 1.
  return IMat2{e.a + m * k * s, e.b - m * k * u, c, d};
}

}  // namespace testing_support
