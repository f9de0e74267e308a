#pragma once

// Exact arithmetic substrate: big integers and rationals, 2x2 matrices,
// Hermite and Smith normal forms, SL2 over Z/m and truncated p-adic
// factorization.

#include <gmpxx.h>

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "heckepair/errors.hpp"

namespace heckepair {

using Int = mpz_class;
using Rat = mpq_class;  // always kept canonical (reduced, positive denominator)

Rat make_rat(const Int& num, const Int& den);

/// Row-major 2x2 matrix [[a, b], [c, d]].
template <class T>
struct Mat2 {
  T a{0}, b{0}, c{0}, d{0};

  static Mat2 identity() { return Mat2{T(1), T(0), T(0), T(1)}; }
  static Mat2 diag(const T& x, const T& y) { return Mat2{x, T(0), T(0), y}; }

  T det() const { return T(a * d - b * c); }
  T trace() const { return T(a + d); }
  Mat2 transpose() const { return Mat2{a, c, b, d}; }
  /// adj(M) with M * adj(M) = det(M) * 1.
  Mat2 adjugate() const { return Mat2{d, T(-b), T(-c), a}; }

  Mat2 operator*(const Mat2& o) const {
    return Mat2{T(a * o.a + b * o.c), T(a * o.b + b * o.d), T(c * o.a + d * o.c),
                T(c * o.b + d * o.d)};
  }
  Mat2 operator+(const Mat2& o) const {
    return Mat2{T(a + o.a), T(b + o.b), T(c + o.c), T(d + o.d)};
  }
  Mat2 operator-(const Mat2& o) const {
    return Mat2{T(a - o.a), T(b - o.b), T(c - o.c), T(d - o.d)};
  }
  Mat2 operator-() const { return Mat2{T(-a), T(-b), T(-c), T(-d)}; }
  Mat2 scaled(const T& s) const { return Mat2{T(s * a), T(s * b), T(s * c), T(s * d)}; }

  bool operator==(const Mat2& o) const {
    return a == o.a && b == o.b && c == o.c && d == o.d;
  }
  std::strong_ordering operator<=>(const Mat2& o) const {
    if (auto r = cmp3(a, o.a); r != 0) return r;
    if (auto r = cmp3(b, o.b); r != 0) return r;
    if (auto r = cmp3(c, o.c); r != 0) return r;
    return cmp3(d, o.d);
  }

 private:
  static std::strong_ordering cmp3(const T& x, const T& y) {
    const int s = cmp(x, y);
    return s < 0 ? std::strong_ordering::less
                 : (s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }
};

using IMat2 = Mat2<Int>;
using QMat2 = Mat2<Rat>;
using QVec2 = std::array<Rat, 2>;
using IVec2 = std::array<Int, 2>;

QMat2 to_rational(const IMat2& m);
/// Returns the integer matrix when every entry is integral.
std::optional<IMat2> to_integral(const QMat2& m);
QMat2 inverse(const QMat2& m);
QMat2 inverse(const IMat2& m);
/// Least common multiple of the entry denominators.
Int common_denominator(const QMat2& m);
bool is_unimodular(const IMat2& m);

std::string to_string(const Int& x);
std::string to_string(const Rat& x);
std::string to_string(const IMat2& m);
std::string to_string(const QMat2& m);
std::ostream& operator<<(std::ostream& os, const IMat2& m);
std::ostream& operator<<(std::ostream& os, const QMat2& m);

/// Lower-triangular [[a, 0], [c, d]] with a > 0, d > 0 and 0 <= c < a.
struct HnfForm {
  IMat2 matrix;
  const Int& a() const { return matrix.a; }
  const Int& c() const { return matrix.c; }
  const Int& d() const { return matrix.d; }
  bool operator==(const HnfForm&) const = default;
};

struct HnfResult {
  HnfForm form;
  IMat2 transform;  // transform * input == form.matrix, |det(transform)| == 1
};

/// Row Hermite normal form of a nonsingular integer matrix.
HnfResult hnf(const IMat2& m);

/// HNF of the row module spanned by any number of integer rows; the module
/// must have rank 2.
HnfForm hnf_rows(std::span<const IVec2> rows);

/// left * M * right == diag(d1, d2), d1 | d2, both transforms unimodular.
struct SnfForm {
  Int d1;
  Int d2;
  IMat2 left;
  IMat2 right;
};

SnfForm snf(const IMat2& m);

/// Element of M2(Z/m) with entries reduced into [0, m).
struct ModMat {
  std::uint64_t modulus = 1;
  std::array<std::uint64_t, 4> e{0, 0, 0, 0};

  static ModMat reduce(const IMat2& m, std::uint64_t modulus);
  std::uint64_t det() const;
  ModMat operator*(const ModMat& o) const;
  IMat2 lift() const;
  bool operator==(const ModMat&) const = default;
  auto operator<=>(const ModMat&) const = default;
};

inline constexpr std::size_t kDefaultSl2Cap = 1'000'000;

/// Every element of SL2(Z/m) exactly once, in lexicographic order of entries.
std::vector<ModMat> sl2_mod(std::uint64_t m, std::size_t cap = kDefaultSl2Cap);

/// M == left_unit * diag(p^a, p^b) * right_unit (mod p^k) with unit factors
/// invertible mod p^k and a <= b.
struct PadicSnf {
  std::uint64_t p = 0;
  unsigned depth = 0;
  Int modulus;  // p^depth
  IMat2 left_unit;
  IMat2 right_unit;
  unsigned a = 0;
  unsigned b = 0;
};

PadicSnf padic_snf(const IMat2& m, std::uint64_t p, unsigned depth);

// Small number-theory helpers.
unsigned valuation(const Int& n, std::uint64_t p);
bool is_prime(std::uint64_t n);
/// Prime factorization of n >= 1 as (prime, exponent) pairs in increasing order.
std::vector<std::pair<std::uint64_t, unsigned>> factorize(std::uint64_t n);
std::vector<std::uint64_t> divisors(std::uint64_t n);
std::uint64_t sigma1(std::uint64_t n);
Int ipow(const Int& base, unsigned exp);
/// Floor division with a positive divisor.
Int floor_div(const Int& num, const Int& den);
Int mod_positive(const Int& x, const Int& m);

}  // namespace heckepair
