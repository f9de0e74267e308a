#include "heckepair/exact.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

namespace heckepair {

Rat make_rat(const Int& num, const Int& den) {
  if (den == 0) throw InvalidArgument("zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

QMat2 to_rational(const IMat2& m) { return QMat2{Rat(m.a), Rat(m.b), Rat(m.c), Rat(m.d)}; }

std::optional<IMat2> to_integral(const QMat2& m) {
  for (const Rat* x : {&m.a, &m.b, &m.c, &m.d}) {
    if (x->get_den() != 1) return std::nullopt;
  }
  return IMat2{m.a.get_num(), m.b.get_num(), m.c.get_num(), m.d.get_num()};
}

QMat2 inverse(const QMat2& m) {
  const Rat det = m.det();
  if (det == 0) throw SingularMatrixError("inverse of a singular matrix");
  const QMat2 adj = m.adjugate();
  return QMat2{Rat(adj.a / det), Rat(adj.b / det), Rat(adj.c / det), Rat(adj.d / det)};
}

QMat2 inverse(const IMat2& m) { return inverse(to_rational(m)); }

Int common_denominator(const QMat2& m) {
  Int l = 1;
  for (const Rat* x : {&m.a, &m.b, &m.c, &m.d}) {
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x->get_den_mpz_t());
  }
  return l;
}

bool is_unimodular(const IMat2& m) { return abs(m.det()) == 1; }

std::string to_string(const Int& x) { return x.get_str(); }
std::string to_string(const Rat& x) { return x.get_str(); }

std::string to_string(const IMat2& m) {
  std::ostringstream os;
  os << m;
  return os.str();
}

std::string to_string(const QMat2& m) {
  std::ostringstream os;
  os << m;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const IMat2& m) {
  return os << "[[" << m.a << ", " << m.b << "], [" << m.c << ", " << m.d << "]]";
}

std::ostream& operator<<(std::ostream& os, const QMat2& m) {
  return os << "[[" << m.a << ", " << m.b << "], [" << m.c << ", " << m.d << "]]";
}

Int floor_div(const Int& num, const Int& den) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return q;
}

Int mod_positive(const Int& x, const Int& m) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
  if (r < 0) r += abs(m);
  return r;
}

Int ipow(const Int& base, unsigned exp) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
  return r;
}

namespace {

// g = s*x + t*y with g >= 0.
void gcdext(const Int& x, const Int& y, Int& g, Int& s, Int& t) {
  mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
}

Int tdiv(const Int& num, const Int& den) {
  Int q;
  mpz_tdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return q;
}

}  // namespace

HnfResult hnf(const IMat2& m) {
  if (m.det() == 0) throw SingularMatrixError("hnf: singular input " + to_string(m));
  Int g, s, t;
  gcdext(m.b, m.d, g, s, t);
  // Row 1 kills the second column, row 2 carries the gcd.
  IMat2 u{Int(m.d / g), Int(-m.b / g), s, t};
  IMat2 h = u * m;
  if (h.a < 0) {
    u.a = -u.a;
    u.b = -u.b;
    h.a = -h.a;
  }
  const Int k = floor_div(h.c, h.a);
  if (k != 0) {
    u.c -= k * u.a;
    u.d -= k * u.b;
    h.c -= k * h.a;
  }
  return HnfResult{HnfForm{h}, u};
}

HnfForm hnf_rows(std::span<const IVec2> rows) {
  // Projection to the second coordinate has image d*Z; the kernel is spanned
  // by each row minus the matching multiple of a row hitting d.
  Int d = 0;
  Int wx = 0;  // first coordinate of a module element with second coordinate d
  for (const auto& r : rows) {
    Int g, s, t;
    gcdext(d, r[1], g, s, t);
    wx = s * wx + t * r[0];
    d = g;
  }
  if (d == 0) throw SingularMatrixError("hnf_rows: module has rank < 2");
  Int a = 0;
  for (const auto& r : rows) {
    const Int x = r[0] - (r[1] / d) * wx;
    mpz_gcd(a.get_mpz_t(), a.get_mpz_t(), x.get_mpz_t());
  }
  if (a == 0) throw SingularMatrixError("hnf_rows: module has rank < 2");
  return HnfForm{IMat2{a, Int(0), mod_positive(wx, a), d}};
}

SnfForm snf(const IMat2& m) {
  if (m.det() == 0) throw SingularMatrixError("snf: singular input " + to_string(m));
  IMat2 A = m;
  IMat2 L = IMat2::identity();
  IMat2 R = IMat2::identity();
  auto swap_rows = [](IMat2& x) {
    std::swap(x.a, x.c);
    std::swap(x.b, x.d);
  };
  auto swap_cols = [](IMat2& x) {
    std::swap(x.a, x.b);
    std::swap(x.c, x.d);
  };
  for (;;) {
    // Bring the smallest nonzero entry to the corner.
    const Int* best = nullptr;
    int where = 0;
    const Int* entries[4] = {&A.a, &A.b, &A.c, &A.d};
    for (int i = 0; i < 4; ++i) {
      if (*entries[i] == 0) continue;
      if (best == nullptr || abs(*entries[i]) < abs(*best)) {
        best = entries[i];
        where = i;
      }
    }
    if (where == 1 || where == 3) {
      swap_cols(A);
      swap_cols(R);
    }
    if (where == 2 || where == 3) {
      swap_rows(A);
      swap_rows(L);
    }
    if (A.c != 0) {
      const Int q = tdiv(A.c, A.a);
      A.c -= q * A.a;
      A.d -= q * A.b;
      L.c -= q * L.a;
      L.d -= q * L.b;
    }
    if (A.b != 0) {
      const Int q = tdiv(A.b, A.a);
      A.b -= q * A.a;
      A.d -= q * A.c;
      R.b -= q * R.a;
      R.d -= q * R.c;
    }
    if (A.b != 0 || A.c != 0) continue;
    if (A.d % A.a != 0) {
      // Fold the second row into the first and reduce again.
      A.b += A.d;
      L.a += L.c;
      L.b += L.d;
      continue;
    }
    break;
  }
  if (A.a < 0) {
    A.a = -A.a;
    L.a = -L.a;
    L.b = -L.b;
  }
  if (A.d < 0) {
    A.d = -A.d;
    L.c = -L.c;
    L.d = -L.d;
  }
  return SnfForm{A.a, A.d, L, R};
}

ModMat ModMat::reduce(const IMat2& m, std::uint64_t modulus) {
  if (modulus == 0) throw InvalidArgument("modulus must be positive");
  const Int mod(static_cast<unsigned long>(modulus));
  ModMat r;
  r.modulus = modulus;
  const Int* src[4] = {&m.a, &m.b, &m.c, &m.d};
  for (int i = 0; i < 4; ++i) r.e[i] = mod_positive(*src[i], mod).get_ui();
  return r;
}

std::uint64_t ModMat::det() const {
  const unsigned __int128 m = modulus;
  const unsigned __int128 ad = static_cast<unsigned __int128>(e[0]) * e[3] % m;
  const unsigned __int128 bc = static_cast<unsigned __int128>(e[1]) * e[2] % m;
  return static_cast<std::uint64_t>((ad + m - bc) % m);
}

ModMat ModMat::operator*(const ModMat& o) const {
  if (modulus != o.modulus) throw InvalidArgument("ModMat product with mismatched moduli");
  const unsigned __int128 m = modulus;
  auto mul = [m](std::uint64_t x, std::uint64_t y, std::uint64_t z, std::uint64_t w) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(x) * y + static_cast<unsigned __int128>(z) * w) % m);
  };
  ModMat r;
  r.modulus = modulus;
  r.e[0] = mul(e[0], o.e[0], e[1], o.e[2]);
  r.e[1] = mul(e[0], o.e[1], e[1], o.e[3]);
  r.e[2] = mul(e[2], o.e[0], e[3], o.e[2]);
  r.e[3] = mul(e[2], o.e[1], e[3], o.e[3]);
  return r;
}

IMat2 ModMat::lift() const {
  auto z = [](std::uint64_t x) { return Int(static_cast<unsigned long>(x)); };
  return IMat2{z(e[0]), z(e[1]), z(e[2]), z(e[3])};
}

std::vector<ModMat> sl2_mod(std::uint64_t m, std::size_t cap) {
  if (m == 0) throw InvalidArgument("sl2_mod: modulus must be positive");
  std::vector<ModMat> out;
  const std::uint64_t one = 1 % m;
  ModMat x;
  x.modulus = m;
  for (std::uint64_t a = 0; a < m; ++a) {
    for (std::uint64_t b = 0; b < m; ++b) {
      for (std::uint64_t c = 0; c < m; ++c) {
        for (std::uint64_t d = 0; d < m; ++d) {
          x.e = {a, b, c, d};
          if (x.det() != one) continue;
          if (out.size() == cap) {
            throw SizeCapError("sl2_mod: |SL2(Z/" + std::to_string(m) + ")| exceeds cap " +
                               std::to_string(cap));
          }
          out.push_back(x);
        }
      }
    }
  }
  return out;
}

unsigned valuation(const Int& n, std::uint64_t p) {
  if (n == 0) throw InvalidArgument("valuation of zero");
  Int x = abs(n);
  unsigned v = 0;
  while (mpz_divisible_ui_p(x.get_mpz_t(), p)) {
    mpz_divexact_ui(x.get_mpz_t(), x.get_mpz_t(), p);
    ++v;
  }
  return v;
}

PadicSnf padic_snf(const IMat2& m, std::uint64_t p, unsigned depth) {
  if (!is_prime(p)) throw InvalidArgument("padic_snf: p must be prime");
  PadicSnf out;
  out.p = p;
  out.depth = depth;
  out.modulus = ipow(Int(static_cast<unsigned long>(p)), depth);
  const Int det = m.det();
  if (det == 0 || det % out.modulus == 0) {
    throw RegularityError("padic_snf: det " + to_string(det) + " vanishes mod " +
                          std::to_string(p) + "^" + std::to_string(depth));
  }
  const SnfForm s = snf(m);
  out.a = valuation(s.d1, p);
  out.b = valuation(s.d2, p);
  const Int u1 = s.d1 / ipow(Int(static_cast<unsigned long>(p)), out.a);
  const Int u2 = s.d2 / ipow(Int(static_cast<unsigned long>(p)), out.b);
  // M = left^-1 diag(d1, d2) right^-1; unimodular inverses are adjugates up to sign.
  const Int ldet = s.left.det();
  const Int rdet = s.right.det();
  const IMat2 left_inv = s.left.adjugate().scaled(ldet);
  const IMat2 right_inv = s.right.adjugate().scaled(rdet);
  auto reduce = [&](const IMat2& x) {
    return IMat2{mod_positive(x.a, out.modulus), mod_positive(x.b, out.modulus),
                 mod_positive(x.c, out.modulus), mod_positive(x.d, out.modulus)};
  };
  out.left_unit = reduce(left_inv * IMat2::diag(u1, u2));
  out.right_unit = reduce(right_inv);
  return out;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

std::vector<std::pair<std::uint64_t, unsigned>> factorize(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("factorize(0)");
  std::vector<std::pair<std::uint64_t, unsigned>> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    unsigned e = 0;
    while (n % d == 0) {
      n /= d;
      ++e;
    }
    if (e > 0) out.emplace_back(d, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

std::vector<std::uint64_t> divisors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    out.push_back(d);
    if (d * d != n) out.push_back(n / d);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t sigma1(std::uint64_t n) {
  std::uint64_t s = 0;
  for (auto d : divisors(n)) s += d;
  return s;
}

}  // namespace heckepair
