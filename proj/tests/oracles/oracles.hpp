#pragma once

// Brute-force oracles. They share only the bignum types with the library and
// recompute everything by direct enumeration.

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using Int = mpz_class;
using Rat = mpq_class;

// ---------------------------------------------------------------- subgroups

using Point = std::pair<int, int>;
using Subgroup = std::set<Point>;

/// Subgroup of (Z/n)^2 generated by the given points.
inline Subgroup generate(int n, const std::vector<Point>& gens) {
  Subgroup s{{0, 0}};
  std::deque<Point> todo{{0, 0}};
  while (!todo.empty()) {
    const auto [x, y] = todo.front();
    todo.pop_front();
    for (const auto& [gx, gy] : gens) {
      const Point q{(x + gx) % n, (y + gy) % n};
      if (s.insert(q).second) todo.push_back(q);
    }
  }
  return s;
}

/// Every subgroup of order n in (Z/n)^2, i.e. every lattice between Z^2 and
/// (1/n)Z^2 of index n, as point sets with coordinates scaled by n.
inline std::set<Subgroup> subgroups_of_order(int n) {
  // Every subgroup needs at most two generators; pair each distinct cyclic
  // subgroup with every point.
  std::set<Subgroup> cyclic;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) cyclic.insert(generate(n, {{a, b}}));
  std::set<Subgroup> out;
  for (const auto& c : cyclic) {
    if (n % static_cast<int>(c.size())) continue;
    Point g{0, 0};
    for (const auto& pt : c)
      if (static_cast<int>(generate(n, {pt}).size()) == static_cast<int>(c.size())) g = pt;
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        if (c.count({x, y})) continue;
        auto s = generate(n, {g, {x, y}});
        if (static_cast<int>(s.size()) == n) out.insert(std::move(s));
      }
    if (static_cast<int>(c.size()) == n) out.insert(c);
  }
  return out;
}

inline bool is_cyclic(int n, const Subgroup& s) {
  for (const auto& pt : s)
    if (static_cast<int>(generate(n, {pt}).size()) == static_cast<int>(s.size())) return true;
  return false;
}

/// Points of the lattice spanned by the rational rows (plus Z^2) inside
/// [0,1)^2, scaled by n. Every row must lie in (1/n)Z^2.
inline Subgroup points_scaled(int n, const std::array<std::array<Rat, 2>, 2>& rows) {
  std::vector<Point> gens;
  for (const auto& r : rows) {
    std::array<int, 2> c{};
    for (int k = 0; k < 2; ++k) {
      Rat x = r[k] * n;
      if (x.get_den() != 1) throw std::logic_error("row outside (1/n)Z^2");
      Int m = x.get_num() % n;
      if (m < 0) m += n;
      c[k] = static_cast<int>(m.get_si());
    }
    gens.push_back({c[0], c[1]});
  }
  return generate(n, gens);
}

// ---------------------------------------------------------------- matrices

using M = std::array<Rat, 4>;  // row-major

inline M mul(const M& x, const M& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
          x[2] * y[1] + x[3] * y[3]};
}
inline M add(const M& x, const M& y) { return {x[0] + y[0], x[1] + y[1], x[2] + y[2], x[3] + y[3]}; }
inline Rat det(const M& x) { return x[0] * x[3] - x[1] * x[2]; }
inline M inv(const M& x) {
  const Rat d = det(x);
  if (d == 0) throw std::logic_error("singular");
  return {x[3] / d, -x[1] / d, -x[2] / d, x[0] / d};
}
inline M transpose(const M& x) { return {x[0], x[2], x[1], x[3]}; }
inline Rat frac(const Rat& x) {
  Int f;
  mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return x - Rat(f);
}
inline M frac(const M& x) { return {frac(x[0]), frac(x[1]), frac(x[2]), frac(x[3])}; }
inline Int denominator(const M& x) {
  Int l = 1;
  for (const auto& e : x) l = lcm(l, Int(e.get_den()));
  return l;
}

/// Row HNF by hand: returns (gamma, H) with gamma in SL2(Z), gamma x = H,
/// H = [[a,0],[c,d]], a, d > 0, 0 <= c < a. Needs det > 0; rational x is scaled.
inline std::pair<M, M> row_hnf(const M& x) {
  const Int q = denominator(x);
  std::array<Int, 4> e;
  for (int i = 0; i < 4; ++i) e[i] = Rat(x[i] * q).get_num();
  // Column 2 entries e[1], e[3]: find gamma with gamma * (e1, e3)^T = (0, g).
  Int g, s, t;
  mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), e[1].get_mpz_t(), e[3].get_mpz_t());
  std::array<Int, 4> gam;
  if (g == 0) throw std::logic_error("singular");
  // rows: (e3/g, -e1/g) kills column 2; (s, t) gives g.
  gam = {Int(e[3] / g), Int(-e[1] / g), s, t};
  auto apply = [&](const std::array<Int, 4>& a) {
    return std::array<Int, 4>{a[0] * e[0] + a[1] * e[2], a[0] * e[1] + a[1] * e[3], a[2] * e[0] + a[3] * e[2],
                              a[2] * e[1] + a[3] * e[3]};
  };
  // det(gam) = (e3 t + e1 s)/g = 1.
  auto h = apply(gam);
  if (h[0] <= 0 || h[3] <= 0) throw std::logic_error("row_hnf needs det > 0");
  // Second row -= k * first row to bring c into [0, a).
  Int k;
  mpz_fdiv_q(k.get_mpz_t(), h[2].get_mpz_t(), h[0].get_mpz_t());
  gam[2] -= k * gam[0];
  gam[3] -= k * gam[1];
  h = apply(gam);
  M gm{Rat(gam[0]), Rat(gam[1]), Rat(gam[2]), Rat(gam[3])};
  M hm{Rat(h[0], q), Rat(h[1], q), Rat(h[2], q), Rat(h[3], q)};
  for (auto& v : hm) v.canonicalize();
  return {gm, hm};
}

/// Column HNF: x gamma = H^T with H the row HNF of x^T.
inline std::pair<M, M> col_hnf(const M& x) {
  auto [g, h] = row_hnf(transpose(x));
  return {transpose(g), transpose(h)};
}

// ---------------------------------------------------------------- module index

/// |M2(Z) / (M2(Z) cap M2(Z) g)| = N^4 / #{X mod N : X g^-1 integral} with
/// N the denominator of g^-1.
inline Int module_index_bruteforce(const M& g) {
  const M gi = inv(g);
  const Int nn = denominator(gi);
  if (nn > 16) throw std::logic_error("oracle modulus too large");
  const int n = static_cast<int>(nn.get_si());
  long count = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const M y = mul(M{Rat(a), Rat(b), Rat(c), Rat(d)}, gi);
          bool ok = true;
          for (const auto& e : y) ok = ok && e.get_den() == 1;
          count += ok;
        }
  const Int total = nn * nn * nn * nn;
  if (total % count != 0) throw std::logic_error("non-integral index");
  return Int(total / count);
}

// ---------------------------------------------------------------- semidirect BFS

/// (v, g)(w, h) = (v + w g^-1, g h).
struct SemiEl {
  M v;
  M g;
};

inline SemiEl semi_mul(const SemiEl& x, const SemiEl& y) { return {add(x.v, mul(y.v, inv(x.g))), mul(x.g, y.g)}; }

inline std::vector<SemiEl> p0_generators() {
  const M zero{Rat(0), Rat(0), Rat(0), Rat(0)};
  const M one{Rat(1), Rat(0), Rat(0), Rat(1)};
  std::vector<SemiEl> gens;
  for (int i = 0; i < 4; ++i)
    for (int s : {1, -1}) {
      M e = zero;
      e[i] = s;
      gens.push_back({e, one});
    }
  const M S{Rat(0), Rat(-1), Rat(1), Rat(0)};
  const M T{Rat(1), Rat(1), Rat(0), Rat(1)};
  for (const M& m : {S, inv(S), T, inv(T)}) gens.push_back({zero, m});
  return gens;
}

using Key = std::pair<M, M>;

/// Right coset P0 y: (canonical second component, first component mod Z).
inline Key right_key(const SemiEl& y) {
  auto [gam, h] = row_hnf(y.g);
  return {h, frac(mul(y.v, inv(gam)))};
}

/// Left coset y P0: (column HNF of h, rows of w modulo Z^2 h^-1).
inline Key left_key(const SemiEl& y) {
  auto [gam, h] = col_hnf(y.g);
  // w = c h^-1 with c = w h; c is defined modulo M2(Z).
  return {h, frac(mul(y.v, h))};
}

struct Counts {
  std::size_t right = 0;
  std::size_t left = 0;
};

/// R and L of P0 x P0 by breadth-first closure of the coset of x under
/// the generators of P0.
inline Counts semidirect_bfs(const M& v, const M& g, std::size_t cap = 200000) {
  const auto gens = p0_generators();
  Counts out;
  {
    std::map<Key, SemiEl> seen;
    std::deque<SemiEl> todo;
    const SemiEl x{v, g};
    seen.emplace(right_key(x), x);
    todo.push_back(x);
    while (!todo.empty()) {
      const SemiEl y = todo.front();
      todo.pop_front();
      for (const auto& s : gens) {
        SemiEl z = semi_mul(y, s);
        auto [gam, h] = row_hnf(z.g);
        z = {frac(mul(z.v, inv(gam))), h};  // same right coset, small entries
        if (seen.emplace(right_key(z), z).second) todo.push_back(z);
        if (seen.size() > cap) throw std::runtime_error("oracle cap");
      }
    }
    out.right = seen.size();
  }
  {
    std::map<Key, SemiEl> seen;
    std::deque<SemiEl> todo;
    const SemiEl x{v, g};
    seen.emplace(left_key(x), x);
    todo.push_back(x);
    while (!todo.empty()) {
      const SemiEl y = todo.front();
      todo.pop_front();
      for (const auto& s : gens) {
        SemiEl z = semi_mul(s, y);
        auto [gam, h] = col_hnf(z.g);
        z = {mul(frac(mul(z.v, h)), inv(h)), h};
        if (seen.emplace(left_key(z), z).second) todo.push_back(z);
        if (seen.size() > cap) throw std::runtime_error("oracle cap");
      }
    }
    out.left = seen.size();
  }
  return out;
}

// ---------------------------------------------------------------- double cosets

/// Elementary divisors by gcd: d1 = gcd of entries, d2 = det / d1.
inline std::pair<Int, Int> elementary_divisors(const std::array<Int, 4>& x) {
  Int g = gcd(gcd(x[0], x[1]), gcd(x[2], x[3]));
  const Int d = x[0] * x[3] - x[1] * x[2];
  return {g, Int(abs(d) / g)};
}

using IM = std::array<Int, 4>;

inline IM imul(const IM& x, const IM& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
}

/// Classical upper-triangular representatives [[a,b],[0,d]], 0 <= b < d, of
/// Gamma \ {det n} lying in the class (d1, d2).
inline std::vector<IM> upper_reps(long d1, long d2) {
  std::vector<IM> out;
  const long n = d1 * d2;
  for (long a = 1; a <= n; ++a) {
    if (n % a) continue;
    const long d = n / a;
    for (long b = 0; b < d; ++b) {
      const IM m{Int(a), Int(b), Int(0), Int(d)};
      if (elementary_divisors(m).first == d1) out.push_back(m);
    }
  }
  return out;
}

/// Coefficients of [d1,d2] * [e1,e2] from classifying all representative
/// products: c_D = #{(i, j) : r_i s_j in D} / R(D).
inline std::map<std::pair<long, long>, Rat> product_by_pairs(long d1, long d2, long e1, long e2) {
  std::map<std::pair<long, long>, long> hits;
  const auto rs = upper_reps(d1, d2), ss = upper_reps(e1, e2);
  for (const auto& r : rs)
    for (const auto& s : ss) {
      const auto [a, b] = elementary_divisors(imul(r, s));
      ++hits[{a.get_si(), b.get_si()}];
    }
  std::map<std::pair<long, long>, Rat> out;
  for (const auto& [k, h] : hits) {
    Rat c(h, static_cast<long>(upper_reps(k.first, k.second).size()));
    c.canonicalize();
    out[k] = c;
  }
  return out;
}

inline long sigma1(long n) {
  long s = 0;
  for (long d = 1; d <= n; ++d)
    if (n % d == 0) s += d;
  return s;
}

}  // namespace oracle
