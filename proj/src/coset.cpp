#include "heckepair/coset.hpp"

#include <numeric>
#include <set>

namespace heckepair {

namespace {

std::uint64_t to_u64(const Int& x, const char* what) {
  if (x < 0 || !x.fits_ulong_p()) throw SizeCapError(std::string(what) + " does not fit in 64 bits");
  return x.get_ui();
}

Rat frac(const Rat& x) { return Rat(x - Rat(floor_div(x.get_num(), x.get_den()))); }

}  // namespace

DoubleCoset DoubleCoset::make(const Int& d1, const Int& d2) {
  if (d1 <= 0 || d2 <= 0) throw InvalidArgument("double coset entries must be positive");
  if (d2 % d1 != 0) throw InvalidArgument("double coset requires d1 | d2");
  return DoubleCoset{d1, d2};
}

std::string DoubleCoset::to_string() const { return "(" + d1.get_str() + "," + d2.get_str() + ")"; }

std::strong_ordering DoubleCoset::operator<=>(const DoubleCoset& o) const {
  // Order by determinant first so identity-like classes come first.
  const Int n = det(), m = o.det();
  if (int s = cmp(n, m); s != 0) return s < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  if (int s = cmp(d1, o.d1); s != 0) return s < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

DoubleCoset classify(const IMat2& s) {
  if (s.det() <= 0) throw InvalidArgument("classify: determinant must be positive: " + to_string(s));
  const SnfForm f = snf(s);
  return DoubleCoset::make(abs(f.d1), abs(f.d2));
}

std::vector<DoubleCoset> double_cosets_of_det(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("double_cosets_of_det: n must be positive");
  std::vector<DoubleCoset> out;
  for (auto d1 : divisors(n)) {
    if (d1 * d1 > n) break;
    const std::uint64_t d2 = n / d1;
    if (d2 % d1 == 0) out.push_back(DoubleCoset::make(Int(d1), Int(d2)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

IMat2 right_coset_key(const IMat2& t) {
  if (t.det() <= 0) throw InvalidArgument("right_coset_key: determinant must be positive");
  return hnf(t).form.matrix;
}

std::vector<IMat2> right_cosets(const DoubleCoset& dc) {
  const std::uint64_t n = to_u64(dc.det(), "double coset determinant");
  std::vector<IMat2> out;
  for (auto a : divisors(n)) {
    const std::uint64_t d = n / a;
    for (std::uint64_t c = 0; c < a; ++c) {
      IMat2 h{Int(a), Int(0), Int(c), Int(d)};
      if (classify(h) == dc) out.push_back(std::move(h));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Int right_coset_count(const DoubleCoset& dc) {
  // Gamma diag(d1, d2) Gamma = d1 * Gamma diag(1, n) Gamma, n = d2 / d1, and
  // the latter has n * prod_{p | n} (1 + 1/p) right cosets.
  const Int n = dc.d2 / dc.d1;
  Int r = n;
  for (const auto& [p, e] : factorize(to_u64(n, "coset ratio"))) r = r / Int(p) * Int(p + 1);
  return r;
}

SemidirectElement SemidirectElement::make(const QMat2& m, const QMat2& g) {
  if (g.det() <= 0) throw InvalidArgument("semidirect element needs det(g) > 0");
  return SemidirectElement{m, g};
}

std::string SemidirectElement::to_string() const {
  return "(" + heckepair::to_string(m) + ", " + heckepair::to_string(g) + ")";
}

GammaGQuotient gamma_g_quotient(const IMat2& g, std::uint64_t modulus, std::size_t cap) {
  const Int n = g.det();
  if (n <= 0) throw InvalidArgument("gamma_g_quotient: det(g) must be positive");
  const std::uint64_t nn = to_u64(n, "det(g)");
  if (modulus % nn != 0) throw InvalidArgument("gamma_g_quotient: det(g) must divide the modulus");
  // gamma in Gamma_g  iff  g^-1 gamma g integral  iff  adj(g) gamma g = 0 mod det(g).
  const ModMat adj = ModMat::reduce(g.adjugate(), modulus);
  const ModMat gm = ModMat::reduce(g, modulus);
  GammaGQuotient out{g, modulus, {}};
  for (const auto& x : sl2_mod(modulus, cap)) {
    const ModMat y = adj * x * gm;
    bool ok = true;
    for (auto e : y.e) ok = ok && (e % nn == 0);
    if (ok) out.members.push_back(x);
  }
  return out;
}

bool in_gamma_g(const IMat2& g, const IMat2& gamma) {
  if (gamma.det() != 1) return false;
  return to_integral(inverse(g) * to_rational(gamma) * to_rational(g)).has_value();
}

QMat2 reduce_mod_integers(const QMat2& v) { return QMat2{frac(v.a), frac(v.b), frac(v.c), frac(v.d)}; }

Orbit gamma_orbit(const QMat2& v, std::span<const ModMat> group) {
  if (group.empty()) throw InvalidArgument("gamma_orbit: empty group");
  const Int den = common_denominator(v);
  if (Int(group.front().modulus) % den != 0) {
    throw CompatibilityError("gamma_orbit: denominator " + den.get_str() + " does not divide modulus " +
                             std::to_string(group.front().modulus));
  }
  std::set<QMat2> seen;
  for (const auto& x : group) seen.insert(reduce_mod_integers(v * to_rational(x.lift())));
  return Orbit{{seen.begin(), seen.end()}};
}

SemidirectCounts semidirect_counts(const SemidirectElement& x, std::uint64_t mod_cap) {
  if (x.g.det() <= 0) throw InvalidArgument("semidirect_counts: det(g) must be positive");
  // Gamma_g only depends on g up to positive scalars.
  const Int scale = common_denominator(x.g);
  const IMat2 gp = *to_integral(x.g.scaled(Rat(scale)));
  const Int n = gp.det();
  const Int dv = common_denominator(x.m);
  Int m;
  mpz_lcm(m.get_mpz_t(), n.get_mpz_t(), dv.get_mpz_t());
  if (m > Int(static_cast<unsigned long>(mod_cap))) {
    throw SizeCapError("semidirect_counts: modulus " + m.get_str() + " exceeds cap " + std::to_string(mod_cap));
  }
  const std::uint64_t mod = m.get_ui();

  SemidirectCounts out;
  out.modulus = mod;
  out.gamma_cosets = right_coset_count(classify(gp));

  const Lattice z2;
  const Lattice gz = Lattice::from_basis(inverse(x.g));  // rows of g(V0) = M2(Z) g^-1
  const Lattice lam = lattice_sum(z2, gz);
  const Rat i0 = rel_index(lam, z2);
  const Rat i1 = rel_index(lam, gz);
  out.sum_over_v0 = Int(i0.get_num() * i0.get_num());
  out.sum_over_gv0 = Int(i1.get_num() * i1.get_num());

  const auto quotient = gamma_g_quotient(gp, mod);
  const Orbit orb = gamma_orbit(x.m, quotient.members);
  std::set<std::pair<QVec2, QVec2>> classes;
  for (const auto& w : orb.elements) {
    classes.emplace(lam.reduce(QVec2{w.a, w.b}), lam.reduce(QVec2{w.c, w.d}));
  }
  out.orbit_classes = Int(static_cast<unsigned long>(classes.size()));
  out.right = out.gamma_cosets * out.orbit_classes * out.sum_over_v0;
  out.left = out.gamma_cosets * out.orbit_classes * out.sum_over_gv0;
  return out;
}

Int semidirect_R(const SemidirectElement& x, std::uint64_t mod_cap) { return semidirect_counts(x, mod_cap).right; }
Int semidirect_L(const SemidirectElement& x, std::uint64_t mod_cap) { return semidirect_counts(x, mod_cap).left; }

Rat module_index(const QMat2& g) {
  // M2(Z) g is (Z^2 g)^2 row by row.
  const Lattice z2;
  const Lattice zg = Lattice::from_basis(g);
  const Rat i = rel_index(z2, lattice_intersect(z2, zg));
  return Rat(i * i);
}

}  // namespace heckepair
