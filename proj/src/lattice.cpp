#include "heckepair/lattice.hpp"

#include <algorithm>
#include <numeric>

namespace heckepair {

namespace {

std::strong_ordering cmp3(const Int& x, const Int& y) {
  const int s = cmp(x, y);
  return s < 0 ? std::strong_ordering::less
               : (s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

Rat floor_rat(const Rat& x) { return Rat(floor_div(x.get_num(), x.get_den())); }

std::vector<IMat2> hnf_matrices_of_det(std::uint64_t n) {
  std::vector<IMat2> out;
  for (auto a : divisors(n)) {
    const std::uint64_t d = n / a;
    for (std::uint64_t c = 0; c < a; ++c) {
      out.push_back(IMat2{Int(static_cast<unsigned long>(a)), Int(0),
                          Int(static_cast<unsigned long>(c)), Int(static_cast<unsigned long>(d))});
    }
  }
  return out;
}

}  // namespace

Lattice::Lattice() : q_(1), hnf_{IMat2::identity()} {}

Lattice Lattice::canonical(Int q, const HnfForm& h) {
  Int g = q;
  for (const Int* x : {&h.a(), &h.c(), &h.d()}) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x->get_mpz_t());
  if (g == 1) return Lattice(std::move(q), h);
  return Lattice(Int(q / g), HnfForm{IMat2{Int(h.a() / g), Int(0), Int(h.c() / g), Int(h.d() / g)}});
}

Lattice Lattice::from_basis(const QMat2& rows) {
  if (rows.det() == 0) throw SingularMatrixError("lattice basis is singular: " + heckepair::to_string(rows));
  const Int q = common_denominator(rows);
  const auto m = to_integral(rows.scaled(Rat(q)));
  return canonical(q, heckepair::hnf(*m).form);
}

Lattice Lattice::of_coset(const IMat2& s) {
  if (s.det() <= 0) throw InvalidArgument("coset matrix must have positive determinant");
  return from_basis(inverse(s).transpose());
}

Lattice Lattice::scaled_standard(const Int& n) {
  if (n <= 0) throw InvalidArgument("scaled_standard: n must be positive");
  return Lattice(n, HnfForm{IMat2::identity()});
}

QMat2 Lattice::basis() const {
  const Rat q(q_);
  return QMat2{Rat(hnf_.a() / q), Rat(0), Rat(hnf_.c() / q), Rat(hnf_.d() / q)};
}

Rat Lattice::index() const { return make_rat(Int(q_ * q_), Int(hnf_.a() * hnf_.d())); }

Int Lattice::superlattice_index() const {
  const Rat i = index();
  if (i.get_den() != 1 || !contains_standard()) {
    throw InvalidArgument("lattice " + to_string() + " does not contain Z^2");
  }
  return i.get_num();
}

bool Lattice::contains_standard() const {
  return contains(QVec2{Rat(1), Rat(0)}) && contains(QVec2{Rat(0), Rat(1)});
}

IMat2 Lattice::coset_matrix() const {
  const auto s = to_integral(inverse(column_basis()));
  if (!s) throw InvalidArgument("lattice " + to_string() + " does not contain Z^2");
  return heckepair::hnf(*s).form.matrix;
}

bool Lattice::contains(const QVec2& v) const {
  const Rat q(q_);
  const Rat a(hnf_.a());
  const Rat c(hnf_.c());
  const Rat d(hnf_.d());
  const Rat y = q * v[1] / d;
  if (y.get_den() != 1) return false;
  const Rat x = q * (v[0] / a - v[1] * c / (a * d));
  return x.get_den() == 1;
}

bool Lattice::contains(const Lattice& other) const {
  // A sublattice has integral relative index.
  if (rel_index(*this, other).get_den() != 1) return false;
  const QMat2 b = other.basis();
  return contains(QVec2{b.a, b.b}) && contains(QVec2{b.c, b.d});
}

QVec2 Lattice::reduce(const QVec2& v) const {
  const Rat q(q_);
  const Rat a(hnf_.a());
  const Rat c(hnf_.c());
  const Rat d(hnf_.d());
  QVec2 r = v;
  const Rat k = floor_rat(r[1] * q / d);
  r[0] -= k * c / q;
  r[1] -= k * d / q;
  const Rat j = floor_rat(r[0] * q / a);
  r[0] -= j * a / q;
  return r;
}

std::string Lattice::to_string() const {
  return "{q=" + q_.get_str() + ", hnf=[" + hnf_.a().get_str() + "," + hnf_.c().get_str() + "," +
         hnf_.d().get_str() + "]}";
}

std::strong_ordering Lattice::operator<=>(const Lattice& o) const {
  if (auto r = cmp3(q_, o.q_); r != 0) return r;
  if (auto r = cmp3(hnf_.a(), o.hnf_.a()); r != 0) return r;
  if (auto r = cmp3(hnf_.c(), o.hnf_.c()); r != 0) return r;
  return cmp3(hnf_.d(), o.hnf_.d());
}

Lattice lattice_from_basis(const QMat2& rows) { return Lattice::from_basis(rows); }

Rat rel_index(const Lattice& l, const Lattice& l0) {
  // Both quotients are finite; their ratio is covol(L0) / covol(L).
  return Rat(l.index() / l0.index());
}

Lattice lattice_sum(const Lattice& l1, const Lattice& l2) {
  Int q;
  mpz_lcm(q.get_mpz_t(), l1.q().get_mpz_t(), l2.q().get_mpz_t());
  std::vector<IVec2> rows;
  for (const Lattice* l : {&l1, &l2}) {
    const Int s = q / l->q();
    rows.push_back({Int(s * l->hnf().a()), Int(0)});
    rows.push_back({Int(s * l->hnf().c()), Int(s * l->hnf().d())});
  }
  return Lattice::canonical(q, hnf_rows(rows));
}

Lattice dual(const Lattice& l) { return Lattice::from_basis(inverse(l.basis()).transpose()); }

Lattice lattice_intersect(const Lattice& l1, const Lattice& l2) {
  return dual(lattice_sum(dual(l1), dual(l2)));
}

std::vector<Lattice> superlattices(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("superlattices: n must be positive");
  std::vector<Lattice> out;
  for (const auto& s : hnf_matrices_of_det(n)) out.push_back(Lattice::of_coset(s));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Lattice> superlattices_of(const Lattice& l, std::uint64_t n) {
  const QMat2 c = l.column_basis();
  std::vector<Lattice> out;
  for (const auto& m : superlattices(n)) out.push_back(act(c, m));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Lattice> sublattices_containing_standard(const Lattice& l, std::uint64_t n) {
  const QMat2 c = l.column_basis();
  std::vector<Lattice> out;
  for (const auto& h : hnf_matrices_of_det(n)) {
    Lattice m = act(c, Lattice::from_basis(to_rational(h)));
    if (m.contains_standard()) out.push_back(std::move(m));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Lattice localize(const Lattice& l, std::uint64_t p) {
  if (!is_prime(p)) throw InvalidArgument("localize: p must be prime");
  const Int n = l.superlattice_index();
  const Int m = n / ipow(Int(static_cast<unsigned long>(p)), valuation(n, p));
  return lattice_sum(act(QMat2::diag(Rat(m), Rat(m)), l), Lattice());
}

PrimeParts tensor_parts(const Lattice& l) {
  const Int n = l.superlattice_index();
  PrimeParts parts;
  for (const auto& [p, e] : factorize(n.get_ui())) parts.emplace(p, localize(l, p));
  return parts;
}

Lattice reassemble(const PrimeParts& parts) {
  Lattice out;
  for (const auto& [p, lp] : parts) out = lattice_sum(out, lp);
  return out;
}

Lattice act(const QMat2& g, const Lattice& l) {
  if (g.det() == 0) throw SingularMatrixError("act: singular matrix " + heckepair::to_string(g));
  return Lattice::from_basis(l.basis() * g.transpose());
}

Lattice act_integral(const ModMat& w, const Lattice& l) {
  if (!l.contains_standard()) throw InvalidArgument("act_integral: lattice must contain Z^2");
  if (std::gcd(w.det(), w.modulus) != 1) {
    throw InvalidArgument("act_integral: w is not invertible mod " + std::to_string(w.modulus));
  }
  const Int n(static_cast<unsigned long>(w.modulus));
  if (n % l.q() != 0) {
    throw CompatibilityError("act_integral: modulus " + n.get_str() + " too small for " +
                             l.to_string());
  }
  return lattice_sum(act(to_rational(w.lift()), l), Lattice());
}

std::vector<QVec2> quotient_representatives(const Lattice& l) {
  if (!l.contains_standard()) throw InvalidArgument("quotient_representatives: lattice must contain Z^2");
  const std::uint64_t q = l.q().get_ui();
  std::vector<QVec2> out;
  for (std::uint64_t i = 0; i < q; ++i) {
    for (std::uint64_t j = 0; j < q; ++j) {
      QVec2 v{make_rat(Int(i), l.q()), make_rat(Int(j), l.q())};
      if (l.contains(v)) out.push_back(std::move(v));
    }
  }
  return out;
}

std::pair<Int, Int> quotient_type(const Lattice& l) {
  const SnfForm s = snf(l.coset_matrix());
  return {s.d1, s.d2};
}

}  // namespace heckepair
