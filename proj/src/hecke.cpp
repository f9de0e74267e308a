#include "heckepair/hecke.hpp"

#include <algorithm>
#include <set>

namespace heckepair {

namespace {

Int prime_int(std::uint64_t p) {
  if (!is_prime(p)) throw InvalidArgument("expected a prime, got " + std::to_string(p));
  return Int(static_cast<unsigned long>(p));
}

bool in_class(const QMat2& x, const DoubleCoset& dc) {
  const auto xi = to_integral(x);
  return xi && xi->det() > 0 && classify(*xi) == dc;
}

/// Candidate classes of a product of classes with determinants n1, n2.
std::vector<DoubleCoset> product_classes(const DoubleCoset& a, const DoubleCoset& b) {
  const Int n = a.det() * b.det();
  if (!n.fits_ulong_p()) throw SizeCapError("convolve: determinant too large");
  return double_cosets_of_det(n.get_ui());
}

bool is_power_of(Int n, const Int& p) {
  while (n % p == 0) n /= p;
  return n == 1;
}

}  // namespace

HeckeElement HeckeElement::basis(const DoubleCoset& dc, const Rat& coeff) {
  HeckeElement f;
  f.add(dc, coeff);
  return f;
}

HeckeElement HeckeElement::u(std::uint64_t p) {
  const Int q = prime_int(p);
  return basis(DoubleCoset::make(q, q));
}

HeckeElement HeckeElement::v(std::uint64_t p) { return basis(DoubleCoset::make(Int(1), prime_int(p))); }

Rat HeckeElement::coefficient(const DoubleCoset& dc) const {
  auto it = terms_.find(dc);
  return it == terms_.end() ? Rat(0) : it->second;
}

void HeckeElement::add(const DoubleCoset& dc, const Rat& c) {
  if (c == 0) return;
  auto [it, fresh] = terms_.emplace(dc, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

HeckeElement HeckeElement::operator+(const HeckeElement& o) const {
  HeckeElement r = *this;
  for (const auto& [dc, c] : o.terms_) r.add(dc, c);
  return r;
}

HeckeElement HeckeElement::operator-(const HeckeElement& o) const { return *this + o.scaled(Rat(-1)); }

HeckeElement HeckeElement::scaled(const Rat& c) const {
  HeckeElement r;
  for (const auto& [dc, x] : terms_) r.add(dc, x * c);
  return r;
}

std::string HeckeElement::to_string() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const auto& [dc, c] : terms_) {
    if (!s.empty()) s += " + ";
    s += c.get_str() + "*" + dc.to_string();
  }
  return s;
}

HeckeElement convolve_with_reps(const HeckeElement& f1, const HeckeElement& f2, const RepsProvider& reps) {
  HeckeElement out;
  for (const auto& [b, cb] : f2.terms()) {
    const auto sj = reps(b);
    std::vector<QMat2> inv;
    inv.reserve(sj.size());
    for (const auto& s : sj) inv.push_back(inverse(s));
    for (const auto& [a, ca] : f1.terms()) {
      for (const auto& d : product_classes(a, b)) {
        const QMat2 x = to_rational(d.representative());
        long count = 0;
        for (const auto& si : inv) count += in_class(x * si, a) ? 1 : 0;
        if (count != 0) out.add(d, ca * cb * Rat(count));
      }
    }
  }
  return out;
}

HeckeElement convolve(const HeckeElement& f1, const HeckeElement& f2) {
  return convolve_with_reps(f1, f2, [](const DoubleCoset& dc) { return right_cosets(dc); });
}

HeckeElement convolve_by_products(const HeckeElement& f1, const HeckeElement& f2) {
  // Every right coset of the class D appears c_D times among the products.
  HeckeElement out;
  for (const auto& [a, ca] : f1.terms()) {
    const auto ri = right_cosets(a);
    for (const auto& [b, cb] : f2.terms()) {
      const auto sj = right_cosets(b);
      std::map<DoubleCoset, long> pairs;
      for (const auto& r : ri)
        for (const auto& s : sj) ++pairs[classify(r * s)];
      for (const auto& [d, n] : pairs) out.add(d, ca * cb * make_rat(Int(n), right_coset_count(d)));
    }
  }
  return out;
}

HeckeElement involution(const HeckeElement& f) {
  for (const auto& [dc, c] : f.terms()) {
    if (dc != DoubleCoset::identity()) {
      throw AdjointLeavesSemigroupError("involution: the adjoint of class " + dc.to_string() +
                                        " is not supported on M2(Z)+");
    }
  }
  return f;  // coefficients are real
}

HeckeElement prime_restrict(const HeckeElement& f, std::uint64_t p) {
  const Int q = prime_int(p);
  HeckeElement out;
  for (const auto& [dc, c] : f.terms())
    if (is_power_of(dc.det(), q)) out.add(dc, c);
  return out;
}

std::string to_string(EmbeddingFlavor f) {
  switch (f) {
    case EmbeddingFlavor::plain: return "plain";
    case EmbeddingFlavor::det_inverse: return "det_inverse";
    case EmbeddingFlavor::det_sqrt_modular: return "det_sqrt_modular";
  }
  return "?";
}

EmbeddingFlavor parse_flavor(const std::string& s) {
  for (auto f : {EmbeddingFlavor::plain, EmbeddingFlavor::det_inverse, EmbeddingFlavor::det_sqrt_modular})
    if (to_string(f) == s) return f;
  throw InvalidArgument("unknown embedding flavor: " + s);
}

Rat flavor_factor(EmbeddingFlavor flavor, const DoubleCoset& dc) {
  switch (flavor) {
    case EmbeddingFlavor::plain: return Rat(1);
    // [s(V0) : V0]^(-1/2) = det(s)^-1 because the index is det(s)^2.
    case EmbeddingFlavor::det_inverse:
    case EmbeddingFlavor::det_sqrt_modular: return make_rat(Int(1), dc.det());
  }
  return Rat(1);
}

Rat SemidirectHeckeElement::coefficient(const DoubleCoset& dc) const {
  auto it = terms.find(dc);
  return it == terms.end() ? Rat(0) : it->second;
}

SemidirectHeckeElement embed_semidirect(const HeckeElement& f, EmbeddingFlavor flavor) {
  SemidirectHeckeElement out{flavor, {}};
  for (const auto& [dc, c] : f.terms()) out.terms.emplace(dc, c * flavor_factor(flavor, dc));
  return out;
}

Int gamma_structure_count(const IMat2& t, const IMat2& s, const IMat2& r) {
  // Gamma y in Gamma s Gamma with y in Gamma t^-1 Gamma r, i.e. r y^-1 in Gamma t Gamma.
  const DoubleCoset ct = classify(t);
  const QMat2 rq = to_rational(r);
  long n = 0;
  for (const auto& h : right_cosets(classify(s))) n += in_class(rq * inverse(h), ct) ? 1 : 0;
  return Int(n);
}

Int semidirect_structure_count(const IMat2& t, const IMat2& s, const IMat2& r) {
  // P0 (0,t) P0 = {(v, g) : g in Gamma t Gamma, v in M2(Z) + M2(Z) g^-1}.
  // Right cosets of P0 in P0 s P0 are P0 (v, h), h over Gamma-representatives
  // and the rows of v over (Z^2 + Z^2 h^-1) / Z^2. For y = (v, h),
  // r y^-1 = (-v h r^-1, r h^-1).
  const DoubleCoset ct = classify(t);
  const QMat2 rq = to_rational(r);
  const Lattice z2;
  long n = 0;
  for (const auto& h : right_cosets(classify(s))) {
    const QMat2 hinv = inverse(h);
    const QMat2 g = rq * hinv;
    if (!in_class(g, ct)) continue;
    const QMat2 hr = to_rational(h) * inverse(r);
    const Lattice target = lattice_sum(z2, Lattice::from_basis(hr));
    const auto reps = quotient_representatives(lattice_sum(z2, Lattice::from_basis(hinv)));
    for (const auto& x : reps) {
      for (const auto& y : reps) {
        const QMat2 w = (QMat2{x[0], x[1], y[0], y[1]} * hr).scaled(Rat(-1));
        if (target.contains(QVec2{w.a, w.b}) && target.contains(QVec2{w.c, w.d})) ++n;
      }
    }
  }
  return Int(n);
}

}  // namespace heckepair
