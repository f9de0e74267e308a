#pragma once

// The Hecke algebra H(S, Gamma), S = M2(Z)+ and Gamma = SL2(Z), as finite
// rational combinations of double cosets, plus its embeddings into the
// semidirect Hecke algebra.

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "heckepair/coset.hpp"

namespace heckepair {

class HeckeElement {
 public:
  using Terms = std::map<DoubleCoset, Rat>;

  HeckeElement() = default;  // zero
  static HeckeElement basis(const DoubleCoset& dc, const Rat& coeff = Rat(1));
  static HeckeElement identity() { return basis(DoubleCoset::identity()); }
  /// u_p = [diag(p, p)] and v_p = [diag(1, p)].
  static HeckeElement u(std::uint64_t p);
  static HeckeElement v(std::uint64_t p);

  const Terms& terms() const { return terms_; }
  Rat coefficient(const DoubleCoset& dc) const;
  bool is_zero() const { return terms_.empty(); }
  /// Adds c to the coefficient of dc, dropping the term when it cancels.
  void add(const DoubleCoset& dc, const Rat& c);

  HeckeElement operator+(const HeckeElement& o) const;
  HeckeElement operator-(const HeckeElement& o) const;
  HeckeElement scaled(const Rat& c) const;
  bool operator==(const HeckeElement&) const = default;

  std::string to_string() const;

 private:
  Terms terms_;
};

/// Right-coset representatives for a double coset.
using RepsProvider = std::function<std::vector<IMat2>(const DoubleCoset&)>;

/// Product in H(S, Gamma): the coefficient at x is sum_j f1(x s_j^-1) over
/// right-coset representatives s_j of each class of f2.
HeckeElement convolve(const HeckeElement& f1, const HeckeElement& f2);
/// Same product with caller-chosen representatives.
HeckeElement convolve_with_reps(const HeckeElement& f1, const HeckeElement& f2, const RepsProvider& reps);
/// Same product by classifying every product r_i s_j of representatives.
HeckeElement convolve_by_products(const HeckeElement& f1, const HeckeElement& f2);

/// f*(x) = f(x^-1); only closes on the span of the trivial class.
HeckeElement involution(const HeckeElement& f);

/// Terms whose determinant is a power of p (including the trivial class).
HeckeElement prime_restrict(const HeckeElement& f, std::uint64_t p);

enum class EmbeddingFlavor { plain, det_inverse, det_sqrt_modular };

std::string to_string(EmbeddingFlavor f);
EmbeddingFlavor parse_flavor(const std::string& s);

/// Coefficient attached to [s]_Gamma -> c [s]_{P0}.
Rat flavor_factor(EmbeddingFlavor flavor, const DoubleCoset& dc);

/// Image in the semidirect Hecke algebra, on the classes [s]_{P0}, s in S.
struct SemidirectHeckeElement {
  EmbeddingFlavor flavor = EmbeddingFlavor::plain;
  std::map<DoubleCoset, Rat> terms;
  Rat coefficient(const DoubleCoset& dc) const;
};

SemidirectHeckeElement embed_semidirect(const HeckeElement& f, EmbeddingFlavor flavor);

/// Number of right Gamma-cosets in Gamma t^-1 Gamma r cap Gamma s Gamma.
Int gamma_structure_count(const IMat2& t, const IMat2& s, const IMat2& r);
/// Number of right P0-cosets in P0 t^-1 P0 r cap P0 s P0 (t, s, r in S).
Int semidirect_structure_count(const IMat2& t, const IMat2& s, const IMat2& r);

}  // namespace heckepair
