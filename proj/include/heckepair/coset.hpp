#pragma once

// Double cosets of SL2(Z) in M2(Z)+ and coset counting for the semidirect
// pair (M2(Q) x| GL2+(Q), M2(Z) x| SL2(Z)).
//
// Semidirect convention: (v, g)(w, h) = (v + w g^-1, g h), i.e. g acts on
// M2(Q) by alpha_g(m) = m g^-1.

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "heckepair/exact.hpp"
#include "heckepair/lattice.hpp"

namespace heckepair {

/// Gamma diag(d1, d2) Gamma with d1 | d2.
struct DoubleCoset {
  Int d1{1};
  Int d2{1};

  static DoubleCoset make(const Int& d1, const Int& d2);
  static DoubleCoset identity() { return {}; }

  Int det() const { return Int(d1 * d2); }
  IMat2 representative() const { return IMat2::diag(d1, d2); }
  std::string to_string() const;

  bool operator==(const DoubleCoset&) const = default;
  std::strong_ordering operator<=>(const DoubleCoset& o) const;
};

/// Elementary divisors of s; det(s) must be positive.
DoubleCoset classify(const IMat2& s);

/// All double cosets of determinant n, sorted.
std::vector<DoubleCoset> double_cosets_of_det(std::uint64_t n);

/// Canonical representative of the right coset Gamma t (row HNF).
IMat2 right_coset_key(const IMat2& t);

/// Complete irredundant HNF representatives of Gamma \ Gamma s Gamma, sorted.
std::vector<IMat2> right_cosets(const DoubleCoset& dc);

/// |Gamma \ Gamma diag(d1, d2) Gamma| from the multiplicative closed form.
Int right_coset_count(const DoubleCoset& dc);

/// An element (m, g) of M2(Q) x| GL2+(Q).
struct SemidirectElement {
  QMat2 m;
  QMat2 g;

  static SemidirectElement make(const QMat2& m, const QMat2& g);
  std::string to_string() const;
};

/// Image of Gamma_g = g Gamma g^-1 cap Gamma in SL2(Z/modulus).
struct GammaGQuotient {
  IMat2 g;
  std::uint64_t modulus = 1;
  std::vector<ModMat> members;
};

/// Requires det(g) > 0 dividing the modulus.
GammaGQuotient gamma_g_quotient(const IMat2& g, std::uint64_t modulus,
                                std::size_t cap = kDefaultSl2Cap);

/// Exact membership test: g^-1 gamma g integral.
bool in_gamma_g(const IMat2& g, const IMat2& gamma);

/// Orbit of v + M2(Z) under a finite group image acting by v -> v gamma.
/// Elements are reduced into [0, 1) entrywise and sorted.
struct Orbit {
  std::vector<QMat2> elements;
  std::size_t size() const { return elements.size(); }
};

/// The denominator of v must divide the modulus of the group elements.
Orbit gamma_orbit(const QMat2& v, std::span<const ModMat> group);

/// Entrywise reduction into [0, 1).
QMat2 reduce_mod_integers(const QMat2& v);

/// Every quantity entering R_{P0}(vg) and L_{P0}(vg).
struct SemidirectCounts {
  Int gamma_cosets;        // R_Gamma(g) = L_Gamma(g)
  Int orbit_classes;       // Gamma_g-orbit of v modulo V0 + g(V0)
  Int sum_over_v0;         // [V0 + g(V0) : V0]
  Int sum_over_gv0;        // [V0 + g(V0) : g(V0)]
  std::uint64_t modulus;   // finite quotient used for Gamma_g
  Int right;               // R_{P0}
  Int left;                // L_{P0}
  Rat delta() const { return make_rat(left, right); }
};

inline constexpr std::uint64_t kDefaultModCap = 64;

SemidirectCounts semidirect_counts(const SemidirectElement& x,
                                   std::uint64_t mod_cap = kDefaultModCap);
Int semidirect_R(const SemidirectElement& x, std::uint64_t mod_cap = kDefaultModCap);
Int semidirect_L(const SemidirectElement& x, std::uint64_t mod_cap = kDefaultModCap);

/// |M2(Z) / (M2(Z) cap M2(Z) g)| as a generalized index.
Rat module_index(const QMat2& g);

}  // namespace heckepair
