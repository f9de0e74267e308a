#pragma once

// Lattices in Q^2 commensurable with Z^2.
//
// Points are column vectors; a matrix g acts by x -> g x, so the lattice
// attached to s in M2(Z)+ is L_s = s^-1 Z^2, and Gamma s -> L_s identifies
// Gamma\S with the lattices containing Z^2. Basis matrices store the basis
// vectors as rows, so the action of g sends a basis matrix B to B g^T.

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "heckepair/exact.hpp"

namespace heckepair {

/// Canonical form: q minimal with qL in Z^2, and the row HNF of qL.
class Lattice {
 public:
  /// The standard lattice Z^2.
  Lattice();

  /// Lattice spanned by the rows of a nonsingular rational matrix.
  static Lattice from_basis(const QMat2& rows);
  /// Lattice s^-1 Z^2 for s with positive determinant.
  static Lattice of_coset(const IMat2& s);
  /// (1/n) Z^2.
  static Lattice scaled_standard(const Int& n);

  const Int& q() const { return q_; }
  const HnfForm& hnf() const { return hnf_; }
  /// Basis vectors as rows.
  QMat2 basis() const;
  /// Basis vectors as columns.
  QMat2 column_basis() const { return basis().transpose(); }

  /// [L : Z^2] as a generalized index (covolume ratio).
  Rat index() const;
  /// Index over Z^2 for lattices containing Z^2.
  Int superlattice_index() const;
  bool contains_standard() const;

  /// s in HNF with L = s^-1 Z^2; requires Z^2 in L.
  IMat2 coset_matrix() const;

  bool contains(const QVec2& v) const;
  /// True when other is a sublattice of this lattice.
  bool contains(const Lattice& other) const;
  /// Canonical representative of v + L in the box [0, a/q) x [0, d/q).
  QVec2 reduce(const QVec2& v) const;

  std::string to_string() const;

  bool operator==(const Lattice& o) const = default;
  std::strong_ordering operator<=>(const Lattice& o) const;

 private:
  Lattice(Int q, HnfForm h) : q_(std::move(q)), hnf_(std::move(h)) {}
  static Lattice canonical(Int q, const HnfForm& h);
  Int q_;
  HnfForm hnf_;

  friend Lattice lattice_sum(const Lattice&, const Lattice&);
};

Lattice lattice_from_basis(const QMat2& rows);

/// |L / L cap L0| / |L0 / L cap L0|.
Rat rel_index(const Lattice& l, const Lattice& l0);

Lattice lattice_sum(const Lattice& l1, const Lattice& l2);
Lattice lattice_intersect(const Lattice& l1, const Lattice& l2);
/// {y : x . y in Z for all x in L}.
Lattice dual(const Lattice& l);

/// All L containing Z^2 with [L : Z^2] = n, sorted by canonical form.
std::vector<Lattice> superlattices(std::uint64_t n);
/// Lattices M with L in M and [M : L] = n, sorted.
std::vector<Lattice> superlattices_of(const Lattice& l, std::uint64_t n);
/// Lattices M with Z^2 in M, M in L and [L : M] = n, sorted.
std::vector<Lattice> sublattices_containing_standard(const Lattice& l, std::uint64_t n);

/// L_p: preimage in L of the p-Sylow subgroup of L / Z^2.
Lattice localize(const Lattice& l, std::uint64_t p);

using PrimeParts = std::map<std::uint64_t, Lattice>;

/// L -> (L_p) over the primes dividing [L : Z^2].
PrimeParts tensor_parts(const Lattice& l);
/// Sum of all parts; inverse of tensor_parts.
Lattice reassemble(const PrimeParts& parts);

/// g L for nonsingular rational g.
Lattice act(const QMat2& g, const Lattice& l);

/// w L for w in GL2(Z-hat) known modulo its modulus; the denominator of L
/// (exponent of L / Z^2) must divide the modulus.
Lattice act_integral(const ModMat& w, const Lattice& l);

/// Representatives of L / Z^2 in [0, 1)^2 for L containing Z^2, sorted.
std::vector<QVec2> quotient_representatives(const Lattice& l);

/// Elementary divisors (d1, d2), d1 | d2, of L / Z^2 for L containing Z^2.
std::pair<Int, Int> quotient_type(const Lattice& l);

}  // namespace heckepair
