#pragma once

// Truncated representations on l2 of lattices containing Z^2 and exact
// sparse operators built column by column from lattice formulas.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "heckepair/hecke.hpp"
#include "heckepair/lattice.hpp"

namespace heckepair {

/// Finite basis of lattices: all L containing Z^2 with [L : Z^2] <= B
/// (global), or with [L : Z^2] = p^j, j <= k (prime). Ordered by index, then
/// by canonical form; Z^2 comes first.
class TruncationWindow {
 public:
  enum class Mode { global, prime };

  /// margin: the largest step factor used for the default interior.
  static TruncationWindow global(std::uint64_t bound, std::uint64_t margin = 2);
  static TruncationWindow prime(std::uint64_t p, unsigned depth);

  Mode mode() const { return mode_; }
  std::uint64_t bound() const { return cap_; }  // largest index in the window
  std::uint64_t p() const { return p_; }
  unsigned depth() const { return depth_; }

  std::size_t size() const { return basis_.size(); }
  const std::vector<Lattice>& basis() const { return basis_; }
  const Lattice& at(std::size_t i) const { return basis_.at(i); }
  const Int& index(std::size_t i) const { return indices_.at(i); }
  std::optional<std::size_t> find(const Lattice& l) const;
  std::size_t position(const Lattice& l) const;  // throws when absent

  /// Positions with [L : Z^2] * factor <= bound.
  std::vector<std::size_t> interior(std::uint64_t factor) const;
  std::vector<std::size_t> interior() const { return interior(default_step_); }

  std::string describe() const;

 private:
  TruncationWindow() = default;
  void build(std::vector<Lattice> basis);

  Mode mode_ = Mode::global;
  std::uint64_t cap_ = 1;
  std::uint64_t p_ = 0;
  unsigned depth_ = 0;
  std::uint64_t default_step_ = 1;
  std::vector<Lattice> basis_;
  std::vector<Int> indices_;
  std::map<Lattice, std::size_t> lookup_;
};

/// w in GL2(Z-hat) known modulo N.
struct AdelicPoint {
  std::uint64_t modulus = 1;
  ModMat w;

  static AdelicPoint unit() { return AdelicPoint{1, ModMat::reduce(IMat2::identity(), 1)}; }
  static AdelicPoint make(const ModMat& w);
  bool is_unit() const;
  AdelicPoint inverse() const;
  std::string to_string() const;
};

struct Triplet {
  std::size_t row;
  std::size_t col;
  Rat value;
};

/// Column-major exact sparse matrix. A column is flagged truncated when the
/// defining formula produced lattices outside the window; such columns are
/// reported, never asserted.
class SparseOperator {
 public:
  using Column = std::map<std::size_t, Rat>;

  explicit SparseOperator(std::size_t dim = 0);
  static SparseOperator identity(std::size_t dim);

  std::size_t dim() const { return cols_.size(); }
  const Column& column(std::size_t j) const { return cols_.at(j); }
  bool truncated(std::size_t j) const { return trunc_.at(j); }
  void mark_truncated(std::size_t j) { trunc_.at(j) = true; }
  Rat entry(std::size_t i, std::size_t j) const;
  void add(std::size_t i, std::size_t j, const Rat& x);
  std::size_t nnz() const;

  SparseOperator operator*(const SparseOperator& o) const;
  SparseOperator operator+(const SparseOperator& o) const;
  SparseOperator operator-(const SparseOperator& o) const;
  SparseOperator scaled(const Rat& c) const;
  /// Entrywise transpose; truncation flags carry over per index.
  SparseOperator transpose() const;

  /// Columns cols agree entry by entry (all rows).
  bool equal_on(const SparseOperator& o, std::span<const std::size_t> cols) const;
  /// Entries (i, j) agree for i in rows, j in cols.
  bool equal_block(const SparseOperator& o, std::span<const std::size_t> rows,
                   std::span<const std::size_t> cols) const;
  std::vector<Triplet> triplets() const;
  bool operator==(const SparseOperator&) const = default;

 private:
  std::vector<Column> cols_;
  std::vector<bool> trunc_;
};

// Generators on a window.
SparseOperator op_v(std::uint64_t p, const TruncationWindow& w);
SparseOperator op_v_star(std::uint64_t p, const TruncationWindow& w);
SparseOperator op_u(std::uint64_t p, const TruncationWindow& w);
SparseOperator op_u_star(std::uint64_t p, const TruncationWindow& w);
/// Diagonal of indices [L : Z^2]; e^{-beta H} has diagonal index^{-beta}.
SparseOperator op_H(const TruncationWindow& w);

/// pi_w(f): entry (L', L) = f(class of L' over L), evaluated after moving
/// both lattices by w^-1. The unit point gives the plain representation.
SparseOperator op_hecke(const HeckeElement& f, const TruncationWindow& w,
                        const AdelicPoint& at = AdelicPoint::unit());
/// lambda(f) through right-coset matrices: delta_{Gamma s} -> sum_t delta_{Gamma t s}.
SparseOperator regular_rep_matrix(const HeckeElement& f, const TruncationWindow& w);
/// Operator of a semidirect Hecke element: [s]_{P0} acts as det(s) lambda([s]_Gamma).
SparseOperator op_semidirect(const SemidirectHeckeElement& f, const TruncationWindow& w);

/// Diagonal projection onto {L : w L0 in L}.
SparseOperator op_pi_L(const Lattice& l0, const TruncationWindow& w,
                       const AdelicPoint& at = AdelicPoint::unit());
/// prod over index-p superlattices L' of L0 of (pi_L0 - pi_L'); L0 must be a
/// p-lattice with every such L' inside the window.
SparseOperator op_e_L(const Lattice& l0, std::uint64_t p, const TruncationWindow& w);
/// Permutation delta_L -> delta_{wL}.
SparseOperator op_U(const AdelicPoint& at, const TruncationWindow& w);

struct ProjectionReport {
  std::uint64_t p = 0;
  unsigned depth = 0;
  std::size_t interior_columns = 0;
  bool exact = false;                 // T == e_{Z^2} on the interior
  std::size_t mismatched_columns = 0;
  std::size_t boundary_columns = 0;   // columns outside the interior
  std::size_t boundary_nonzero = 0;   // of those, where T differs from e_{Z^2}
  bool annihilates_large = false;     // T delta_L = 0 when (1/p) Z^2 in L
};

/// T = v*v - v v* - p(1 - u u*) against e_{Z^2} on prime(p, k), interior k - 2.
ProjectionReport projection_identity_check(std::uint64_t p, unsigned depth);

struct TensorReport {
  std::uint64_t p = 0;
  std::uint64_t bound = 0;
  std::size_t columns_checked = 0;
  std::map<std::string, bool> block_structure;  // per element name
  bool exact = false;
};

/// Compares u_p, v_p and e_L (for p-lattices L) on global(B) with the prime
/// operator tensored with the identity on the prime-to-p parts.
TensorReport tensor_factorization_check(std::uint64_t p, std::uint64_t bound);

struct CommutatorReport {
  std::size_t columns_checked = 0;
  bool vanishes = false;
};

/// [op(v_p), op(v_q)] on the interior of global(B).
CommutatorReport commutator_check(std::uint64_t p, std::uint64_t q, std::uint64_t bound);

struct GenerationReport {
  std::uint64_t p = 0;
  unsigned depth = 0;
  std::size_t units_checked = 0;
  std::size_t units_reached = 0;
  bool e0_from_generators = false;  // e_{Z^2} equals the projection identity expression
  bool complete() const { return units_checked > 0 && units_checked == units_reached && e0_from_generators; }
};

/// Builds every matrix unit E_{L, L0} on the interior of prime(p, k) as
/// (lambda_L lambda_L0)^-1 e_L v^n e_{Z^2} v*^m e_L0.
GenerationReport compact_generation_check(std::uint64_t p, unsigned depth);

}  // namespace heckepair
