#pragma once

// Partition functions, truncated Gibbs traces and KMS checks for the
// dynamics sigma_t(f) = det^{it} f. Every decimal carries an explicit bound.

#include <boost/multiprecision/mpfr.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "heckepair/hecke.hpp"
#include "heckepair/spectral.hpp"

namespace heckepair {

using Real = boost::multiprecision::mpfr_float;

inline constexpr unsigned kDefaultPrecision = 50;

/// Working precision in decimal digits for all subsequently created Reals.
void set_precision(unsigned digits);
unsigned precision();
/// Absolute slack covering rounding at the working precision.
Real rounding_slack();

Real to_real(const Rat& x);
std::string format_real(const Real& x, int digits = 20);

/// A value with |true - value| <= error.
struct Certified {
  Real value;
  Real error;
};

inline constexpr std::uint64_t kDefaultZetaTerms = 10'000;

/// zeta(s), s > 1, from the first N terms and the integral-test enclosure.
Certified zeta(const Real& s, std::uint64_t terms = kDefaultZetaTerms);

/// (1 - p^-beta)(1 - p^(1-beta)).
Real euler_factor_inverse(std::uint64_t p, const Real& beta);

/// beta scaled for the det^{k it} variant of the dynamics.
Real effective_beta(const Real& beta, unsigned det_power);

struct PartitionReport {
  Real beta;
  std::uint64_t p = 0;         // 0 for the global function
  std::uint64_t truncation = 0;  // depth k or index bound B
  Real partial_sum;
  Real closed_form;
  Real closed_form_error;      // from the zeta enclosures (0 per prime)
  Real tail_bound;             // majorant of the omitted terms
  bool certified = true;
  /// Certified gap: |partial - closed| <= tail_bound + closed_form_error.
  bool consistent() const;
  Real gap() const;
};

/// sum_{j <= k} sigma1(p^j) p^(-beta j) against the Euler factor. The first
/// few sigma1 values come from lattice enumeration.
PartitionReport partition_prime(std::uint64_t p, const Real& beta, unsigned depth);
/// Exact rational partial sum for integer beta.
Rat partition_prime_exact(std::uint64_t p, unsigned beta, unsigned depth);

/// sum_{n <= B} sigma1(n) n^-beta against zeta(beta) zeta(beta - 1).
PartitionReport partition_global(const Real& beta, std::uint64_t bound,
                                 std::uint64_t zeta_terms = kDefaultZetaTerms);
/// Majorant of sum_{n > B} sigma1(n) n^-beta, beta > 2.
Real global_tail_bound(const Real& beta, std::uint64_t bound);

// ---------------------------------------------------------------- words

/// Generators acting on p-lattices; coset letters carry a p-power class.
struct Letter {
  enum class Kind { v, v_star, u, u_star, e0, coset, coset_star };
  Kind kind = Kind::v;
  DoubleCoset dc{};

  Letter star() const;
  /// sigma_t scales the letter by degree^{it}.
  Rat degree(std::uint64_t p) const;
  /// Bound on column l1 norms.
  Int column_norm(std::uint64_t p) const;
  std::string to_string() const;
  bool operator==(const Letter&) const = default;
};

/// a = l1 l2 ... ln; applied to a vector the last letter acts first.
struct OpWord {
  std::vector<Letter> letters;

  static OpWord parse(const std::string& s);  // e.g. "v* v", "u e0 u*"
  OpWord operator*(const OpWord& o) const;
  OpWord star() const;
  Rat degree(std::uint64_t p) const;
  Int column_norm(std::uint64_t p) const;
  std::string to_string() const;
};

/// Finite combination of words.
struct OpPoly {
  std::vector<std::pair<Rat, OpWord>> terms;

  static OpPoly word(const OpWord& w, const Rat& c = Rat(1));
  /// Image of a Hecke element supported on p-power classes.
  static OpPoly hecke(const HeckeElement& f, std::uint64_t p);
  OpPoly operator*(const OpPoly& o) const;
  OpPoly operator+(const OpPoly& o) const;
  OpPoly star() const;
  /// The common degree; throws NotHomogeneousError for mixed degrees.
  Rat homogeneous_degree(std::uint64_t p) const;
  Rat column_norm(std::uint64_t p) const;
};

using LatticeVector = std::map<Lattice, Rat>;

LatticeVector apply_letter(const Letter& l, std::uint64_t p, const LatticeVector& x);
LatticeVector apply_word(const OpWord& w, std::uint64_t p, const LatticeVector& x);

/// L / Z^2 = Z/p^a + Z/p^b, a <= b: representative diag(p^-a, p^-b) Z^2.
Lattice type_representative(std::uint64_t p, unsigned a, unsigned b);
/// Number of p-lattices of that type.
Int type_count(std::uint64_t p, unsigned a, unsigned b);

struct StateValue {
  Real value;
  Real tail_bound;
  bool certified = true;
};

/// phi_{beta,p}(a) = E_p Tr(pi_p(a) e^{-beta H_p}) truncated at index p^depth,
/// summing one representative per GL2(Z_p)-orbit.
StateValue phi_prime(const OpPoly& a, std::uint64_t p, const Real& beta, unsigned depth);
/// The same trace over every lattice of the window (small depths).
StateValue phi_prime_enumerated(const OpPoly& a, std::uint64_t p, const Real& beta, unsigned depth);
/// Exact truncated trace E_p-free sum for integer beta, by orbit types.
Rat trace_prime_exact(const OpPoly& a, std::uint64_t p, unsigned beta, unsigned depth);

/// Normalized truncated trace of an assembled operator on a window; norm is
/// a bound on its column l1 norms. Prime windows use E_p, global windows
/// use 1 / (zeta(beta) zeta(beta - 1)).
StateValue phi_window(const SparseOperator& op, const TruncationWindow& w, const Real& beta, const Rat& norm);

struct KmsResidual {
  Real lhs;        // phi(ab)
  Real rhs;        // deg(a)^-beta phi(ba)
  Real residual;   // |lhs - rhs|
  Real bound;      // combined truncation bound
  bool within_bound() const { return residual <= bound; }
};

KmsResidual kms_residual(const OpPoly& a, const OpPoly& b, std::uint64_t p, const Real& beta, unsigned depth);

// ---------------------------------------------------------------- measure

/// sum_n c_n n^-beta with integer coefficients.
struct DirichletPoly {
  std::map<std::uint64_t, Int> coeffs;

  static DirichletPoly one();
  DirichletPoly operator*(const DirichletPoly& o) const;
  Real evaluate(const Real& beta) const;
  Rat evaluate_exact(unsigned beta) const;
  std::string to_string() const;
};

struct MeasureValue {
  DirichletPoly poly;
  Real value;
  std::optional<Rat> exact;  // for integer beta
};

/// mu(Y_F) = prod_{p in F} (1 - p^-beta)(1 - p^(1-beta)).
MeasureValue measure_cylinder(const std::vector<std::uint64_t>& primes, const Real& beta);

/// zeta(beta)^-1 zeta(beta - 1)^-1 det(s)^-beta.
Certified mu_orbit_mass(const IMat2& s, const Real& beta, std::uint64_t zeta_terms = kDefaultZetaTerms);

struct MassReport {
  Real mass_sum;     // over lattices of index <= B
  Real lower;        // certified lower bound on the mass sum
  Real upper;        // certified upper bound on the mass sum
  Real tail_bound;   // omitted mass
};

/// Sum of orbit masses over all lattices containing Z^2 of index <= B.
MassReport total_orbit_mass(const Real& beta, std::uint64_t bound, std::uint64_t zeta_terms = kDefaultZetaTerms);

}  // namespace heckepair
