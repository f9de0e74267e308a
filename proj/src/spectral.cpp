#include "heckepair/spectral.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace heckepair {

namespace {

using Entries = std::vector<std::pair<Lattice, Rat>>;

/// Builds an operator column by column; lattices outside the window flag
/// the column as truncated and are dropped.
template <class F>
SparseOperator assemble(const TruncationWindow& w, F&& column) {
  SparseOperator op(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    bool outside = false;
    for (const auto& [l, c] : column(j, outside)) {
      if (auto i = w.find(l)) {
        op.add(*i, j, c);
      } else {
        outside = true;
      }
    }
    if (outside) op.mark_truncated(j);
  }
  return op;
}

std::uint64_t checked_prime(std::uint64_t p) {
  if (!is_prime(p)) throw InvalidArgument("expected a prime, got " + std::to_string(p));
  return p;
}

bool is_power_of(std::uint64_t n, std::uint64_t p) {
  while (n % p == 0) n /= p;
  return n == 1;
}

/// Whether lattices of index idx * n can lie in the window at all.
bool reachable(const TruncationWindow& w, const Int& idx, std::uint64_t n) {
  const Int target = idx * Int(static_cast<unsigned long>(n));
  if (target > Int(static_cast<unsigned long>(w.bound()))) return false;
  if (w.mode() == TruncationWindow::Mode::prime) return is_power_of(target.get_ui(), w.p());
  return true;
}

std::uint64_t det_u64(const DoubleCoset& dc) {
  const Int n = dc.det();
  if (!n.fits_ulong_p()) throw SizeCapError("determinant too large for a window operator");
  return n.get_ui();
}

SparseOperator unit_matrix(std::size_t dim, std::size_t i, std::size_t j) {
  SparseOperator e(dim);
  e.add(i, j, Rat(1));
  return e;
}

/// The prime-to-p part of a lattice containing Z^2.
Lattice off_part(const Lattice& l, std::uint64_t p) {
  Lattice out;
  for (const auto& [q, lq] : tensor_parts(l))
    if (q != p) out = lattice_sum(out, lq);
  return out;
}

}  // namespace

// ---------------------------------------------------------------- windows

TruncationWindow TruncationWindow::global(std::uint64_t bound, std::uint64_t margin) {
  if (bound == 0) throw InvalidArgument("window bound must be positive");
  if (margin == 0) throw InvalidArgument("window margin must be positive");
  TruncationWindow w;
  w.mode_ = Mode::global;
  w.cap_ = bound;
  w.default_step_ = margin;
  std::vector<Lattice> basis;
  for (std::uint64_t n = 1; n <= bound; ++n)
    for (auto& l : superlattices(n)) basis.push_back(std::move(l));
  w.build(std::move(basis));
  return w;
}

TruncationWindow TruncationWindow::prime(std::uint64_t p, unsigned depth) {
  checked_prime(p);
  TruncationWindow w;
  w.mode_ = Mode::prime;
  w.p_ = p;
  w.depth_ = depth;
  const Int cap = ipow(Int(static_cast<unsigned long>(p)), depth);
  if (!cap.fits_ulong_p()) throw SizeCapError("prime window too deep");
  w.cap_ = cap.get_ui();
  w.default_step_ = p;
  std::vector<Lattice> basis;
  std::uint64_t n = 1;
  for (unsigned j = 0; j <= depth; ++j, n *= p)
    for (auto& l : superlattices(n)) basis.push_back(std::move(l));
  w.build(std::move(basis));
  return w;
}

void TruncationWindow::build(std::vector<Lattice> basis) {
  basis_ = std::move(basis);
  indices_.clear();
  lookup_.clear();
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    indices_.push_back(basis_[i].superlattice_index());
    lookup_.emplace(basis_[i], i);
  }
}

std::optional<std::size_t> TruncationWindow::find(const Lattice& l) const {
  auto it = lookup_.find(l);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t TruncationWindow::position(const Lattice& l) const {
  if (auto i = find(l)) return *i;
  throw BoundaryError("lattice " + l.to_string() + " is outside " + describe());
}

std::vector<std::size_t> TruncationWindow::interior(std::uint64_t factor) const {
  std::vector<std::size_t> out;
  const Int cap(static_cast<unsigned long>(cap_));
  const Int f(static_cast<unsigned long>(factor));
  for (std::size_t i = 0; i < basis_.size(); ++i)
    if (indices_[i] * f <= cap) out.push_back(i);
  return out;
}

std::string TruncationWindow::describe() const {
  if (mode_ == Mode::global) return "global(" + std::to_string(cap_) + ")";
  return "prime(" + std::to_string(p_) + "," + std::to_string(depth_) + ")";
}

// ---------------------------------------------------------------- w points

AdelicPoint AdelicPoint::make(const ModMat& w) {
  if (w.modulus == 0) throw InvalidArgument("adelic point modulus must be positive");
  if (std::gcd(w.det(), w.modulus) != 1) {
    throw InvalidArgument("adelic point is not invertible mod " + std::to_string(w.modulus));
  }
  return AdelicPoint{w.modulus, w};
}

bool AdelicPoint::is_unit() const { return w == ModMat::reduce(IMat2::identity(), modulus); }

AdelicPoint AdelicPoint::inverse() const {
  const Int n(static_cast<unsigned long>(modulus));
  Int dinv;
  const Int det(static_cast<unsigned long>(w.det()));
  if (modulus == 1) return *this;
  if (mpz_invert(dinv.get_mpz_t(), det.get_mpz_t(), n.get_mpz_t()) == 0) {
    throw InvalidArgument("adelic point is not invertible");
  }
  return make(ModMat::reduce(w.lift().adjugate().scaled(dinv), modulus));
}

std::string AdelicPoint::to_string() const { return heckepair::to_string(w.lift()) + " mod " + std::to_string(modulus); }

// ---------------------------------------------------------------- operators

SparseOperator::SparseOperator(std::size_t dim) : cols_(dim), trunc_(dim, false) {}

SparseOperator SparseOperator::identity(std::size_t dim) {
  SparseOperator r(dim);
  for (std::size_t i = 0; i < dim; ++i) r.add(i, i, Rat(1));
  return r;
}

Rat SparseOperator::entry(std::size_t i, std::size_t j) const {
  const auto& c = cols_.at(j);
  auto it = c.find(i);
  return it == c.end() ? Rat(0) : it->second;
}

void SparseOperator::add(std::size_t i, std::size_t j, const Rat& x) {
  if (i >= dim()) throw InvalidArgument("row index out of range");
  if (x == 0) return;
  auto& c = cols_.at(j);
  auto [it, fresh] = c.emplace(i, x);
  if (!fresh) {
    it->second += x;
    if (it->second == 0) c.erase(it);
  }
}

std::size_t SparseOperator::nnz() const {
  std::size_t n = 0;
  for (const auto& c : cols_) n += c.size();
  return n;
}

SparseOperator SparseOperator::operator*(const SparseOperator& o) const {
  if (dim() != o.dim()) throw InvalidArgument("operator dimensions differ");
  SparseOperator r(dim());
  for (std::size_t j = 0; j < dim(); ++j) {
    bool t = o.trunc_[j];
    for (const auto& [k, x] : o.cols_[j]) {
      t = t || trunc_[k];
      for (const auto& [i, y] : cols_[k]) r.add(i, j, y * x);
    }
    if (t) r.trunc_[j] = true;
  }
  return r;
}

SparseOperator SparseOperator::operator+(const SparseOperator& o) const {
  if (dim() != o.dim()) throw InvalidArgument("operator dimensions differ");
  SparseOperator r = *this;
  for (std::size_t j = 0; j < dim(); ++j) {
    for (const auto& [i, x] : o.cols_[j]) r.add(i, j, x);
    if (o.trunc_[j]) r.trunc_[j] = true;
  }
  return r;
}

SparseOperator SparseOperator::operator-(const SparseOperator& o) const { return *this + o.scaled(Rat(-1)); }

SparseOperator SparseOperator::scaled(const Rat& c) const {
  SparseOperator r(dim());
  r.trunc_ = trunc_;
  if (c == 0) return r;
  for (std::size_t j = 0; j < dim(); ++j)
    for (const auto& [i, x] : cols_[j]) r.cols_[j].emplace(i, x * c);
  return r;
}

SparseOperator SparseOperator::transpose() const {
  SparseOperator r(dim());
  r.trunc_ = trunc_;
  for (std::size_t j = 0; j < dim(); ++j)
    for (const auto& [i, x] : cols_[j]) r.cols_[i].emplace(j, x);
  return r;
}

bool SparseOperator::equal_on(const SparseOperator& o, std::span<const std::size_t> cols) const {
  for (auto j : cols)
    if (cols_.at(j) != o.cols_.at(j)) return false;
  return true;
}

bool SparseOperator::equal_block(const SparseOperator& o, std::span<const std::size_t> rows,
                                 std::span<const std::size_t> cols) const {
  for (auto j : cols)
    for (auto i : rows)
      if (entry(i, j) != o.entry(i, j)) return false;
  return true;
}

std::vector<Triplet> SparseOperator::triplets() const {
  std::vector<Triplet> out;
  for (std::size_t j = 0; j < dim(); ++j)
    for (const auto& [i, x] : cols_[j]) out.push_back({i, j, x});
  std::sort(out.begin(), out.end(), [](const Triplet& a, const Triplet& b) {
    return std::tie(a.row, a.col) < std::tie(b.row, b.col);
  });
  return out;
}

SparseOperator op_v(std::uint64_t p, const TruncationWindow& w) {
  checked_prime(p);
  return assemble(w, [&](std::size_t j, bool& outside) {
    Entries e;
    if (!reachable(w, w.index(j), p)) {
      outside = true;
      return e;
    }
    for (auto& l : superlattices_of(w.at(j), p)) e.emplace_back(std::move(l), Rat(1));
    return e;
  });
}

SparseOperator op_v_star(std::uint64_t p, const TruncationWindow& w) {
  checked_prime(p);
  return assemble(w, [&](std::size_t j, bool&) {
    Entries e;
    for (auto& l : sublattices_containing_standard(w.at(j), p)) e.emplace_back(std::move(l), Rat(1));
    return e;
  });
}

SparseOperator op_u(std::uint64_t p, const TruncationWindow& w) {
  checked_prime(p);
  const QMat2 s = QMat2::diag(make_rat(Int(1), Int(p)), make_rat(Int(1), Int(p)));
  return assemble(w, [&](std::size_t j, bool& outside) {
    Entries e;
    if (!reachable(w, w.index(j), p * p)) {
      outside = true;
      return e;
    }
    e.emplace_back(act(s, w.at(j)), Rat(1));
    return e;
  });
}

SparseOperator op_u_star(std::uint64_t p, const TruncationWindow& w) {
  checked_prime(p);
  const QMat2 s = QMat2::diag(Rat(p), Rat(p));
  return assemble(w, [&](std::size_t j, bool&) {
    Entries e;
    Lattice l = act(s, w.at(j));
    if (l.contains_standard()) e.emplace_back(std::move(l), Rat(1));
    return e;
  });
}

SparseOperator op_H(const TruncationWindow& w) {
  SparseOperator h(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) h.add(j, j, Rat(w.index(j)));
  return h;
}

SparseOperator op_hecke(const HeckeElement& f, const TruncationWindow& w, const AdelicPoint& at) {
  const bool plain = at.is_unit();
  const AdelicPoint inv = at.inverse();
  const auto moved = [&](const Lattice& l) { return plain ? l : act_integral(inv.w, l); };
  return assemble(w, [&](std::size_t j, bool& outside) {
    Entries e;
    const Lattice lw = moved(w.at(j));
    const QMat2 s = to_rational(lw.coset_matrix());
    for (const auto& [dc, c] : f.terms()) {
      const std::uint64_t n = det_u64(dc);
      if (!reachable(w, w.index(j), n)) {
        outside = true;
        continue;
      }
      for (auto& l : superlattices_of(w.at(j), n)) {
        const Lattice mw = moved(l);
        if (!mw.contains(lw)) continue;
        const auto [d1, d2] = quotient_type(act(s, mw));
        if (d1 == dc.d1 && d2 == dc.d2) e.emplace_back(std::move(l), c);
      }
    }
    return e;
  });
}

SparseOperator regular_rep_matrix(const HeckeElement& f, const TruncationWindow& w) {
  std::map<DoubleCoset, std::vector<IMat2>> reps;
  for (const auto& [dc, c] : f.terms()) reps.emplace(dc, right_cosets(dc));
  return assemble(w, [&](std::size_t j, bool& outside) {
    Entries e;
    const IMat2 s = w.at(j).coset_matrix();
    for (const auto& [dc, c] : f.terms()) {
      if (!reachable(w, w.index(j), det_u64(dc))) {
        outside = true;
        continue;
      }
      for (const auto& t : reps.at(dc)) e.emplace_back(Lattice::of_coset(t * s), c);
    }
    return e;
  });
}

SparseOperator op_semidirect(const SemidirectHeckeElement& f, const TruncationWindow& w) {
  SparseOperator r(w.size());
  for (const auto& [dc, c] : f.terms) {
    r = r + regular_rep_matrix(HeckeElement::basis(dc), w).scaled(c * Rat(dc.det()));
  }
  return r;
}

SparseOperator op_pi_L(const Lattice& l0, const TruncationWindow& w, const AdelicPoint& at) {
  if (!l0.contains_standard()) throw InvalidArgument("pi_L needs a lattice containing Z^2");
  const Lattice m = at.is_unit() ? l0 : act_integral(at.w, l0);
  SparseOperator r(w.size());
  for (std::size_t j = 0; j < w.size(); ++j)
    if (w.at(j).contains(m)) r.add(j, j, Rat(1));
  return r;
}

SparseOperator op_e_L(const Lattice& l0, std::uint64_t p, const TruncationWindow& w) {
  checked_prime(p);
  const Int idx = l0.superlattice_index();
  if (!is_power_of(idx.get_ui(), p)) throw InvalidArgument("e_L needs a p-lattice: " + l0.to_string());
  const auto above = superlattices_of(l0, p);
  for (const auto& l : above) {
    if (!w.find(l)) throw BoundaryError("e_L: " + l0.to_string() + " is not interior to " + w.describe());
  }
  const SparseOperator pi0 = op_pi_L(l0, w);
  SparseOperator r = pi0;
  for (const auto& l : above) r = r * (pi0 - op_pi_L(l, w));
  return r;
}

SparseOperator op_U(const AdelicPoint& at, const TruncationWindow& w) {
  SparseOperator r(w.size());
  std::vector<bool> hit(w.size(), false);
  for (std::size_t j = 0; j < w.size(); ++j) {
    const Lattice l = at.is_unit() ? w.at(j) : act_integral(at.w, w.at(j));
    const std::size_t i = w.position(l);
    if (hit[i]) throw Error("U_w is not a permutation of " + w.describe());
    hit[i] = true;
    r.add(i, j, Rat(1));
  }
  return r;
}

// ---------------------------------------------------------------- checks

ProjectionReport projection_identity_check(std::uint64_t p, unsigned depth) {
  if (depth < 3) throw InvalidArgument("projection identity needs depth >= 3");
  const auto w = TruncationWindow::prime(p, depth);
  const auto v = op_v(p, w), vs = op_v_star(p, w), u = op_u(p, w), us = op_u_star(p, w);
  const auto one = SparseOperator::identity(w.size());
  const auto t = vs * v - v * vs - (one - u * us).scaled(Rat(p));
  const auto e0 = unit_matrix(w.size(), 0, 0);

  ProjectionReport rep;
  rep.p = p;
  rep.depth = depth;
  const auto inner = w.interior(p * p);
  rep.interior_columns = inner.size();
  bool exact = true;
  for (auto j : inner) {
    const std::size_t jj[] = {j};
    if (t.truncated(j) || !t.equal_on(e0, jj)) {
      exact = false;
      ++rep.mismatched_columns;
    }
  }
  rep.exact = exact;
  std::vector<bool> is_inner(w.size(), false);
  for (auto j : inner) is_inner[j] = true;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (is_inner[j]) continue;
    ++rep.boundary_columns;
    const std::size_t jj[] = {j};
    if (!t.equal_on(e0, jj)) ++rep.boundary_nonzero;
  }
  const Lattice big = Lattice::scaled_standard(Int(p));
  bool ann = true;
  for (auto j : inner)
    if (w.at(j).contains(big) && !t.column(j).empty()) ann = false;
  rep.annihilates_large = ann;
  return rep;
}

TensorReport tensor_factorization_check(std::uint64_t p, std::uint64_t bound) {
  checked_prime(p);
  if (bound < p * p) throw InvalidArgument("tensor check needs B >= p^2");
  const auto g = TruncationWindow::global(bound, p);
  unsigned k = 0;
  for (Int c(1); c < Int(static_cast<unsigned long>(bound)) * Int(p * p); c *= Int(p)) ++k;
  const auto pw = TruncationWindow::prime(p, k);

  TensorReport rep;
  rep.p = p;
  rep.bound = bound;

  // Global column L must equal the prime column at L_p, shifted by L_{p'}.
  const auto compare = [&](const SparseOperator& global_op, const SparseOperator& prime_op, std::uint64_t step) {
    bool ok = true;
    for (auto j : g.interior(step)) {
      if (global_op.truncated(j)) {
        ok = false;
        continue;
      }
      const Lattice& l = g.at(j);
      const Lattice lp = localize(l, p);
      const Lattice off = off_part(l, p);
      const std::size_t pj = pw.position(lp);
      if (prime_op.truncated(pj)) {
        ok = false;
        continue;
      }
      SparseOperator::Column expected;
      for (const auto& [i, c] : prime_op.column(pj)) {
        const auto gi = g.find(lattice_sum(pw.at(i), off));
        if (!gi) {
          ok = false;
          continue;
        }
        expected.emplace(*gi, c);
      }
      if (expected != global_op.column(j)) ok = false;
      ++rep.columns_checked;
    }
    return ok;
  };

  rep.block_structure["u_p"] = compare(op_hecke(HeckeElement::u(p), g), op_u(p, pw), p * p);
  rep.block_structure["v_p"] = compare(op_hecke(HeckeElement::v(p), g), op_v(p, pw), p);
  bool e_ok = true;
  std::size_t e_count = 0;
  for (std::uint64_t n = 1; n * p <= bound; n *= p) {
    for (const auto& l0 : superlattices(n)) {
      e_ok = compare(op_e_L(l0, p, g), op_e_L(l0, p, pw), 1) && e_ok;
      ++e_count;
    }
  }
  rep.block_structure["e_L"] = e_ok && e_count > 0;
  rep.exact = true;
  for (const auto& [name, ok] : rep.block_structure) rep.exact = rep.exact && ok;
  return rep;
}

CommutatorReport commutator_check(std::uint64_t p, std::uint64_t q, std::uint64_t bound) {
  const auto g = TruncationWindow::global(bound, p * q);
  const auto a = op_hecke(HeckeElement::v(p), g);
  const auto b = op_hecke(HeckeElement::v(q), g);
  const auto c = a * b - b * a;
  CommutatorReport rep;
  rep.vanishes = true;
  for (auto j : g.interior(p * q)) {
    ++rep.columns_checked;
    if (c.truncated(j) || !c.column(j).empty()) rep.vanishes = false;
  }
  return rep;
}

GenerationReport compact_generation_check(std::uint64_t p, unsigned depth) {
  if (depth < 2) throw InvalidArgument("compact generation needs depth >= 2");
  const auto w = TruncationWindow::prime(p, depth);
  const auto v = op_v(p, w), vs = op_v_star(p, w), u = op_u(p, w), us = op_u_star(p, w);
  const auto one = SparseOperator::identity(w.size());
  const auto e0 = op_e_L(Lattice(), p, w);

  GenerationReport rep;
  rep.p = p;
  rep.depth = depth;
  {
    const auto t = vs * v - v * vs - (one - u * us).scaled(Rat(p));
    const auto inner = w.interior(p * p);
    rep.e0_from_generators = t.equal_on(e0, inner);
  }

  const auto inner = w.interior(p);
  // Partial isometries E_{L, Z^2} = lambda_L^-1 e_L v^n e_{Z^2}, n = log_p [L : Z^2].
  std::vector<SparseOperator> down, up;
  std::vector<SparseOperator> powers{one};
  std::vector<SparseOperator> star_powers{one};
  for (unsigned n = 1; n < depth; ++n) {
    powers.push_back(v * powers.back());
    star_powers.push_back(vs * star_powers.back());
  }
  for (auto j : inner) {
    unsigned n = 0;
    for (Int idx = w.index(j); idx > 1; idx /= Int(p)) ++n;
    const auto el = op_e_L(w.at(j), p, w);
    const Rat lambda = powers[n].entry(j, 0);
    if (lambda == 0) throw Error("no chain from Z^2 to " + w.at(j).to_string());
    down.push_back((el * powers[n] * e0).scaled(1 / lambda));
    up.push_back((e0 * star_powers[n] * el).scaled(1 / lambda));
  }
  for (std::size_t a = 0; a < inner.size(); ++a) {
    for (std::size_t b = 0; b < inner.size(); ++b) {
      ++rep.units_checked;
      const auto m = down[a] * up[b];
      if (m.equal_on(unit_matrix(w.size(), inner[a], inner[b]), inner)) ++rep.units_reached;
    }
  }
  return rep;
}

}  // namespace heckepair
