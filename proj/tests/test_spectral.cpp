#include <doctest.h>

#include <map>

#include "heckepair/spectral.hpp"
#include "oracles/oracles.hpp"
#include "support.hpp"

using namespace heckepair;
using namespace testing_support;

namespace {

SparseOperator unit(std::size_t dim, std::size_t i, std::size_t j) {
  SparseOperator e(dim);
  e.add(i, j, Rat(1));
  return e;
}

std::vector<std::size_t> all(const TruncationWindow& w) {
  std::vector<std::size_t> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = i;
  return out;
}

std::vector<AdelicPoint> sample_points() {
  std::vector<AdelicPoint> out;
  for (const IMat2& m : {im(1, 1, 0, 1), im(3, 0, 0, 1), im(0, 1, 1, 0), im(5, 2, 2, 1), im(1, 0, 4, 7)})
    out.push_back(AdelicPoint::make(ModMat::reduce(m, 8)));
  return out;
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("windows") {
    const auto g = TruncationWindow::global(12);
    CHECK(g.at(0) == Lattice());
    std::size_t expect = 0;
    for (long n = 1; n <= 12; ++n) expect += static_cast<std::size_t>(oracle::sigma1(n));
    CHECK(g.size() == expect);
    CHECK(g.interior().size() == 1 + 3 + 4 + 7 + 6 + 12);  // index <= 6 for margin 2
    const auto p = TruncationWindow::prime(2, 3);
    CHECK(p.size() == 1 + 3 + 7 + 15);
    CHECK(p.interior(2).size() == 1 + 3 + 7);
    CHECK_THROWS_AS(p.position(Lattice::scaled_standard(Int(3))), BoundaryError);
  }

  TEST_CASE("op_v and op_u on the standard lattice") {
    for (std::uint64_t p : {2, 3, 5}) {
      const auto w = TruncationWindow::prime(p, 3);
      const auto v = op_v(p, w);
      CHECK(v.column(0).size() == p + 1);
      for (const auto& [i, x] : v.column(0)) {
        CHECK(x == 1);
        CHECK(w.index(i) == static_cast<unsigned long>(p));
      }
      const auto u = op_u(p, w);
      const auto big = w.position(Lattice::scaled_standard(Int(static_cast<unsigned long>(p))));
      CHECK(u.column(0) == SparseOperator::Column{{big, Rat(1)}});
      // Column sums on the interior equal p + 1.
      for (auto j : w.interior(p)) {
        Rat s = 0;
        for (const auto& [i, x] : v.column(j)) s += x;
        CHECK(s == static_cast<unsigned long>(p + 1));
        CHECK_FALSE(v.truncated(j));
      }
    }
  }

  TEST_CASE("op_v_star relations") {
    for (std::uint64_t p : {2, 3}) {
      const auto w = TruncationWindow::prime(p, 4);
      const auto v = op_v(p, w), vs = op_v_star(p, w), u = op_u(p, w);
      CHECK(vs.column(0).empty());
      const auto inner = w.interior(p);
      CHECK(vs.equal_block(v.transpose(), inner, inner));
      CHECK((vs * u).equal_on(v, w.interior(p * p)));
      CHECK((u.transpose() * u).equal_on(SparseOperator::identity(w.size()), w.interior(p * p)));
    }
  }

  TEST_CASE("op_H diagonal") {
    const auto w = TruncationWindow::global(30, 1);
    const auto h = op_H(w);
    CHECK(h.entry(0, 0) == 1);
    std::map<Int, long> mult;
    for (std::size_t j = 0; j < w.size(); ++j) {
      CHECK(h.column(j).size() == 1);
      ++mult[h.entry(j, j).get_num()];
    }
    for (const auto& l : superlattices(3)) CHECK(h.entry(w.position(l), w.position(l)) == 3);
    for (long n = 1; n <= 30; ++n) CHECK(mult[Int(n)] == oracle::sigma1(n));
  }

  TEST_CASE("op_hecke matches the generator formulas") {
    const auto g = TruncationWindow::global(24);
    CHECK(op_hecke(HeckeElement::identity(), g) == SparseOperator::identity(g.size()));
    for (std::uint64_t p : {2, 3}) {
      const auto w = TruncationWindow::prime(p, 4);
      CHECK(op_hecke(HeckeElement::v(p), w) == op_v(p, w));
      CHECK(op_hecke(HeckeElement::u(p), w) == op_u(p, w));
    }
    CHECK(op_hecke(HeckeElement::v(2), g) == op_v(2, g));
    // Right-coset route agrees on columns whose image stays inside.
    const auto f = HeckeElement::v(2) + HeckeElement::basis(DoubleCoset::make(Int(1), Int(3)), r(5, 2));
    const auto a = op_hecke(f, g), b = regular_rep_matrix(f, g);
    CHECK(a.equal_on(b, g.interior(3)));
  }

  TEST_CASE("rescaled regular representation") {
    const auto w = TruncationWindow::global(24);
    const auto f = HeckeElement::v(2) + HeckeElement::u(2) + HeckeElement::basis(DoubleCoset::make(Int(1), Int(3)), r(1, 3));
    const auto lam = op_hecke(f, w);
    // Plain embedding: [s]_P0 -> det(s) lambda([s]); the det^-1 flavour undoes it.
    CHECK(op_semidirect(embed_semidirect(f, EmbeddingFlavor::det_inverse), w) == lam);
    SparseOperator scaled(w.size());
    for (const auto& [c, x] : f.terms()) scaled = scaled + op_hecke(HeckeElement::basis(c, x), w).scaled(Rat(c.det()));
    CHECK(op_semidirect(embed_semidirect(f, EmbeddingFlavor::plain), w) == scaled);
  }

  TEST_CASE("op_pi_L") {
    const auto w = TruncationWindow::global(12);
    CHECK(op_pi_L(Lattice(), w) == SparseOperator::identity(w.size()));
    for (std::size_t i = 0; i < w.size(); i += 7)
      for (std::size_t j = 0; j < w.size(); j += 5) {
        const Lattice s = lattice_sum(w.at(i), w.at(j));
        CHECK(op_pi_L(w.at(i), w) * op_pi_L(w.at(j), w) == op_pi_L(s, w));
      }
    for (std::size_t i = 0; i < w.size(); ++i) {
      std::size_t count = 0;
      for (const auto& l : w.basis()) count += l.contains(w.at(i));
      CHECK(op_pi_L(w.at(i), w).nnz() == count);
    }
  }

  TEST_CASE("op_e_L") {
    for (std::uint64_t p : {2, 3}) {
      const auto w = TruncationWindow::prime(p, 3);
      CHECK(op_e_L(Lattice(), p, w) == unit(w.size(), 0, 0));
      const auto inner = w.interior(p);
      SparseOperator sum(w.size());
      for (auto i : inner) {
        const auto e = op_e_L(w.at(i), p, w);
        CHECK(e == unit(w.size(), i, i));
        sum = sum + e;
        for (auto j : inner)
          if (j != i) CHECK((e * op_e_L(w.at(j), p, w)).nnz() == 0);
      }
      SparseOperator id(w.size());
      for (auto i : inner) id.add(i, i, Rat(1));
      CHECK(sum == id);
      const auto outer = w.size() - 1;
      CHECK_THROWS_AS(op_e_L(w.at(outer), p, w), BoundaryError);
    }
  }

  TEST_CASE("projection identity") {
    const auto a = projection_identity_check(2, 4);
    CHECK(a.exact);
    CHECK(a.annihilates_large);
    CHECK(a.interior_columns > 0);
    const auto b = projection_identity_check(3, 3);
    CHECK(b.exact);
    CHECK(b.annihilates_large);
  }

  TEST_CASE("symmetry unitaries") {
    const auto w = TruncationWindow::prime(2, 3);
    CHECK(op_U(AdelicPoint::unit(), w) == SparseOperator::identity(w.size()));
    const std::vector<HeckeElement> fs{HeckeElement::u(2), HeckeElement::v(2),
                                       HeckeElement::basis(DoubleCoset::make(Int(1), Int(4)), r(2)) + HeckeElement::v(2)};
    for (const auto& at : sample_points()) {
      const auto u = op_U(at, w);
      CHECK(u.column(0) == SparseOperator::Column{{0, Rat(1)}});
      CHECK(u * u.transpose() == SparseOperator::identity(w.size()));
      for (const auto& f : fs) {
        CHECK(u * op_hecke(f, w) * u.transpose() == op_hecke(f, w, at));
        // Hecke operators are orbit functions, so conjugation leaves them fixed.
        CHECK(u * op_hecke(f, w) * u.transpose() == op_hecke(f, w));
      }
      const Lattice l0 = Lattice::from_basis(QMat2::diag(r(1, 2), r(1)));
      CHECK(u * op_pi_L(l0, w) * u.transpose() == op_pi_L(l0, w, at));
    }
    CHECK_THROWS_AS(AdelicPoint::make(ModMat::reduce(IMat2::diag(Int(2), Int(1)), 8)), InvalidArgument);
  }

  TEST_CASE("tensor factorisation and commuting primes") {
    const auto t = tensor_factorization_check(2, 12);
    CHECK(t.exact);
    for (const auto& [name, ok] : t.block_structure) {
      INFO(name);
      CHECK(ok);
    }
    CHECK(t.block_structure.count("e_L"));
    const auto c = commutator_check(2, 3, 36);
    CHECK(c.vanishes);
    CHECK(c.columns_checked > 0);
  }

  TEST_CASE("matrix units from the generators") {
    for (std::uint64_t p : {2, 3}) {
      const auto g = compact_generation_check(p, 3);
      CHECK(g.complete());
      CHECK(g.units_checked == g.units_reached);
    }
  }

  TEST_CASE("sparse algebra") {
    const auto w = TruncationWindow::prime(2, 2);
    const auto v = op_v(2, w);
    CHECK(v.transpose().transpose() == v);
    CHECK((v - v).nnz() == 0);
    CHECK(v.scaled(r(2)) == v + v);
    CHECK((SparseOperator::identity(w.size()) * v) == v);
    CHECK(v.equal_on(v, all(w)));
  }
}
