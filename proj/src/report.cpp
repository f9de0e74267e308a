#include "heckepair/report.hpp"

#include <random>
#include <sstream>

#include "heckepair/coset.hpp"
#include "heckepair/hecke.hpp"
#include "heckepair/kms.hpp"
#include "heckepair/spectral.hpp"

namespace heckepair {

namespace {

Rat r(long n, long d = 1) { return make_rat(Int(n), Int(d)); }

QMat2 qm(Rat a, Rat b, Rat c, Rat d) { return QMat2{std::move(a), std::move(b), std::move(c), std::move(d)}; }

std::string show(const Rat& x) { return x.get_str(); }

void numeric_row(SuiteReport& rep, const std::string& name, const std::string& anchor, const Real& value,
                 const Real& bound, bool ok, const std::string& detail = "") {
  rep.add(ReportRow{name, anchor, ok ? Status::pass : Status::fail, format_real(value), format_real(bound), detail});
}

std::vector<Real> betas_of(const RunConfig& cfg) {
  std::vector<Real> out;
  for (const auto& b : cfg.betas) {
    try {
      out.push_back(effective_beta(Real(b), cfg.det_power));
    } catch (const std::runtime_error&) {
      throw InvalidArgument("bad beta value: " + b);
    }
  }
  return out;
}

}  // namespace

nlohmann::ordered_json RunConfig::echo() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["primes"] = primes;
  j["beta"] = betas;
  j["depth"] = depth;
  j["bound"] = bound;
  j["k"] = k;
  j["precision"] = precision;
  j["format"] = format;
  j["seed"] = seed;
  j["det_power"] = det_power;
  j["modcap"] = modcap;
  return j;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::skipped: return "skipped";
  }
  return "?";
}

void SuiteReport::check(const std::string& name, const std::string& anchor, bool ok, const std::string& detail) {
  add(ReportRow{name, anchor, ok ? Status::pass : Status::fail, std::nullopt, std::nullopt, detail});
}

bool SuiteReport::passed() const { return count(Status::fail) == 0; }

std::size_t SuiteReport::count(Status s) const {
  std::size_t n = 0;
  for (const auto& row : rows) n += row.status == s ? 1 : 0;
  return n;
}

nlohmann::ordered_json to_json(const SuiteReport& rep, const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["schema"] = kSchemaVersion;
  j["suite"] = rep.suite;
  j["seed"] = cfg.seed;
  j["config"] = cfg.echo();
  j["passed"] = rep.passed();
  j["counts"] = {{"pass", rep.count(Status::pass)},
                 {"fail", rep.count(Status::fail)},
                 {"skipped", rep.count(Status::skipped)}};
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : rep.rows) {
    nlohmann::ordered_json o;
    o["check"] = row.check;
    o["anchor"] = row.anchor;
    o["status"] = to_string(row.status);
    if (row.value) o["value"] = *row.value;
    if (row.bound) o["bound"] = *row.bound;
    if (!row.detail.empty()) o["detail"] = row.detail;
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  return j;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_csv(const SuiteReport& rep) {
  std::ostringstream os;
  os << "suite,check,anchor,status,value,bound,detail\n";
  for (const auto& row : rep.rows) {
    os << csv_field(rep.suite) << ',' << csv_field(row.check) << ',' << csv_field(row.anchor) << ','
       << to_string(row.status) << ',' << csv_field(row.value.value_or("")) << ','
       << csv_field(row.bound.value_or("")) << ',' << csv_field(row.detail) << '\n';
  }
  return os.str();
}

std::string to_text(const SuiteReport& rep) {
  std::ostringstream os;
  for (const auto& row : rep.rows) {
    os << '[' << to_string(row.status) << "] " << rep.suite << ": " << row.check << " (" << row.anchor << ")";
    if (row.value) os << " value=" << *row.value;
    if (row.bound) os << " bound=" << *row.bound;
    if (!row.detail.empty()) os << "  " << row.detail;
    os << '\n';
  }
  os << rep.suite << ": " << rep.count(Status::pass) << " pass, " << rep.count(Status::fail) << " fail, "
     << rep.count(Status::skipped) << " skipped\n";
  return os.str();
}

std::string render(const SuiteReport& rep, const RunConfig& cfg) {
  if (cfg.format == "json") return to_json(rep, cfg).dump(2) + "\n";
  if (cfg.format == "csv") return to_csv(rep);
  if (cfg.format == "text") return to_text(rep);
  throw InvalidArgument("unknown format: " + cfg.format);
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"pair", "hecke", "projection", "tensor", "kms"};
  return names;
}

SuiteReport run_suite(const std::string& name, const RunConfig& cfg) {
  set_precision(cfg.precision);
  if (name == "pair") return pair_suite(cfg);
  if (name == "hecke") return hecke_suite(cfg);
  if (name == "projection") return projection_suite(cfg);
  if (name == "tensor") return tensor_suite(cfg);
  if (name == "kms") return kms_suite(cfg);
  throw InvalidArgument("unknown suite: " + name);
}

// ---------------------------------------------------------------- pair

SuiteReport pair_suite(const RunConfig& cfg) {
  SuiteReport rep{"pair", {}};
  for (std::uint64_t p : {2, 3, 5, 7}) {
    const auto n = right_cosets(DoubleCoset::make(Int(1), Int(p))).size();
    rep.check("R_Gamma(diag(1," + std::to_string(p) + ")) = " + std::to_string(n), "coset-count-p-plus-one",
              n == p + 1);
  }

  const std::vector<QMat2> gs{
      QMat2::identity(),      QMat2::diag(r(1), r(2)),  QMat2::diag(r(1), r(3)), qm(r(1), r(1), r(0), r(2)),
      qm(r(2), r(1), r(0), r(1)), QMat2::diag(r(1), r(4)), QMat2::diag(r(2), r(2)), QMat2::diag(r(1, 2), r(1))};
  const std::vector<QMat2> vs{QMat2{}, qm(r(1, 2), r(0), r(0), r(0)), qm(r(0), r(1, 2), r(1, 2), r(0)),
                              qm(r(1, 3), r(0), r(0), r(2, 3)), qm(r(1, 4), r(0), r(0), r(1, 2))};
  for (const auto& g : gs) {
    const Rat expected = 1 / (g.det() * g.det());
    for (const auto& v : vs) {
      const auto x = SemidirectElement::make(v, g);
      const std::string name = "Delta" + x.to_string();
      try {
        const auto c = semidirect_counts(x, cfg.modcap);
        rep.add(ReportRow{name, "modular-function", c.delta() == expected ? Status::pass : Status::fail,
                          show(c.delta()), show(expected),
                          "R=" + c.right.get_str() + " L=" + c.left.get_str()});
      } catch (const SizeCapError& e) {
        rep.add(ReportRow{name, "modular-function", Status::skipped, std::nullopt, std::nullopt, e.what()});
      }
    }
    const Rat ratio = module_index(inverse(g)) / module_index(g);
    rep.add(ReportRow{"module index ratio " + to_string(g), "module-index-ratio",
                      ratio == expected ? Status::pass : Status::fail, show(ratio), show(expected), ""});
  }
  return rep;
}

// ---------------------------------------------------------------- hecke

SuiteReport hecke_suite(const RunConfig& cfg) {
  SuiteReport rep{"hecke", {}};
  for (auto p : cfg.primes) {
    const Int q(static_cast<unsigned long>(p));
    const auto v = HeckeElement::v(p), u = HeckeElement::u(p);
    const auto vv = convolve(v, v);
    const auto expected =
        HeckeElement::basis(DoubleCoset::make(Int(1), q * q)) + HeckeElement::basis(DoubleCoset::make(q, q), Rat(q + 1));
    rep.check("v_" + std::to_string(p) + " * v_" + std::to_string(p) + " = " + vv.to_string(), "hecke-product",
              vv == expected);
    rep.check("u_p * u_p = [p^2, p^2]", "central-scalar", convolve(u, u) == HeckeElement::basis(DoubleCoset::make(q * q, q * q)));
    rep.check("product by classification agrees", "hecke-product", convolve_by_products(v, v) == vv);

    bool comm = true;
    std::vector<DoubleCoset> classes;
    for (std::uint64_t n = 1, j = 0; j <= 4; ++j, n *= p)
      for (const auto& dc : double_cosets_of_det(n)) classes.push_back(dc);
    for (const auto& a : classes)
      for (const auto& b : classes)
        comm = comm && convolve(HeckeElement::basis(a), HeckeElement::basis(b)) ==
                           convolve(HeckeElement::basis(b), HeckeElement::basis(a));
    rep.check("H(S_" + std::to_string(p) + ") commutative up to det p^4", "commutative-local-algebra", comm);

    const auto emb = embed_semidirect(v, EmbeddingFlavor::det_inverse);
    rep.check("v_p -> (1/p)[diag(1,p)]_P0", "fixed-point-embedding",
              emb.coefficient(DoubleCoset::make(Int(1), q)) == make_rat(Int(1), q));
    bool raised = false;
    try {
      involution(v);
    } catch (const AdjointLeavesSemigroupError&) {
      raised = true;
    }
    rep.check("involution(v_p) leaves the semigroup", "nonselfadjoint-semigroup", raised);
  }

  // Associativity on random triples with det <= 16.
  std::mt19937_64 rng(cfg.seed);
  std::vector<DoubleCoset> small;
  for (std::uint64_t n = 1; n <= 16; ++n)
    for (const auto& dc : double_cosets_of_det(n)) small.push_back(dc);
  const auto random_element = [&] {
    HeckeElement f;
    std::uniform_int_distribution<std::size_t> pick(0, small.size() - 1);
    std::uniform_int_distribution<long> coeff(-3, 3);
    const int terms = 1 + static_cast<int>(rng() % 2);
    for (int t = 0; t < terms; ++t) f.add(small[pick(rng)], Rat(coeff(rng) == 0 ? 1 : coeff(rng)));
    if (f.is_zero()) f = HeckeElement::basis(small[pick(rng)]);
    return f;
  };
  bool assoc = true;
  for (int i = 0; i < 50; ++i) {
    const auto f = random_element(), g = random_element(), h = random_element();
    assoc = assoc && convolve(convolve(f, g), h) == convolve(f, convolve(g, h));
  }
  rep.check("associativity on 50 random triples", "associativity", assoc);

  const auto id = HeckeElement::identity();
  bool unit = true;
  for (const auto& dc : small) {
    const auto f = HeckeElement::basis(dc);
    unit = unit && convolve(id, f) == f && convolve(f, id) == f;
  }
  rep.check("[identity] is a two-sided unit", "unit", unit);

  const auto six = convolve(HeckeElement::basis(DoubleCoset::make(Int(1), Int(2))),
                            HeckeElement::basis(DoubleCoset::make(Int(1), Int(3))));
  rep.check("[diag(1,2)] * [diag(1,3)] = [diag(1,6)]", "tensor-product-of-local-algebras",
            six == HeckeElement::basis(DoubleCoset::make(Int(1), Int(6))));

  // Embedding is multiplicative: coset counts agree for the semidirect pair.
  if (cfg.primes.size() >= 2) {
    const Int p(static_cast<unsigned long>(cfg.primes[0])), q(static_cast<unsigned long>(cfg.primes[1]));
    const IMat2 t = IMat2::diag(Int(1), p), s = IMat2::diag(Int(1), q);
    bool same = true;
    std::string detail;
    for (const IMat2& target : {IMat2::diag(Int(1), p * q), IMat2::diag(Int(1), p * p), IMat2::diag(p, q)}) {
      const Int a = gamma_structure_count(t, s, target), b = semidirect_structure_count(t, s, target);
      same = same && a == b;
      detail += to_string(target) + ":" + a.get_str() + "/" + b.get_str() + " ";
    }
    rep.check("R_P0 structure counts equal R_Gamma counts", "embedding-homomorphism", same, detail);
  }
  return rep;
}

// ---------------------------------------------------------------- projection

SuiteReport projection_suite(const RunConfig& cfg) {
  SuiteReport rep{"projection", {}};
  for (auto p : cfg.primes) {
    const unsigned k = p == 2 ? cfg.k : std::max(3u, cfg.k - 1);
    const auto pr = projection_identity_check(p, k);
    rep.check("T = e_Z2 on interior of prime(" + std::to_string(p) + "," + std::to_string(k) + ")",
              "projection-identity", pr.exact,
              std::to_string(pr.interior_columns) + " interior columns, " + std::to_string(pr.boundary_nonzero) +
                  " of " + std::to_string(pr.boundary_columns) + " boundary columns differ");
    rep.check("T annihilates lattices containing (1/p)Z^2", "projection-identity", pr.annihilates_large);

    const auto w = TruncationWindow::prime(p, k);
    const auto v = op_v(p, w), vs = op_v_star(p, w), u = op_u(p, w);
    const auto inner = w.interior();
    rep.check("op_v_star = transpose(op_v) on interior", "adjoint-sum-formula",
              vs.equal_block(v.transpose(), inner, inner));
    rep.check("v* u = v on interior", "adjoint-sum-formula", (vs * u).equal_on(v, w.interior(p * p)));
    rep.check("op_u partial isometry on interior", "hecke-operator-formulas",
              (u.transpose() * u).equal_on(SparseOperator::identity(w.size()), w.interior(p * p)));

    const auto gen = compact_generation_check(p, 3);
    rep.check("matrix units from generators on prime(" + std::to_string(p) + ",3)", "compact-operators",
              gen.complete(), std::to_string(gen.units_reached) + "/" + std::to_string(gen.units_checked));
  }

  // pi_L pi_L' = pi_{L + L'} on the window of index <= 24.
  {
    const std::uint64_t b = 24;
    const auto w = TruncationWindow::global(b);
    // Every pi_L is a diagonal 0/1 matrix, so products reduce to entrywise ANDs.
    const auto diagonal = [&](const SparseOperator& op, std::vector<char>& d) {
      d.assign(w.size(), 0);
      for (std::size_t j = 0; j < w.size(); ++j) {
        if (op.truncated(j)) return false;
        for (const auto& [i, x] : op.column(j)) {
          if (i != j || x != 1) return false;
          d[j] = 1;
        }
      }
      return true;
    };
    std::vector<std::vector<char>> pis(w.size());
    bool ok = true;
    for (std::size_t i = 0; i < w.size(); ++i) ok = ok && diagonal(op_pi_L(w.at(i), w), pis[i]);
    std::size_t pairs = 0;
    std::map<Lattice, std::vector<char>> outside;
    for (std::size_t i = 0; i < w.size() && ok; ++i) {
      for (std::size_t j = i; j < w.size() && ok; ++j) {
        const Lattice s = lattice_sum(w.at(i), w.at(j));
        const auto pos = w.find(s);
        // Containment forces index growth, so a sum beyond the cap projects to zero.
        if (!pos && !outside.count(s)) {
          if (s.superlattice_index() > Int(static_cast<unsigned long>(w.bound())))
            outside[s].assign(w.size(), 0);
          else
            ok = diagonal(op_pi_L(s, w), outside[s]);
        }
        const auto& rhs = pos ? pis[*pos] : outside[s];
        for (std::size_t c = 0; c < w.size() && ok; ++c) ok = (pis[i][c] & pis[j][c]) == rhs[c];
        ++pairs;
      }
    }
    rep.check("pi_L pi_L' = pi_(L+L') for index <= 24", "projection-lattice-sum", ok, std::to_string(pairs) + " pairs");
  }

  // U_w intertwines pi and pi_w; w mod 8 on prime(2,3).
  {
    const auto w = TruncationWindow::prime(2, 3);
    const std::vector<IMat2> ws{IMat2{Int(1), Int(1), Int(0), Int(1)}, IMat2{Int(3), Int(0), Int(0), Int(1)},
                                IMat2{Int(0), Int(1), Int(1), Int(0)}, IMat2{Int(5), Int(2), Int(2), Int(1)},
                                IMat2{Int(1), Int(0), Int(4), Int(7)}};
    std::vector<HeckeElement> fs{HeckeElement::u(2), HeckeElement::v(2),
                                 HeckeElement::basis(DoubleCoset::make(Int(1), Int(4)), Rat(2)) + HeckeElement::v(2)};
    bool ok = true;
    for (const auto& m : ws) {
      const auto at = AdelicPoint::make(ModMat::reduce(m, 8));
      const auto uw = op_U(at, w);
      for (const auto& f : fs) {
        const auto lhs = uw * op_hecke(f, w) * uw.transpose();
        ok = ok && lhs == op_hecke(f, w, at);
      }
      const Lattice l0 = Lattice::from_basis(QMat2::diag(r(1, 2), r(1)));
      ok = ok && uw * op_pi_L(l0, w) * uw.transpose() == op_pi_L(l0, w, at);
    }
    rep.check("U_w pi(f) U_w* = pi_w(f) for 5 points mod 8", "symmetry-intertwiner", ok);
  }
  return rep;
}

// ---------------------------------------------------------------- tensor

SuiteReport tensor_suite(const RunConfig& cfg) {
  SuiteReport rep{"tensor", {}};
  for (auto p : cfg.primes) {
    const std::uint64_t b = std::max<std::uint64_t>(12, p * p);
    const auto t = tensor_factorization_check(p, b);
    for (const auto& [name, ok] : t.block_structure) {
      rep.check(name + " = local operator x 1 on global(" + std::to_string(b) + ")", "tensor-factorization", ok);
    }
  }
  for (std::size_t i = 0; i < cfg.primes.size(); ++i) {
    for (std::size_t j = i + 1; j < cfg.primes.size(); ++j) {
      const auto c = commutator_check(cfg.primes[i], cfg.primes[j], cfg.bound);
      rep.check("[v_" + std::to_string(cfg.primes[i]) + ", v_" + std::to_string(cfg.primes[j]) +
                    "] = 0 on interior of global(" + std::to_string(cfg.bound) + ")",
                "commuting-primes", c.vanishes, std::to_string(c.columns_checked) + " columns");
    }
  }
  return rep;
}

// ---------------------------------------------------------------- kms

SuiteReport kms_suite(const RunConfig& cfg) {
  SuiteReport rep{"kms", {}};
  const auto betas = betas_of(cfg);
  for (const auto& beta : betas) {
    const std::string bs = "beta=" + format_real(beta, 6);
    for (auto p : cfg.primes) {
      const std::string ps = "p=" + std::to_string(p);
      const auto part = partition_prime(p, beta, 30);
      numeric_row(rep, "local partition " + ps + " " + bs, "euler-factor", part.gap(), Real("1e-12"),
                  part.gap() < Real("1e-12") && part.consistent());

      const auto vsv = OpPoly::word(OpWord::parse("v* v"));
      const auto phi = phi_prime(vsv, p, beta, cfg.depth);
      const Real dev = abs(phi.value - (p + 1));
      numeric_row(rep, "phi(v*v) = p+1, " + ps + " " + bs, "regular-state-value", phi.value, phi.tail_bound,
                  dev < Real("1e-6") && dev <= phi.tail_bound, "deviation " + format_real(dev, 3));

      const auto one = phi_prime(OpPoly::word(OpWord{}), p, beta, cfg.depth);
      numeric_row(rep, "phi(1) = 1, " + ps + " " + bs, "normalization", one.value, one.tail_bound,
                  abs(one.value - 1) <= one.tail_bound);

      const std::vector<std::pair<std::string, std::string>> pairs{
          {"v", "v*"}, {"v*", "v"}, {"u", "u*"}, {"u*", "u"}, {"v v", "v* v*"}, {"u", "e0"}, {"e0", "e0"},
          {"c(1," + std::to_string(p * p) + ")", "c*(1," + std::to_string(p * p) + ")"}};
      for (const auto& [a, b] : pairs) {
        const auto res = kms_residual(OpPoly::word(OpWord::parse(a)), OpPoly::word(OpWord::parse(b)), p, beta,
                                      cfg.depth);
        numeric_row(rep, "KMS residual (" + a + ", " + b + ") " + ps + " " + bs, "kms-condition", res.residual,
                    res.bound, res.residual <= Real("1e-8") && res.within_bound());
      }
    }

    Real prev = 1;
    std::vector<std::uint64_t> fset;
    for (auto p : cfg.primes) {
      fset.push_back(p);
      const auto m = measure_cylinder(fset, beta);
      const Real step = prev * euler_factor_inverse(p, beta);
      const Real diff = abs(m.value - step);
      numeric_row(rep, "mu(Y_F) nested, |F|=" + std::to_string(fset.size()) + " " + bs, "cylinder-measure", m.value,
                  diff, diff < rounding_slack(), m.exact ? "exact " + m.exact->get_str() : "");
      prev = m.value;
    }

    if (beta > 2) {
      const auto g = partition_global(beta, 10'000);
      numeric_row(rep, "global partition certified, B=10^4 " + bs, "zeta-partition-function", g.gap(),
                  g.tail_bound + g.closed_form_error, g.consistent());
      const auto mass = total_orbit_mass(beta, 10'000);
      numeric_row(rep, "orbit masses, index <= 10^4 " + bs, "orbit-mass-total", mass.mass_sum, mass.tail_bound,
                  mass.lower >= 1 - Real("1e-3") && mass.lower <= 1 && 1 - mass.mass_sum <= mass.tail_bound,
                  "certified range [" + format_real(mass.lower, 12) + ", " + format_real(mass.upper, 12) + "]");
    } else {
      rep.add(ReportRow{"global partition " + bs, "zeta-partition-function", Status::skipped, std::nullopt,
                        std::nullopt, "uncertified: zeta(beta - 1) diverges for beta <= 2"});
    }
  }
  return rep;
}

}  // namespace heckepair
