#include "heckepair/kms.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

namespace heckepair {

namespace {

Real real_of(const Int& x) { return Real(x.get_str()); }
Real real_of(std::uint64_t x) { return Real(std::to_string(x)); }

void require_prime(std::uint64_t p) {
  if (!is_prime(p)) throw InvalidArgument("expected a prime, got " + std::to_string(p));
}

void require_convergent(const Real& beta) {
  if (beta <= 1) throw DivergenceError("the trace diverges for beta <= 1 (beta = " + format_real(beta) + ")");
}

/// (p/(p-1)) x^(k+1) / (1 - x), x = p^(1-beta): majorant of sum_{j>k} sigma1(p^j) p^(-beta j).
Real prime_tail(std::uint64_t p, const Real& beta, unsigned depth) {
  const Real pr = real_of(p);
  const Real x = boost::multiprecision::pow(pr, 1 - beta);
  return pr / (pr - 1) * boost::multiprecision::pow(x, static_cast<int>(depth + 1)) / (1 - x);
}

Int sigma1_of_prime_power(std::uint64_t p, unsigned j) {
  // Lattice enumeration for the first few, divisor formula beyond.
  if (j <= 4) return Int(static_cast<unsigned long>(superlattices(ipow(Int(p), j).get_ui()).size()));
  return (ipow(Int(p), j + 1) - 1) / Int(p - 1);
}

Certified zeta_product(const Real& beta, std::uint64_t terms) {
  const Certified z1 = zeta(beta, terms);
  const Certified z2 = zeta(beta - 1, terms);
  Certified z;
  z.value = z1.value * z2.value;
  z.error = abs(z1.value) * z2.error + abs(z2.value) * z1.error + z1.error * z2.error;
  return z;
}

}  // namespace

Real rounding_slack() {
  return boost::multiprecision::pow(Real(10), -static_cast<int>(precision()) + 10);
}

void set_precision(unsigned digits) {
  if (digits < 20) throw InvalidArgument("precision must be at least 20 digits");
  Real::default_precision(digits);
}

unsigned precision() { return Real::default_precision(); }

Real to_real(const Rat& x) { return real_of(x.get_num()) / real_of(x.get_den()); }

std::string format_real(const Real& x, int digits) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(digits) << x;
  return os.str();
}

Certified zeta(const Real& s, std::uint64_t terms) {
  if (s <= 1) throw DivergenceError("zeta(s) needs s > 1");
  if (terms == 0) throw InvalidArgument("zeta needs at least one term");
  Real sum = 0;
  for (std::uint64_t n = terms; n >= 1; --n) sum += boost::multiprecision::pow(real_of(n), -s);
  // sum_{n > N} n^-s lies between the integrals from N + 1 and from N.
  const Real lo = sum + boost::multiprecision::pow(real_of(terms + 1), 1 - s) / (s - 1);
  const Real hi = sum + boost::multiprecision::pow(real_of(terms), 1 - s) / (s - 1);
  return Certified{(lo + hi) / 2, (hi - lo) / 2 + rounding_slack()};
}

Real euler_factor_inverse(std::uint64_t p, const Real& beta) {
  require_prime(p);
  const Real pr = real_of(p);
  return (1 - boost::multiprecision::pow(pr, -beta)) * (1 - boost::multiprecision::pow(pr, 1 - beta));
}

Real effective_beta(const Real& beta, unsigned det_power) {
  if (det_power == 0) throw InvalidArgument("det power must be positive");
  return beta * det_power;
}

bool PartitionReport::consistent() const { return gap() <= tail_bound + closed_form_error + rounding_slack(); }

Real PartitionReport::gap() const { return abs(partial_sum - closed_form); }

PartitionReport partition_prime(std::uint64_t p, const Real& beta, unsigned depth) {
  require_prime(p);
  require_convergent(beta);
  PartitionReport r;
  r.beta = beta;
  r.p = p;
  r.truncation = depth;
  const Real pr = real_of(p);
  Real sum = 0;
  for (unsigned j = 0; j <= depth; ++j) {
    sum += real_of(sigma1_of_prime_power(p, j)) * boost::multiprecision::pow(pr, -beta * j);
  }
  r.partial_sum = sum;
  r.closed_form = 1 / euler_factor_inverse(p, beta);
  r.closed_form_error = 0;
  r.tail_bound = prime_tail(p, beta, depth) + rounding_slack();
  return r;
}

Rat partition_prime_exact(std::uint64_t p, unsigned beta, unsigned depth) {
  require_prime(p);
  if (beta <= 1) throw DivergenceError("the trace diverges for beta <= 1");
  Rat sum = 0;
  for (unsigned j = 0; j <= depth; ++j) {
    sum += make_rat(sigma1_of_prime_power(p, j), ipow(Int(p), beta * j));
  }
  return sum;
}

Real global_tail_bound(const Real& beta, std::uint64_t bound) {
  if (beta <= 2) throw CertificationError("the global tail majorant needs beta > 2");
  // sum_{ab > B} a^(1-beta) b^-beta, split at b = B.
  Real t = 0;
  for (std::uint64_t b = 1; b <= bound; ++b) {
    const Real a = real_of(bound / b);
    t += boost::multiprecision::pow(real_of(b), -beta) * boost::multiprecision::pow(a, 2 - beta) / (beta - 2);
  }
  const Real zeta_upper = (beta - 1) / (beta - 2);  // zeta(s) <= s / (s - 1)
  t += zeta_upper * boost::multiprecision::pow(real_of(bound), 1 - beta) / (beta - 1);
  return t + rounding_slack();
}

PartitionReport partition_global(const Real& beta, std::uint64_t bound, std::uint64_t zeta_terms) {
  require_convergent(beta);
  if (beta <= 2) {
    throw CertificationError("zeta(beta - 1) diverges for beta <= 2; the global partition function is infinite");
  }
  if (bound == 0) throw InvalidArgument("partition bound must be positive");
  PartitionReport r;
  r.beta = beta;
  r.p = 0;
  r.truncation = bound;
  Real sum = 0;
  for (std::uint64_t n = bound; n >= 1; --n) {
    sum += real_of(sigma1(n)) * boost::multiprecision::pow(real_of(n), -beta);
  }
  r.partial_sum = sum;
  const Certified z = zeta_product(beta, zeta_terms);
  r.closed_form = z.value;
  r.closed_form_error = z.error;
  r.tail_bound = global_tail_bound(beta, bound);
  return r;
}

// ---------------------------------------------------------------- words

Letter Letter::star() const {
  switch (kind) {
    case Kind::v: return {Kind::v_star, dc};
    case Kind::v_star: return {Kind::v, dc};
    case Kind::u: return {Kind::u_star, dc};
    case Kind::u_star: return {Kind::u, dc};
    case Kind::e0: return *this;
    case Kind::coset: return {Kind::coset_star, dc};
    case Kind::coset_star: return {Kind::coset, dc};
  }
  return *this;
}

Rat Letter::degree(std::uint64_t p) const {
  const Rat q(Int(static_cast<unsigned long>(p)));
  switch (kind) {
    case Kind::v: return q;
    case Kind::v_star: return 1 / q;
    case Kind::u: return q * q;
    case Kind::u_star: return 1 / (q * q);
    case Kind::e0: return Rat(1);
    case Kind::coset: return Rat(dc.det());
    case Kind::coset_star: return make_rat(Int(1), dc.det());
  }
  return Rat(1);
}

Int Letter::column_norm(std::uint64_t p) const {
  switch (kind) {
    case Kind::v:
    case Kind::v_star: return Int(static_cast<unsigned long>(p + 1));
    case Kind::coset:
    case Kind::coset_star: return right_coset_count(dc);
    default: return Int(1);
  }
}

std::string Letter::to_string() const {
  switch (kind) {
    case Kind::v: return "v";
    case Kind::v_star: return "v*";
    case Kind::u: return "u";
    case Kind::u_star: return "u*";
    case Kind::e0: return "e0";
    case Kind::coset: return "c" + dc.to_string();
    case Kind::coset_star: return "c*" + dc.to_string();
  }
  return "?";
}

OpWord OpWord::parse(const std::string& s) {
  OpWord w;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) {
    using K = Letter::Kind;
    if (tok == "1") continue;
    if (tok == "v") w.letters.push_back({K::v, {}});
    else if (tok == "v*") w.letters.push_back({K::v_star, {}});
    else if (tok == "u") w.letters.push_back({K::u, {}});
    else if (tok == "u*") w.letters.push_back({K::u_star, {}});
    else if (tok == "e0") w.letters.push_back({K::e0, {}});
    else if (tok.starts_with("c(") || tok.starts_with("c*(")) {
      const bool star = tok[1] == '*';
      const auto open = tok.find('('), comma = tok.find(','), close = tok.find(')');
      if (comma == std::string::npos || close == std::string::npos) throw InvalidArgument("bad coset letter: " + tok);
      const Int d1(tok.substr(open + 1, comma - open - 1));
      const Int d2(tok.substr(comma + 1, close - comma - 1));
      w.letters.push_back({star ? K::coset_star : K::coset, DoubleCoset::make(d1, d2)});
    } else {
      throw InvalidArgument("unknown generator: " + tok);
    }
  }
  return w;
}

OpWord OpWord::operator*(const OpWord& o) const {
  OpWord r = *this;
  r.letters.insert(r.letters.end(), o.letters.begin(), o.letters.end());
  return r;
}

OpWord OpWord::star() const {
  OpWord r;
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) r.letters.push_back(it->star());
  return r;
}

Rat OpWord::degree(std::uint64_t p) const {
  Rat d(1);
  for (const auto& l : letters) d *= l.degree(p);
  return d;
}

Int OpWord::column_norm(std::uint64_t p) const {
  Int n(1);
  for (const auto& l : letters) n *= l.column_norm(p);
  return n;
}

std::string OpWord::to_string() const {
  if (letters.empty()) return "1";
  std::string s;
  for (const auto& l : letters) s += (s.empty() ? "" : " ") + l.to_string();
  return s;
}

OpPoly OpPoly::word(const OpWord& w, const Rat& c) { return OpPoly{{{c, w}}}; }

OpPoly OpPoly::hecke(const HeckeElement& f, std::uint64_t p) {
  require_prime(p);
  OpPoly r;
  for (const auto& [dc, c] : f.terms()) {
    if (prime_restrict(HeckeElement::basis(dc), p).is_zero()) {
      throw InvalidArgument("class " + dc.to_string() + " is not supported at p = " + std::to_string(p));
    }
    OpWord w;
    if (dc != DoubleCoset::identity()) w.letters.push_back({Letter::Kind::coset, dc});
    r.terms.emplace_back(c, w);
  }
  return r;
}

OpPoly OpPoly::operator*(const OpPoly& o) const {
  OpPoly r;
  for (const auto& [c1, w1] : terms)
    for (const auto& [c2, w2] : o.terms) r.terms.emplace_back(c1 * c2, w1 * w2);
  return r;
}

OpPoly OpPoly::operator+(const OpPoly& o) const {
  OpPoly r = *this;
  r.terms.insert(r.terms.end(), o.terms.begin(), o.terms.end());
  return r;
}

OpPoly OpPoly::star() const {
  OpPoly r;
  for (const auto& [c, w] : terms) r.terms.emplace_back(c, w.star());
  return r;
}

Rat OpPoly::homogeneous_degree(std::uint64_t p) const {
  if (terms.empty()) return Rat(1);
  const Rat d = terms.front().second.degree(p);
  for (const auto& [c, w] : terms) {
    if (w.degree(p) != d) throw NotHomogeneousError("element mixes determinant degrees");
  }
  return d;
}

Rat OpPoly::column_norm(std::uint64_t p) const {
  Rat n(0);
  for (const auto& [c, w] : terms) n += abs(c) * Rat(w.column_norm(p));
  return n;
}

LatticeVector apply_letter(const Letter& l, std::uint64_t p, const LatticeVector& x) {
  using K = Letter::Kind;
  LatticeVector out;
  const auto put = [&](Lattice m, const Rat& c) {
    auto [it, fresh] = out.emplace(std::move(m), c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) out.erase(it);
    }
  };
  const Rat pr(Int(static_cast<unsigned long>(p)));
  for (const auto& [lat, c] : x) {
    switch (l.kind) {
      case K::v:
        for (auto& m : superlattices_of(lat, p)) put(std::move(m), c);
        break;
      case K::v_star:
        for (auto& m : sublattices_containing_standard(lat, p)) put(std::move(m), c);
        break;
      case K::u:
        put(act(QMat2::diag(1 / pr, 1 / pr), lat), c);
        break;
      case K::u_star: {
        Lattice m = act(QMat2::diag(pr, pr), lat);
        if (m.contains_standard()) put(std::move(m), c);
        break;
      }
      case K::e0:
        if (lat == Lattice()) put(lat, c);
        break;
      case K::coset: {
        const QMat2 s = to_rational(lat.coset_matrix());
        for (auto& m : superlattices_of(lat, l.dc.det().get_ui())) {
          const auto [d1, d2] = quotient_type(act(s, m));
          if (d1 == l.dc.d1 && d2 == l.dc.d2) put(std::move(m), c);
        }
        break;
      }
      case K::coset_star:
        for (auto& m : sublattices_containing_standard(lat, l.dc.det().get_ui())) {
          const auto [d1, d2] = quotient_type(act(to_rational(m.coset_matrix()), lat));
          if (d1 == l.dc.d1 && d2 == l.dc.d2) put(std::move(m), c);
        }
        break;
    }
  }
  return out;
}

LatticeVector apply_word(const OpWord& w, std::uint64_t p, const LatticeVector& x) {
  LatticeVector y = x;
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) y = apply_letter(*it, p, y);
  return y;
}

Lattice type_representative(std::uint64_t p, unsigned a, unsigned b) {
  if (a > b) throw InvalidArgument("type needs a <= b");
  const Int pa = ipow(Int(p), a), pb = ipow(Int(p), b);
  return Lattice::from_basis(QMat2::diag(make_rat(Int(1), pa), make_rat(Int(1), pb)));
}

Int type_count(std::uint64_t p, unsigned a, unsigned b) {
  if (a > b) throw InvalidArgument("type needs a <= b");
  const unsigned n = b - a;
  if (n == 0) return Int(1);
  return ipow(Int(p), n) + ipow(Int(p), n - 1);
}

namespace {

Rat diagonal_entry(const OpPoly& a, std::uint64_t p, const Lattice& l) {
  Rat d(0);
  for (const auto& [c, w] : a.terms) {
    const auto y = apply_word(w, p, LatticeVector{{l, Rat(1)}});
    if (auto it = y.find(l); it != y.end()) d += c * it->second;
  }
  return d;
}

StateValue finish_prime(const Real& sum, const OpPoly& a, std::uint64_t p, const Real& beta, unsigned depth) {
  const Real e = euler_factor_inverse(p, beta);
  StateValue s;
  s.value = e * sum;
  s.tail_bound = to_real(a.column_norm(p)) * e * prime_tail(p, beta, depth) + rounding_slack();
  return s;
}

}  // namespace

StateValue phi_prime(const OpPoly& a, std::uint64_t p, const Real& beta, unsigned depth) {
  require_prime(p);
  require_convergent(beta);
  const Real pr = real_of(p);
  Real sum = 0;
  for (unsigned j = 0; j <= depth; ++j) {
    const Real weight = boost::multiprecision::pow(pr, -beta * j);
    for (unsigned x = 0; 2 * x <= j; ++x) {
      const Rat d = diagonal_entry(a, p, type_representative(p, x, j - x));
      if (d != 0) sum += real_of(type_count(p, x, j - x)) * to_real(d) * weight;
    }
  }
  return finish_prime(sum, a, p, beta, depth);
}

StateValue phi_prime_enumerated(const OpPoly& a, std::uint64_t p, const Real& beta, unsigned depth) {
  require_prime(p);
  require_convergent(beta);
  const auto w = TruncationWindow::prime(p, depth);
  Real sum = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Rat d = diagonal_entry(a, p, w.at(i));
    if (d != 0) sum += to_real(d) * boost::multiprecision::pow(real_of(w.index(i)), -beta);
  }
  return finish_prime(sum, a, p, beta, depth);
}

Rat trace_prime_exact(const OpPoly& a, std::uint64_t p, unsigned beta, unsigned depth) {
  require_prime(p);
  Rat sum(0);
  for (unsigned j = 0; j <= depth; ++j) {
    const Int weight = ipow(Int(p), beta * j);
    for (unsigned x = 0; 2 * x <= j; ++x) {
      const Rat d = diagonal_entry(a, p, type_representative(p, x, j - x));
      sum += Rat(type_count(p, x, j - x)) * d / Rat(weight);
    }
  }
  return sum;
}

StateValue phi_window(const SparseOperator& op, const TruncationWindow& w, const Real& beta, const Rat& norm) {
  require_convergent(beta);
  if (op.dim() != w.size()) throw InvalidArgument("operator does not live on this window");
  Real sum = 0, uncertain = 0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const Real weight = boost::multiprecision::pow(real_of(w.index(j)), -beta);
    if (op.truncated(j)) {
      uncertain += weight;
    } else if (const Rat d = op.entry(j, j); d != 0) {
      sum += to_real(d) * weight;
    }
  }
  const Real c = to_real(norm);
  StateValue s;
  if (w.mode() == TruncationWindow::Mode::prime) {
    const Real e = euler_factor_inverse(w.p(), beta);
    s.value = e * sum;
    s.tail_bound = c * e * (prime_tail(w.p(), beta, w.depth()) + uncertain) + rounding_slack();
    return s;
  }
  if (beta <= 2) throw CertificationError("global normalization needs beta > 2");
  const Certified z = zeta_product(beta, kDefaultZetaTerms);
  const Real zlo = z.value - z.error;
  s.value = sum / z.value;
  s.tail_bound = c * (global_tail_bound(beta, w.bound()) + uncertain) / zlo + abs(sum) * z.error / (zlo * z.value) +
                 rounding_slack();
  return s;
}

KmsResidual kms_residual(const OpPoly& a, const OpPoly& b, std::uint64_t p, const Real& beta, unsigned depth) {
  const Rat deg = a.homogeneous_degree(p);
  b.homogeneous_degree(p);
  const StateValue ab = phi_prime(a * b, p, beta, depth);
  const StateValue ba = phi_prime(b * a, p, beta, depth);
  const Real scale = boost::multiprecision::pow(to_real(deg), -beta);
  KmsResidual r;
  r.lhs = ab.value;
  r.rhs = scale * ba.value;
  r.residual = abs(r.lhs - r.rhs);
  r.bound = ab.tail_bound + scale * ba.tail_bound;
  return r;
}

// ---------------------------------------------------------------- measure

DirichletPoly DirichletPoly::one() { return DirichletPoly{{{1, Int(1)}}}; }

DirichletPoly DirichletPoly::operator*(const DirichletPoly& o) const {
  DirichletPoly r;
  for (const auto& [n, c] : coeffs) {
    for (const auto& [m, d] : o.coeffs) {
      if (n > UINT64_MAX / m) throw SizeCapError("Dirichlet polynomial index overflow");
      Int& slot = r.coeffs[n * m];
      slot += c * d;
      if (slot == 0) r.coeffs.erase(n * m);
    }
  }
  return r;
}

Real DirichletPoly::evaluate(const Real& beta) const {
  Real s = 0;
  for (const auto& [n, c] : coeffs) s += real_of(c) * boost::multiprecision::pow(real_of(n), -beta);
  return s;
}

Rat DirichletPoly::evaluate_exact(unsigned beta) const {
  Rat s(0);
  for (const auto& [n, c] : coeffs) s += make_rat(c, ipow(Int(static_cast<unsigned long>(n)), beta));
  return s;
}

std::string DirichletPoly::to_string() const {
  std::string s;
  for (const auto& [n, c] : coeffs) s += (s.empty() ? "" : " + ") + c.get_str() + "*" + std::to_string(n) + "^-s";
  return s;
}

MeasureValue measure_cylinder(const std::vector<std::uint64_t>& primes, const Real& beta) {
  require_convergent(beta);
  std::set<std::uint64_t> seen;
  DirichletPoly poly = DirichletPoly::one();
  for (auto p : primes) {
    require_prime(p);
    if (!seen.insert(p).second) throw InvalidArgument("prime listed twice: " + std::to_string(p));
    // (1 - p^-s)(1 - p p^-s) = 1 - (p + 1) p^-s + p p^-2s
    DirichletPoly f;
    f.coeffs[1] = 1;
    f.coeffs[p] = -Int(static_cast<unsigned long>(p + 1));
    f.coeffs[p * p] = Int(static_cast<unsigned long>(p));
    poly = poly * f;
  }
  MeasureValue m{poly, poly.evaluate(beta), std::nullopt};
  if (beta == boost::multiprecision::floor(beta) && beta < 64) {
    m.exact = poly.evaluate_exact(beta.convert_to<unsigned>());
  }
  return m;
}

Certified mu_orbit_mass(const IMat2& s, const Real& beta, std::uint64_t zeta_terms) {
  if (s.det() <= 0) throw InvalidArgument("orbit mass needs det(s) > 0");
  if (beta <= 2) throw CertificationError("orbit masses are certified only for beta > 2");
  const Certified z = zeta_product(beta, zeta_terms);
  const Real d = boost::multiprecision::pow(real_of(s.det()), -beta);
  const Real zlo = z.value - z.error;
  return Certified{d / z.value, d * z.error / (zlo * z.value) + rounding_slack()};
}

MassReport total_orbit_mass(const Real& beta, std::uint64_t bound, std::uint64_t zeta_terms) {
  const PartitionReport r = partition_global(beta, bound, zeta_terms);
  const Real zlo = r.closed_form - r.closed_form_error;
  const Real zhi = r.closed_form + r.closed_form_error;
  MassReport m;
  m.mass_sum = r.partial_sum / r.closed_form;
  m.lower = r.partial_sum / zhi - rounding_slack();
  m.upper = r.partial_sum / zlo + rounding_slack();
  m.tail_bound = r.tail_bound / zlo;
  return m;
}

}  // namespace heckepair
