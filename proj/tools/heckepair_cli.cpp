// heckepair: command-line driver for lattice enumeration, operator emission,
// Hecke products, partition functions and the verification suites.
//
// Exit codes: 0 pass, 1 assertion failure, 2 configuration error.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "heckepair/coset.hpp"
#include "heckepair/hecke.hpp"
#include "heckepair/kms.hpp"
#include "heckepair/report.hpp"
#include "heckepair/spectral.hpp"

using namespace heckepair;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "heckepair 1.0.0";

constexpr unsigned kMaxDepth = 400;
constexpr std::uint64_t kMaxBound = 1'000'000;

struct Options {
  RunConfig cfg;
  std::string primes = "2,3";
  std::string betas = "3";
  std::optional<std::uint64_t> p;
  std::optional<std::uint64_t> n;
  std::string range;
  std::string check;
  std::string op = "v";
  std::string window = "prime";
  std::string lhs = "1,2";
  std::string rhs = "1,2";
  std::string out;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

std::uint64_t parse_u64(const std::string& s) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: " + s);
  }
  if (used != s.size()) throw ConfigError("not a number: " + s);
  return v;
}

/// Fills the run config from the raw options and validates the caps.
void finalize(Options& o, const std::string& command) {
  auto& c = o.cfg;
  c.command = command;
  c.primes.clear();
  if (o.p) {
    c.primes.push_back(*o.p);
  } else {
    for (const auto& s : split(o.primes, ',')) c.primes.push_back(parse_u64(s));
  }
  for (auto p : c.primes)
    if (!is_prime(p)) throw ConfigError("not a prime: " + std::to_string(p));
  c.betas = split(o.betas, ',');
  if (c.betas.empty()) throw ConfigError("at least one beta is required");
  if (c.depth > kMaxDepth) throw ConfigError("depth exceeds cap " + std::to_string(kMaxDepth));
  if (c.bound == 0 || c.bound > kMaxBound) throw ConfigError("bound must lie in [1, " + std::to_string(kMaxBound) + "]");
  if (c.k < 1 || c.k > 12) throw ConfigError("k must lie in [1, 12]");
  if (c.precision < 20 || c.precision > 2000) throw ConfigError("precision must lie in [20, 2000]");
  if (c.format != "json" && c.format != "csv" && c.format != "text") throw ConfigError("unknown format " + c.format);
  if (c.det_power < 1 || c.det_power > 2) throw ConfigError("det power must be 1 or 2");
  set_precision(c.precision);
}

void emit(const Options& o, const std::string& body) {
  if (o.out.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + o.out);
  f << body;
}

std::string lattice_json_name(const Lattice& l) { return l.to_string(); }

// Integers go out as JSON numbers when they fit, otherwise as decimal strings.
json int_json(const Int& x) {
  if (x.fits_slong_p()) return x.get_si();
  return x.get_str();
}

json lattice_row(const Lattice& l) {
  const auto [d1, d2] = quotient_type(l);
  json j;
  j["index"] = int_json(l.superlattice_index());
  j["q"] = int_json(l.q());
  j["hnf"] = {int_json(l.hnf().a()), int_json(l.hnf().c()), int_json(l.hnf().d())};
  j["type"] = {int_json(d1), int_json(d2)};
  return j;
}

// ---------------------------------------------------------------- lattices

int cmd_lattices(const Options& o) {
  std::uint64_t lo = 1, hi = 1;
  if (o.n) {
    lo = hi = *o.n;
  } else if (!o.range.empty()) {
    const auto dots = o.range.find("..");
    if (dots == std::string::npos) throw ConfigError("range must look like a..b");
    lo = parse_u64(o.range.substr(0, dots));
    hi = parse_u64(o.range.substr(dots + 2));
  } else {
    throw ConfigError("lattices needs --n or --range");
  }
  if (lo == 0 || hi < lo || hi > 10'000) throw ConfigError("range must satisfy 1 <= a <= b <= 10000");
  if (!o.check.empty() && o.check != "sigma") throw ConfigError("unknown check: " + o.check);

  bool ok = true;
  json rows = json::array();
  json checks = json::array();
  std::ostringstream text;
  for (std::uint64_t n = lo; n <= hi; ++n) {
    const auto ls = superlattices(n);
    if (o.check == "sigma") {
      const bool pass = ls.size() == sigma1(n);
      ok = ok && pass;
      checks.push_back({{"n", n}, {"count", ls.size()}, {"sigma1", sigma1(n)}, {"status", pass ? "pass" : "fail"}});
      text << "n=" << n << " count=" << ls.size() << " sigma1=" << sigma1(n) << (pass ? " pass" : " FAIL") << '\n';
    }
    if (o.n || o.check.empty()) {
      for (const auto& l : ls) {
        rows.push_back(lattice_row(l));
        const auto [d1, d2] = quotient_type(l);
        text << n << ',' << l.q() << ',' << l.hnf().a() << ',' << l.hnf().c() << ',' << l.hnf().d() << ',' << d1
             << ',' << d2 << '\n';
      }
    }
  }
  if (o.cfg.format == "json") {
    json j;
    j["schema"] = kSchemaVersion;
    j["command"] = "lattices";
    j["seed"] = o.cfg.seed;
    j["rows"] = rows;
    if (!checks.empty()) j["checks"] = checks;
    j["passed"] = ok;
    emit(o, j.dump(2) + "\n");
  } else {
    emit(o, (o.cfg.format == "csv" && o.check.empty() ? "index,q,a,c,d,d1,d2\n" : "") + text.str());
  }
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const Options& o, const std::string& suite) {
  const auto rep = run_suite(suite, o.cfg);
  emit(o, render(rep, o.cfg));
  return rep.passed() ? 0 : 1;
}

// ---------------------------------------------------------------- op-matrix

TruncationWindow make_window(const Options& o) {
  if (o.window == "prime") {
    if (o.cfg.primes.size() != 1) throw ConfigError("prime windows need exactly one prime (--p)");
    return TruncationWindow::prime(o.cfg.primes.front(), o.cfg.k);
  }
  if (o.window == "global") {
    if (o.cfg.bound > 2000) throw ConfigError("global operator windows are capped at bound 2000");
    return TruncationWindow::global(o.cfg.bound);
  }
  throw ConfigError("unknown window: " + o.window);
}

SparseOperator make_operator(const std::string& name, std::uint64_t p, const TruncationWindow& w) {
  if (name == "v") return op_v(p, w);
  if (name == "v*") return op_v_star(p, w);
  if (name == "u") return op_u(p, w);
  if (name == "u*") return op_u_star(p, w);
  if (name == "H") return op_H(w);
  if (name == "e0") return op_e_L(Lattice(), p, w);
  throw ConfigError("unknown operator: " + name);
}

json manifest(const TruncationWindow& w) {
  json b = json::array();
  for (std::size_t i = 0; i < w.size(); ++i) {
    json row = lattice_row(w.at(i));
    row["position"] = i;
    b.push_back(std::move(row));
  }
  return b;
}

json operator_json(const std::string& name, const SparseOperator& op, const TruncationWindow& w) {
  json j;
  j["schema"] = kSchemaVersion;
  j["operator"] = name;
  j["window"] = w.describe();
  j["dimension"] = w.size();
  j["basis"] = manifest(w);
  json trip = json::array();
  for (const auto& t : op.triplets()) trip.push_back({t.row, t.col, t.value.get_str()});
  j["triplets"] = std::move(trip);
  json trunc = json::array();
  for (std::size_t c = 0; c < op.dim(); ++c)
    if (op.truncated(c)) trunc.push_back(c);
  j["truncated_columns"] = std::move(trunc);
  return j;
}

std::string operator_csv(const SparseOperator& op, const TruncationWindow& w) {
  std::ostringstream os;
  for (std::size_t i = 0; i < w.size(); ++i) os << "# basis " << i << ' ' << lattice_json_name(w.at(i)) << '\n';
  os << "row,col,value\n";
  for (const auto& t : op.triplets()) os << t.row << ',' << t.col << ',' << t.value.get_str() << '\n';
  return os.str();
}

int cmd_op_matrix(const Options& o) {
  const auto w = make_window(o);
  const std::uint64_t p = o.cfg.primes.empty() ? 2 : o.cfg.primes.front();
  const auto op = make_operator(o.op, p, w);
  if (o.cfg.format == "json") {
    json j = operator_json(o.op, op, w);
    j["seed"] = o.cfg.seed;
    emit(o, j.dump(2) + "\n");
  } else {
    emit(o, operator_csv(op, w));
  }
  return 0;
}

// ---------------------------------------------------------------- hecke-mul

HeckeElement parse_element(const std::string& s) {
  // "1,2" or "2:1,2;1:1,4" (coefficient:class terms separated by ';').
  HeckeElement f;
  for (const auto& term : split(s, ';')) {
    Rat c(1);
    std::string cls = term;
    if (auto colon = term.find(':'); colon != std::string::npos) {
      try {
        c = Rat(term.substr(0, colon));
        c.canonicalize();
      } catch (const std::exception&) {
        throw ConfigError("bad coefficient in " + term);
      }
      cls = term.substr(colon + 1);
    }
    const auto parts = split(cls, ',');
    if (parts.size() != 2) throw ConfigError("class must be d1,d2: " + cls);
    f.add(DoubleCoset::make(Int(parse_u64(parts[0])), Int(parse_u64(parts[1]))), c);
  }
  return f;
}

json element_json(const HeckeElement& f) {
  json a = json::array();
  for (const auto& [dc, c] : f.terms())
    a.push_back({{"class", {dc.d1.get_str(), dc.d2.get_str()}}, {"coeff", c.get_str()}});
  return a;
}

int cmd_hecke_mul(const Options& o) {
  const auto a = parse_element(o.lhs), b = parse_element(o.rhs);
  const auto prod = convolve(a, b);
  const bool agree = convolve_by_products(a, b) == prod;
  if (o.cfg.format == "json") {
    json j;
    j["schema"] = kSchemaVersion;
    j["seed"] = o.cfg.seed;
    j["lhs"] = element_json(a);
    j["rhs"] = element_json(b);
    j["products"] = element_json(prod);
    j["cross_check"] = agree ? "pass" : "fail";
    emit(o, j.dump(2) + "\n");
  } else {
    std::ostringstream os;
    if (o.cfg.format == "csv") os << "d1,d2,coeff\n";
    for (const auto& [dc, c] : prod.terms()) os << dc.d1 << ',' << dc.d2 << ',' << c.get_str() << '\n';
    emit(o, os.str());
  }
  return agree ? 0 : 1;
}

// ---------------------------------------------------------------- partition

int cmd_partition(const Options& o) {
  json rows = json::array();
  std::ostringstream csv, text;
  csv << "kind,p,beta,truncation,partial_sum,closed_form,gap,tail_bound,certified\n";
  bool ok = true;
  const auto add = [&](const PartitionReport& r, bool certified) {
    const bool good = r.consistent();
    ok = ok && good;
    const std::string kind = r.p == 0 ? "global" : "prime";
    rows.push_back({{"kind", kind},
                    {"p", r.p},
                    {"beta", format_real(r.beta)},
                    {"truncation", r.truncation},
                    {"partial_sum", format_real(r.partial_sum)},
                    {"closed_form", format_real(r.closed_form)},
                    {"closed_form_error", format_real(r.closed_form_error)},
                    {"gap", format_real(r.gap())},
                    {"tail_bound", format_real(r.tail_bound)},
                    {"certified", certified},
                    {"status", good ? "pass" : "fail"}});
    csv << kind << ',' << r.p << ',' << format_real(r.beta) << ',' << r.truncation << ','
        << format_real(r.partial_sum) << ',' << format_real(r.closed_form) << ',' << format_real(r.gap()) << ','
        << format_real(r.tail_bound) << ',' << (certified ? "yes" : "no") << '\n';
    text << '[' << (good ? "pass" : "fail") << "] " << kind << (r.p ? " p=" + std::to_string(r.p) : std::string())
         << " beta=" << format_real(r.beta, 6) << " truncation=" << r.truncation
         << ": partial " << format_real(r.partial_sum, 15) << ", closed " << format_real(r.closed_form, 15)
         << ", gap " << format_real(r.gap(), 6) << " <= " << format_real(r.tail_bound, 6) << '\n';
  };
  for (const auto& b : o.cfg.betas) {
    const Real beta = effective_beta(Real(b), o.cfg.det_power);
    for (auto p : o.cfg.primes) add(partition_prime(p, beta, o.cfg.depth), true);
    if (beta > 2) add(partition_global(beta, o.cfg.bound), true);
  }
  if (o.cfg.format == "json") {
    json j;
    j["schema"] = kSchemaVersion;
    j["seed"] = o.cfg.seed;
    j["config"] = o.cfg.echo();
    j["rows"] = rows;
    j["passed"] = ok;
    emit(o, j.dump(2) + "\n");
  } else {
    emit(o, o.cfg.format == "csv" ? csv.str() : text.str());
  }
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------- bundle

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << body;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

int cmd_bundle(const Options& o) {
  if (o.out.empty()) throw ConfigError("bundle needs --out");
  const std::filesystem::path dir(o.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

  json summary;
  summary["schema"] = kSchemaVersion;
  summary["version"] = kVersion;
  summary["seed"] = o.cfg.seed;
  summary["config"] = o.cfg.echo();
  json suites = json::array();
  bool ok = true;
  if (!o.cfg.primes.empty()) {
    for (const auto& name : suite_names()) {
      const auto rep = run_suite(name, o.cfg);
      write_file(dir / (name + ".json"), to_json(rep, o.cfg).dump(2) + "\n");
      suites.push_back({{"suite", name}, {"passed", rep.passed()}, {"file", name + ".json"}});
      ok = ok && rep.passed();
    }
    for (auto p : o.cfg.primes) {
      const auto w = TruncationWindow::prime(p, std::min(o.cfg.k, 4u));
      for (const std::string op : {"v", "v*", "u", "u*"}) {
        const std::string tag = op == "v*" ? "v_star" : (op == "u*" ? "u_star" : op);
        write_file(dir / ("op_" + tag + "_p" + std::to_string(p) + ".json"),
                   operator_json(op, make_operator(op, p, w), w).dump(2) + "\n");
      }
    }
    json part = json::array();
    for (const auto& b : o.cfg.betas) {
      const Real beta = effective_beta(Real(b), o.cfg.det_power);
      for (auto p : o.cfg.primes) {
        const auto r = partition_prime(p, beta, 30);
        part.push_back({{"p", p}, {"beta", b}, {"partial_sum", format_real(r.partial_sum)},
                        {"closed_form", format_real(r.closed_form)}, {"tail_bound", format_real(r.tail_bound)}});
      }
    }
    write_file(dir / "partition.json", part.dump(2) + "\n");
  }
  summary["suites"] = suites;
  summary["passed"] = ok;
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact computations with the Hecke pair (M2(Q) x| GL2+(Q), M2(Z) x| SL2(Z))"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Options o;
  const auto common = [&](CLI::App* sub) {
    sub->add_option("--primes", o.primes, "comma-separated primes");
    sub->add_option("--p", o.p, "single prime (overrides --primes)");
    sub->add_option("--beta", o.betas, "comma-separated inverse temperatures");
    sub->add_option("--depth", o.cfg.depth, "p-power depth for traces");
    sub->add_option("--bound", o.cfg.bound, "index bound B");
    sub->add_option("--k", o.cfg.k, "prime window depth");
    sub->add_option("--precision", o.cfg.precision, "decimal digits");
    sub->add_option("--format", o.cfg.format, "json, csv or text");
    sub->add_option("--seed", o.cfg.seed, "seed for randomized checks");
    sub->add_option("--det-power", o.cfg.det_power, "1 for det^{it}, 2 for det^{2it}");
    sub->add_option("--modcap", o.cfg.modcap, "largest finite quotient modulus");
    sub->add_option("--out", o.out, "output file (directory for bundle)");
  };

  auto* lat = app.add_subcommand("lattices", "enumerate lattices containing Z^2");
  common(lat);
  lat->add_option("--n", o.n, "index");
  lat->add_option("--range", o.range, "index range a..b");
  lat->add_option("--check", o.check, "cross-check (sigma)");

  std::string suite;
  auto* ver = app.add_subcommand("verify", "run a verification suite");
  common(ver);
  ver->add_option("suite", suite, "pair, hecke, projection, tensor or kms")->required();

  auto* opm = app.add_subcommand("op-matrix", "emit an operator as coordinate triplets");
  common(opm);
  opm->add_option("--op", o.op, "v, v*, u, u*, H or e0");
  opm->add_option("--window", o.window, "prime or global");

  auto* hm = app.add_subcommand("hecke-mul", "structure constants of a Hecke product");
  common(hm);
  hm->add_option("--lhs", o.lhs, "element, e.g. 1,2 or 2:1,2;1:1,4");
  hm->add_option("--rhs", o.rhs, "element");

  auto* part = app.add_subcommand("partition", "partition functions with tail bounds");
  common(part);
  auto* kv = app.add_subcommand("kms-verify", "KMS state values and residuals");
  common(kv);
  auto* pv = app.add_subcommand("pair-verify", "R, L and Delta for the semidirect pair");
  common(pv);
  auto* bun = app.add_subcommand("bundle", "write every report into a directory");
  common(bun);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    finalize(o, sub->get_name());
    if (sub == lat) return cmd_lattices(o);
    if (sub == ver) return cmd_verify(o, suite);
    if (sub == opm) return cmd_op_matrix(o);
    if (sub == hm) return cmd_hecke_mul(o);
    if (sub == part) return cmd_partition(o);
    if (sub == kv) return cmd_verify(o, "kms");
    if (sub == pv) return cmd_verify(o, "pair");
    if (sub == bun) return cmd_bundle(o);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const CertificationError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const DivergenceError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const SizeCapError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
