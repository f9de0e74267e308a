#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(HECKEPAIR_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* f = popen(cmd.c_str(), "r");
  REQUIRE(f != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), f)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(f);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::size_t lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("heckepair_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("lattices listing") {
    const auto four = run("lattices --n 4 --format csv");
    CHECK(four.code == 0);
    CHECK(lines(four.out) == 1 + 7);
    const auto one = run("lattices --n 1 --format csv");
    CHECK(one.code == 0);
    CHECK(lines(one.out) == 1 + 1);
    const auto j = nlohmann::json::parse(run("lattices --n 4").out);
    CHECK(j["schema"] == 1);
    CHECK(j["rows"].size() == 7);
    CHECK(j["rows"][0]["q"].is_number_integer());
    CHECK(j["rows"][0]["hnf"].size() == 3);
    CHECK(run("lattices --range 1..20 --check sigma").code == 0);
  }

  TEST_CASE("verification suites") {
    CHECK(run("verify projection --p 2 --k 4").code == 0);
    const auto kms = run("verify kms --beta 3 --p 2 --depth 40");
    CHECK(kms.code == 0);
    const auto j = nlohmann::json::parse(kms.out);
    CHECK(j["schema"] == 1);
    CHECK(j["seed"] == 1);
    bool found = false;
    for (const auto& row : j["rows"]) {
      CHECK(row.contains("anchor"));
      if (row["anchor"] == "regular-state-value") {
        found = true;
        CHECK(std::abs(std::stod(row["value"].get<std::string>()) - 3.0) < 1e-6);
      }
    }
    CHECK(found);

    const auto pair = run("verify pair --modcap 6");
    CHECK(pair.code == 0);
    for (const auto& row : nlohmann::json::parse(pair.out)["rows"])
      if (row["anchor"] == "modular-function") CHECK(row["status"] != "fail");
  }

  TEST_CASE("configuration errors exit with 2") {
    CHECK(run("verify nosuch").code == 2);
    CHECK(run("verify kms --beta 1").code == 2);
    CHECK(run("verify kms --format yaml").code == 2);
    CHECK(run("lattices --range 5..2").code == 2);
  }

  TEST_CASE("hecke-mul structure constants") {
    const auto r = run("hecke-mul --lhs 1,2 --rhs 1,2");
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.contains("lhs"));
    CHECK(j.contains("rhs"));
    CHECK(j["products"].size() == 2);
  }

  TEST_CASE("op-matrix carries a basis manifest") {
    const auto r = run("op-matrix --op v --window prime --p 2 --k 3");
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["basis"].size() == 1 + 3 + 7 + 15);
    CHECK(j.contains("triplets"));
  }

  TEST_CASE("bundles are deterministic") {
    const auto a = scratch("a"), b = scratch("b"), e = scratch("e");
    CHECK(run("bundle --out " + a.string() + " --seed 5").code == 0);
    CHECK(run("bundle --out " + b.string() + " --seed 5").code == 0);
    std::size_t files = 0, suites = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
      ++files;
      const auto name = entry.path().filename();
      CHECK(slurp(entry.path()) == slurp(b / name));
    }
    for (const char* s : {"pair", "hecke", "projection", "tensor", "kms"}) suites += fs::exists(a / (std::string(s) + ".json"));
    CHECK(suites == 5);
    CHECK(files > 5);
    const auto summary = nlohmann::json::parse(slurp(a / "summary.json"));
    CHECK(summary["seed"] == 5);
    CHECK(summary["config"]["seed"] == 5);

    CHECK(run("bundle --out " + e.string() + " --primes \"\"").code == 0);
    std::size_t only = 0;
    for (const auto& entry : fs::directory_iterator(e)) {
      ++only;
      CHECK(entry.path().filename() == "summary.json");
    }
    CHECK(only == 1);
    fs::remove_all(a);
    fs::remove_all(b);
    fs::remove_all(e);
  }
}
