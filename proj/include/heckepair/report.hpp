#pragma once

// Verification suites and machine-readable reports shared by the CLI and the
// acceptance binary.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace heckepair {

struct RunConfig {
  std::string command;
  std::vector<std::uint64_t> primes{2, 3};
  std::vector<std::string> betas{"3"};
  unsigned depth = 40;
  std::uint64_t bound = 36;
  unsigned k = 4;
  unsigned precision = 50;
  std::string format = "json";
  std::uint64_t seed = 1;
  unsigned det_power = 1;
  std::uint64_t modcap = 64;

  nlohmann::ordered_json echo() const;
};

enum class Status { pass, fail, skipped };

std::string to_string(Status s);

struct ReportRow {
  std::string check;
  std::string anchor;  // stable identifier of the identity being verified
  Status status = Status::pass;
  std::optional<std::string> value;
  std::optional<std::string> bound;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<ReportRow> rows;

  void add(ReportRow row) { rows.push_back(std::move(row)); }
  void check(const std::string& name, const std::string& anchor, bool ok, const std::string& detail = "");
  bool passed() const;
  std::size_t count(Status s) const;
};

inline constexpr int kSchemaVersion = 1;

nlohmann::ordered_json to_json(const SuiteReport& r, const RunConfig& cfg);
std::string to_csv(const SuiteReport& r);
std::string to_text(const SuiteReport& r);
/// Renders in the configured format.
std::string render(const SuiteReport& r, const RunConfig& cfg);

/// Suites: pair, hecke, projection, tensor, kms.
const std::vector<std::string>& suite_names();
SuiteReport run_suite(const std::string& name, const RunConfig& cfg);

SuiteReport pair_suite(const RunConfig& cfg);
SuiteReport hecke_suite(const RunConfig& cfg);
SuiteReport projection_suite(const RunConfig& cfg);
SuiteReport tensor_suite(const RunConfig& cfg);
SuiteReport kms_suite(const RunConfig& cfg);

}  // namespace heckepair
