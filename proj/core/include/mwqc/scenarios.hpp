#pragma once

// Registry of named verification scenarios. Each scenario checks one identity
// of the star-product / Beltrami theory with randomized and fixed cases and
// produces a CheckReport.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mwqc/report.hpp"
#include "mwqc/term_algebra.hpp"

namespace mwqc::verify {

class UnknownScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidOverrideError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed scenario config; the message carries the location.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ParamKind { real, integer, complex };

struct ParamSpec {
  std::string name;
  ParamKind kind = ParamKind::real;
  std::string default_value;
  std::string help;
};

/// Parameter name -> textual value (numbers, or constants in the expression syntax).
using Overrides = std::map<std::string, std::string>;

/// Resolved, typed parameters of one run.
class ParamSet {
 public:
  ParamSet(const std::vector<ParamSpec>& specs, const Overrides& overrides);

  double real(const std::string& name) const;
  std::int64_t integer(const std::string& name) const;
  Complex complex(const std::string& name) const;
  /// name=value pairs in declaration order, values in canonical text.
  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

 private:
  const std::string& raw(const std::string& name) const;

  std::map<std::string, std::string> values_;
  std::map<std::string, ParamKind> kinds_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// What a scenario body sees: parameters, a seeded generator, and recorders.
class ScenarioContext {
 public:
  explicit ScenarioContext(ParamSet params);

  const ParamSet& params() const noexcept { return params_; }
  std::mt19937_64& rng() noexcept { return rng_; }

  /// Records a residual and requires value <= bound (NaN fails).
  bool check(const std::string& name, double value, double bound);
  /// Records the number of failures among `total` and requires none.
  bool check_count(const std::string& name, std::size_t failures, std::size_t total);
  void residual(const std::string& name, double value);
  void witness(const std::string& name, std::string value);

  bool all_passed() const noexcept { return failures_ == 0; }
  CheckReport& report() noexcept { return report_; }

 private:
  ParamSet params_;
  std::mt19937_64 rng_;
  std::size_t failures_ = 0;
  CheckReport report_;
};

struct Scenario {
  std::string id;
  std::string identity;
  /// Default for the "tol" parameter.
  double tolerance = 1e-10;
  std::vector<ParamSpec> params;
  std::function<void(ScenarioContext&)> body;
};

/// All registered scenarios, ordered by id.
const std::vector<Scenario>& registry();
const Scenario* find_scenario(std::string_view id);

/// 42, or the value of MWQC_SEED when set.
std::uint64_t default_seed();

struct RunOptions {
  bool timing = false;
};

/// Runs one scenario with defaults merged with overrides. Throws
/// UnknownScenarioError for an unregistered id and InvalidOverrideError for an
/// unknown parameter or a value of the wrong type.
CheckReport run_scenario(std::string_view id, const Overrides& overrides, const RunOptions& options = {});

/// Per-scenario overrides; the key "*" applies to every scenario that declares
/// the parameter.
using ConfigOverrides = std::map<std::string, Overrides>;

/// Reads {"overrides": {"<id>" | "*": {"param": value, ...}}}.
ConfigOverrides parse_config(std::string_view json_text);
ConfigOverrides load_config(const std::filesystem::path& path);

struct RunAllResult {
  std::vector<CheckReport> reports;
  /// 0 iff every scenario passed, 1 otherwise.
  int exit_status = 0;
};

/// Runs every registered scenario; `global` applies like the "*" config key.
RunAllResult run_all(const ConfigOverrides& config, const Overrides& global = {},
                     const RunOptions& options = {});
RunAllResult run_all(const std::optional<std::filesystem::path>& config_path,
                     const RunOptions& options = {});

}  // namespace mwqc::verify
