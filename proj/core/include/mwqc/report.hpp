#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace mwqc::verify {

enum class Status { pass, fail, error };

std::string_view to_string(Status s) noexcept;

/// Outcome of one scenario run. Entries keep insertion order so the
/// serialized form is deterministic.
struct CheckReport {
  std::string scenario;
  /// The identity the scenario verifies, for traceability.
  std::string identity;
  Status status = Status::error;
  double tolerance = 0.0;
  std::vector<std::pair<std::string, double>> residuals;
  std::vector<std::pair<std::string, std::string>> witnesses;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::string message;
  /// Only filled when timing was requested; omitted otherwise so reports
  /// stay byte-identical across runs.
  std::optional<double> wall_time_seconds;
};

nlohmann::ordered_json to_json(const CheckReport& r);
/// Single-line JSON.
std::string to_json_line(const CheckReport& r);
std::string to_text(const CheckReport& r);

/// Shortest round-trip decimal for a real; "inf", "-inf", "nan" for non-finite values.
std::string format_number(double x);

}  // namespace mwqc::verify
