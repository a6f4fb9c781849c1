#include "mwqc/report.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace mwqc::verify {

std::string_view to_string(Status s) noexcept {
  switch (s) {
    case Status::pass:
      return "pass";
    case Status::fail:
      return "fail";
    case Status::error:
      return "error";
  }
  return "error";
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

nlohmann::ordered_json to_json(const CheckReport& r) {
  nlohmann::ordered_json j;
  j["scenario"] = r.scenario;
  j["identity"] = r.identity;
  j["status"] = std::string(to_string(r.status));
  j["tolerance"] = r.tolerance;

  auto residuals = nlohmann::ordered_json::object();
  for (const auto& [name, value] : r.residuals) {
    // JSON has no inf/nan; keep them readable as strings.
    if (std::isfinite(value)) {
      residuals[name] = value;
    } else {
      residuals[name] = format_number(value);
    }
  }
  j["residuals"] = std::move(residuals);

  auto witnesses = nlohmann::ordered_json::object();
  for (const auto& [name, value] : r.witnesses) witnesses[name] = value;
  j["witnesses"] = std::move(witnesses);

  auto params = nlohmann::ordered_json::object();
  for (const auto& [name, value] : r.parameters) params[name] = value;
  j["parameters"] = std::move(params);

  if (!r.message.empty()) j["message"] = r.message;
  if (r.wall_time_seconds) j["wall_time_seconds"] = *r.wall_time_seconds;
  return j;
}

std::string to_json_line(const CheckReport& r) { return to_json(r).dump(); }

std::string to_text(const CheckReport& r) {
  std::ostringstream os;
  std::string tag(to_string(r.status));
  for (char& c : tag) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  os << "[" << tag << "] " << r.scenario << ": " << r.identity << "\n";
  for (const auto& [name, value] : r.residuals) os << "  residual " << name << " = " << format_number(value) << "\n";
  for (const auto& [name, value] : r.witnesses) os << "  witness  " << name << " = " << value << "\n";
  if (!r.message.empty()) os << "  message  " << r.message << "\n";
  os << "  params  ";
  for (const auto& [name, value] : r.parameters) os << " " << name << "=" << value;
  os << "\n";
  if (r.wall_time_seconds) os << "  time     " << format_number(*r.wall_time_seconds) << " s\n";
  return os.str();
}

}  // namespace mwqc::verify
