#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mwqc/beltrami.hpp"
#include "mwqc/cauchy_numeric.hpp"
#include "mwqc/expr_parser.hpp"
#include "mwqc/scenarios.hpp"
#include "mwqc/star_engine.hpp"

namespace {

using namespace mwqc;
using verify::CheckReport;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

// Thrown for bad flag values that CLI11 cannot catch by itself.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

StarExpr parse_flag(const std::string& flag, const std::string& src) {
  try {
    return parse(src);
  } catch (const ParseError& e) {
    std::ostringstream os;
    os << "--" << flag << ": parse error " << e.what() << "\n  " << src << "\n  "
       << std::string(std::min(e.position(), src.size()), ' ') << "^";
    throw UsageError(os.str());
  }
}

std::vector<Complex> parse_list(const std::string& flag, const std::string& src) {
  std::vector<Complex> out;
  std::stringstream ss(src);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(parse_constant(item));
    } catch (const ParseError& e) {
      throw UsageError("--" + flag + ": '" + item + "' is not a constant (" + e.what() + ")");
    }
  }
  if (out.empty()) throw UsageError("--" + flag + ": empty list");
  return out;
}

void require_finite(const std::string& flag, double v) {
  if (!std::isfinite(v)) throw UsageError("--" + flag + " must be finite");
}

void print_report(const CheckReport& r, const std::string& format) {
  if (format == "json") {
    std::cout << verify::to_json_line(r) << "\n";
  } else {
    std::cout << verify::to_text(r);
  }
}

// "--key value" and "--key=value" pairs left over after CLI11 parsing.
verify::Overrides parse_extras(const std::vector<std::string>& extras) {
  verify::Overrides out;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& a = extras[i];
    if (a.rfind("--", 0) != 0 || a.size() == 2) throw UsageError("unexpected argument '" + a + "'");
    const auto eq = a.find('=');
    if (eq != std::string::npos) {
      out[a.substr(2, eq - 2)] = a.substr(eq + 1);
    } else if (i + 1 < extras.size()) {
      out[a.substr(2)] = extras[++i];
    } else {
      throw UsageError("missing value for '" + a + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Star products, Beltrami coefficients and identity checks on exponential-polynomial functions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mwqc 0.1.0");

  std::string format = "text";
  bool timing = false;
  const auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
  };

  // run-all
  auto* run_all = app.add_subcommand("run-all", "Run every registered scenario");
  std::optional<std::string> config_path;
  std::optional<std::string> g_tol, g_seed, g_trials;
  run_all->add_option("--config", config_path, "JSON file with an \"overrides\" object keyed by scenario id");
  add_format(run_all);
  run_all->add_flag("--timing", timing, "Include wall time in reports");
  run_all->add_option("--tol", g_tol, "Tolerance for every scenario");
  run_all->add_option("--seed", g_seed, "Random seed (default 42 or MWQC_SEED)");
  run_all->add_option("--trials", g_trials, "Trial count for randomized scenarios");

  // run
  auto* run = app.add_subcommand("run", "Run one scenario; extra --key value pairs override parameters");
  std::string scenario_id;
  run->add_option("id", scenario_id, "Scenario id")->required();
  add_format(run);
  run->add_flag("--timing", timing, "Include wall time in the report");
  run->allow_extras();

  // list
  auto* list = app.add_subcommand("list", "List scenarios and their parameters");

  // star
  auto* star_cmd = app.add_subcommand("star", "Exact (or truncated) star product f * g");
  std::string f_src, g_src;
  double hbar = 1.0;
  std::optional<int> order;
  star_cmd->add_option("--f", f_src, "Left factor")->required();
  star_cmd->add_option("--g", g_src, "Right factor")->required();
  star_cmd->add_option("--hbar", hbar, "Deformation parameter")->capture_default_str();
  star_cmd->add_option("--order", order, "Truncate the hbar series at this order")->check(CLI::NonNegativeNumber);

  // poisson
  auto* poisson_cmd = app.add_subcommand("poisson", "Poisson bracket {f, g}");
  poisson_cmd->add_option("--f", f_src, "First argument")->required();
  poisson_cmd->add_option("--g", g_src, "Second argument")->required();

  // mu
  auto* mu_cmd = app.add_subcommand("mu", "Exact constant Beltrami coefficient of f");
  mu_cmd->add_option("--f", f_src, "Expression")->required();

  // qc
  auto* qc_cmd = app.add_subcommand("qc", "Grid certification of the quasiconformal conditions");
  int grid = 256;
  double k_threshold = kDefaultKThreshold;
  double re_min = -1.0, re_max = 1.0, im_min = -1.0, im_max = 1.0;
  qc_cmd->add_option("--f", f_src, "Expression")->required();
  qc_cmd->add_option("--grid", grid, "Grid points per axis")->capture_default_str();
  qc_cmd->add_option("--k", k_threshold, "Strict bound on the sup ratio")->capture_default_str();
  qc_cmd->add_option("--re-min", re_min)->capture_default_str();
  qc_cmd->add_option("--re-max", re_max)->capture_default_str();
  qc_cmd->add_option("--im-min", im_min)->capture_default_str();
  qc_cmd->add_option("--im-max", im_max)->capture_default_str();
  add_format(qc_cmd);

  // cauchy
  auto* cauchy_cmd = app.add_subcommand("cauchy", "Cauchy-integral reproduction of the n-fold exponential star product");
  std::string alphas_src, mus_src, z0_src = "0", orders_src;
  int nodes = kDefaultContourNodes;
  double cauchy_tol = 1e-8;
  cauchy_cmd->add_option("--alphas", alphas_src, "Comma-separated z-frequencies")->required();
  cauchy_cmd->add_option("--mus", mus_src, "Comma-separated Beltrami coefficients")->required();
  cauchy_cmd->add_option("--z0", z0_src, "Evaluation point")->capture_default_str();
  cauchy_cmd->add_option("--hbar", hbar, "Deformation parameter")->capture_default_str();
  cauchy_cmd->add_option("--nodes", nodes, "Trapezoid nodes per contour")->capture_default_str();
  cauchy_cmd->add_option("--order", orders_src, "Comma-separated derivative orders (default: none)");
  cauchy_cmd->add_option("--tol", cauchy_tol, "Relative tolerance against the direct value")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    const verify::RunOptions options{timing};

    if (*run_all) {
      verify::Overrides global;
      if (g_tol) global["tol"] = *g_tol;
      if (g_seed) global["seed"] = *g_seed;
      if (g_trials) global["trials"] = *g_trials;
      const verify::ConfigOverrides config = config_path ? verify::load_config(*config_path) : verify::ConfigOverrides{};
      const auto result = verify::run_all(config, global, options);
      std::size_t passed = 0;
      for (const auto& r : result.reports) {
        print_report(r, format);
        if (r.status == verify::Status::pass) ++passed;
      }
      if (format == "text") std::cout << passed << "/" << result.reports.size() << " scenarios passed\n";
      return result.exit_status == 0 ? kExitPass : kExitFail;
    }

    if (*run) {
      const CheckReport r = verify::run_scenario(scenario_id, parse_extras(run->remaining()), options);
      print_report(r, format);
      return r.status == verify::Status::pass ? kExitPass : kExitFail;
    }

    if (*list) {
      for (const auto& s : verify::registry()) {
        std::cout << s.id << "\n  " << s.identity << "\n";
        for (const auto& p : s.params) std::cout << "  --" << p.name << " " << p.default_value << "  " << p.help << "\n";
        std::cout << "  --tol " << verify::format_number(s.tolerance) << "  --seed " << verify::default_seed() << "\n";
      }
      return kExitPass;
    }

    if (*star_cmd) {
      require_finite("hbar", hbar);
      const StarExpr f = parse_flag("f", f_src), g = parse_flag("g", g_src);
      std::cout << serialize(order ? star_truncated(f, g, hbar, *order) : star(f, g, hbar)) << "\n";
      return kExitPass;
    }

    if (*poisson_cmd) {
      std::cout << serialize(poisson_bracket(parse_flag("f", f_src), parse_flag("g", g_src))) << "\n";
      return kExitPass;
    }

    if (*mu_cmd) {
      const auto mu = mu_exact(parse_flag("f", f_src));
      if (!mu) throw UsageError("mu is not constant for this expression; use 'qc' for a grid estimate");
      std::cout << format_complex(mu->value) << "\n";
      return kExitPass;
    }

    if (*qc_cmd) {
      for (const auto& [name, v] : {std::pair{"k", k_threshold}, {"re-min", re_min}, {"re-max", re_max},
                                    {"im-min", im_min}, {"im-max", im_max}}) {
        require_finite(name, v);
      }
      const StarExpr f = parse_flag("f", f_src);
      const GridDomain dom{re_min, re_max, im_min, im_max, grid, grid};
      const QCReport q = qc_certify(f, dom, k_threshold);

      CheckReport r;
      r.scenario = "qc";
      r.identity = "|d_zbar f| <= k |d_z f| with k < 1, d_z f != 0, d_z f and d_zbar f square-integrable";
      r.status = q.verdict ? verify::Status::pass : verify::Status::fail;
      r.tolerance = k_threshold;
      r.residuals = {{"k_hat", q.k_hat}, {"l2_dz", q.l2_dz}, {"l2_dzbar", q.l2_dzbar}};
      r.witnesses.emplace_back("dz_nonvanishing", q.dz_nonvanishing ? "true" : "false");
      if (!q.verdict) {
        const std::string kind = q.witness_kind == "dz-vanishes" ? "condition III: d_z f vanishes" : q.witness_kind;
        r.witnesses.emplace_back(kind, "at z = " + format_complex(q.witness));
      }
      if (!q.note.empty()) r.message = q.note;
      r.parameters = {{"f", serialize(f)}, {"grid", std::to_string(grid)}, {"k", verify::format_number(k_threshold)}};
      print_report(r, format);
      return q.verdict ? kExitPass : kExitFail;
    }

    if (*cauchy_cmd) {
      require_finite("hbar", hbar);
      const auto alphas = parse_list("alphas", alphas_src);
      const auto mus = parse_list("mus", mus_src);
      if (alphas.size() != mus.size()) throw UsageError("--alphas and --mus must have the same length");
      Complex z0;
      try {
        z0 = parse_constant(z0_src);
      } catch (const ParseError& e) {
        throw UsageError(std::string("--z0: ") + e.what());
      }
      const MuFunction mf(alphas, z0, hbar);
      const auto contours = default_contours(mus, nodes);

      std::vector<int> orders(mus.size(), 0);
      if (!orders_src.empty()) {
        const auto parsed = parse_list("order", orders_src);
        if (parsed.size() != mus.size()) throw UsageError("--order must have one entry per mu");
        for (std::size_t j = 0; j < parsed.size(); ++j) {
          const double v = parsed[j].real();
          if (parsed[j].imag() != 0.0 || v < 0 || v != std::floor(v) || v > 16) {
            throw UsageError("--order entries must be integers in [0, 16]");
          }
          orders[j] = static_cast<int>(v);
        }
      }
      const bool plain = std::all_of(orders.begin(), orders.end(), [](int m) { return m == 0; });
      const Complex reference = plain ? mu_function_eval(mf, mus) : analytic_derivative(mf, mus, orders);
      const Complex quadrature = cauchy_derivative(mf, mus, orders, contours);
      const double err = std::abs(quadrature - reference) / std::max(1.0, std::abs(reference));
      std::cout << "direct     " << format_complex(reference) << "\n"
                << "cauchy     " << format_complex(quadrature) << "\n"
                << "rel_error  " << verify::format_number(err) << "\n";
      return err <= cauchy_tol ? kExitPass : kExitFail;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const verify::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
