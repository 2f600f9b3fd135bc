#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "riemkl/diagnostics.hpp"
#include "riemkl/experiment.hpp"
#include "riemkl/solver.hpp"
#include "riemkl/trace.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

std::string one_line(std::string msg) {
  for (char& c : msg) {
    if (c == '\n' || c == '\r') c = ';';
  }
  return msg;
}

int fail(const char* category, const std::string& msg, int code) {
  std::cerr << "error[" << category << "]: " << one_line(msg) << '\n';
  return code;
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw riemkl::ConfigError({"config file not found: " + path});
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw riemkl::ConfigError({std::string("config is not valid JSON: ") + e.what()});
  }
  return doc;
}

void apply_cli_overrides(nlohmann::json& doc, const std::vector<std::string>& sets,
                         const std::optional<std::uint64_t>& seed, const std::string& out_dir) {
  for (const std::string& s : sets) {
    auto [key, value] = riemkl::parse_key_value(s);
    riemkl::apply_override(doc, key, value);
  }
  if (seed) riemkl::apply_override(doc, "experiment.seed", *seed);
  if (!out_dir.empty()) riemkl::apply_override(doc, "experiment.out_dir", out_dir);
}

riemkl::DescentTrace load_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw riemkl::IoError("cannot open trace: " + path);
  return riemkl::read_trace_csv(in);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemannian descent solvers with Kurdyka-Lojasiewicz convergence diagnostics"};
  app.require_subcommand(1);

  std::string config_path, out_dir, kind_name = "fgap", trace_out;
  std::vector<std::string> sets, grids, trace_paths;
  std::optional<std::uint64_t> seed;
  double diag_a = 0.0, diag_b = 0.0;
  std::optional<double> f_star;
  bool svg = false;
  int workers = 0;

  CLI::App* run = app.add_subcommand("run", "execute one experiment from a config file");
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "output directory override");
  run->add_option("--seed", seed, "seed override");
  run->add_option("--set", sets, "dotted-key config override, e.g. solver.alpha=0.5");

  CLI::App* sw = app.add_subcommand("sweep", "grid sweep over numeric config fields");
  sw->add_option("--config", config_path, "base config (JSON)")->required();
  sw->add_option("--grid", grids, "axis spec key=v1,v2,... (repeatable)")->required();
  sw->add_option("--out", out_dir, "output directory override");
  sw->add_option("--set", sets, "fixed override applied before the grid");
  sw->add_option("--workers", workers, "worker threads (default: hardware)");

  CLI::App* diag = app.add_subcommand("diagnose", "re-run monitors on an existing trace");
  diag->add_option("--trace", trace_paths, "trace CSV")->required()->expected(1);
  diag->add_option("--a", diag_a, "H1 constant a")->required();
  diag->add_option("--b", diag_b, "H2 constant b")->required();
  diag->add_option("--f-star", f_star, "limit value for the KL-exponent fit");
  diag->add_option("--out", trace_out, "write the report JSON here instead of stdout");

  CLI::App* plot = app.add_subcommand("plot", "emit a plot script (and optionally an SVG)");
  plot->add_option("--trace", trace_paths, "trace CSV (repeatable)")->required();
  plot->add_option("--kind", kind_name, "fgap | loglog | cumqd");
  plot->add_option("--out", out_dir, "output directory (default .)");
  plot->add_option("--f-star", f_star, "limit value for gap plots");
  plot->add_flag("--svg", svg, "also render an SVG directly");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    return fail("config", e.what(), kExitConfig);
  }

  try {
    if (run->parsed()) {
      nlohmann::json doc = load_json(config_path);
      apply_cli_overrides(doc, sets, seed, out_dir);
      riemkl::ExperimentConfig cfg = riemkl::parse_config_json(doc);
      riemkl::RunResult result = riemkl::run_experiment(cfg);
      std::cout << result.summary.to_json().dump(2) << '\n';
      if (result.summary.status == riemkl::SolveStatus::kSubproblemFailure) {
        return fail("solver", result.summary.failure_reason, kExitSolver);
      }
      return 0;
    }

    if (sw->parsed()) {
      nlohmann::json doc = load_json(config_path);
      apply_cli_overrides(doc, sets, seed, "");
      std::vector<riemkl::SweepAxis> axes;
      for (const std::string& g : grids) {
        const std::size_t eq = g.find('=');
        if (eq == std::string::npos || eq == 0) {
          throw riemkl::ConfigError({"grid axis must look like key=v1,v2,..., got '" + g + "'"});
        }
        riemkl::SweepAxis axis;
        axis.key = g.substr(0, eq);
        std::string rest = g.substr(eq + 1);
        std::size_t start = 0;
        while (start <= rest.size()) {
          const std::size_t comma = rest.find(',', start);
          const std::string cell =
              rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
          if (!cell.empty()) {
            try {
              axis.values.push_back(nlohmann::json::parse(cell));
            } catch (const nlohmann::json::exception&) {
              axis.values.push_back(cell);
            }
          }
          if (comma == std::string::npos) break;
          start = comma + 1;
        }
        axes.push_back(std::move(axis));
      }
      riemkl::SweepResult res = riemkl::sweep(doc, axes, out_dir, workers);
      std::cout << res.table_path << '\n';
      return 0;
    }

    if (diag->parsed()) {
      riemkl::DescentTrace trace = load_trace_file(trace_paths.front());
      nlohmann::json out;
      const riemkl::CheckResult h1 = riemkl::check_h1(trace, diag_a);
      const riemkl::CheckResult h2 = riemkl::check_h2(trace, diag_b);
      out["h1"] = {{"pass", h1.pass}, {"max_violation", h1.max_violation}, {"a", diag_a}};
      out["h2"] = {{"pass", h2.pass}, {"max_violation", h2.max_violation}, {"b", diag_b}};
      out["best_feasible_a"] = riemkl::best_feasible_h1_constant(trace);
      out["best_feasible_b"] = riemkl::best_feasible_h2_constant(trace);
      const riemkl::SummabilityResult summ = riemkl::summability(trace);
      out["summability"] = {{"tail_ratio", summ.tail_ratio},
                            {"is_cauchy", summ.is_cauchy_estimate},
                            {"sum", trace.sum_qd_steps()}};
      std::vector<double> d_steps;
      bool positive = !trace.steps.empty();
      for (const riemkl::TraceStep& s : trace.steps) {
        positive = positive && s.qd_step > 0.0;
        d_steps.push_back(s.qd_step);
      }
      if (positive) {
        const riemkl::Lemma51Result l51 = riemkl::lemma51_bound(d_steps);
        out["lemma51"] = {{"pass", l51.pass}, {"lhs", l51.lhs}, {"rhs", l51.rhs}};
      }
      if (f_star) {
        try {
          const riemkl::ExponentEstimate est = riemkl::estimate_kl_exponent(trace, *f_star);
          out["kl_exponent"] = {{"alpha_hat", est.alpha_hat},
                                {"residual", est.residual},
                                {"points", est.points_used}};
        } catch (const std::invalid_argument& e) {
          out["kl_exponent"] = {{"error", e.what()}};
        }
      }
      if (trace_out.empty()) {
        std::cout << out.dump(2) << '\n';
      } else {
        riemkl::atomic_write_file(trace_out, out.dump(2) + "\n");
      }
      return 0;
    }

    if (plot->parsed()) {
      const riemkl::PlotKind kind = riemkl::parse_plot_kind(kind_name);
      const std::string dir = out_dir.empty() ? "." : out_dir;
      const std::string script = dir + "/plot_" + kind_name + ".py";
      riemkl::emit_plot_script(trace_paths, kind, script, f_star);
      std::cout << script << '\n';
      if (svg) {
        const std::string svg_path = dir + "/plot_" + kind_name + ".svg";
        riemkl::render_plot_svg(trace_paths, kind, svg_path, f_star);
        std::cout << svg_path << '\n';
      }
      return 0;
    }
  } catch (const riemkl::ConfigError& e) {
    return fail("config", e.what(), kExitConfig);
  } catch (const riemkl::SolverError& e) {
    return fail("solver", e.what(), kExitSolver);
  } catch (const riemkl::IoError& e) {
    return fail("io", e.what(), kExitIo);
  } catch (const std::invalid_argument& e) {
    return fail("config", e.what(), kExitConfig);
  } catch (const std::exception& e) {
    return fail("io", e.what(), kExitIo);
  }
  return fail("config", "no subcommand", kExitConfig);
}
