#pragma once

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "riemkl/diagnostics.hpp"
#include "riemkl/objective.hpp"
#include "riemkl/quasimetric.hpp"
#include "riemkl/solver.hpp"
#include "riemkl/trace.hpp"

namespace riemkl {

/// Carries every validation problem found in a config, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

enum class ObjectiveVariant { kEuclideanQuadratic, kPowerNorm, kRayleighSphere, kKarcherSpd };

enum class CertificateSource { kMorse, kNoncritical, kAssumed, kNone };

struct DiagnosticsToggles {
  bool h1 = true;
  bool h2 = true;
  bool summability = true;
  bool lemma51 = true;
  bool kl_exponent = true;
  bool lemma52 = false;
  CertificateSource certificate = CertificateSource::kMorse;
  double morse_radius = 0.5;
  KLCertificate assumed;  // used when certificate == kAssumed
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 0;
  std::string out_dir = ".";

  ManifoldKind manifold_kind = ManifoldKind::kEuclidean;
  int manifold_dim = 2;  // euclidean/sphere: ambient n; spd: matrix side m
  std::optional<Eigen::VectorXd> x0;

  ObjectiveVariant objective_variant = ObjectiveVariant::kEuclideanQuadratic;
  Eigen::MatrixXd quad_q;
  Eigen::VectorXd quad_center;
  double power_p = 2.0;
  Eigen::MatrixXd rayleigh_a;
  std::vector<Eigen::MatrixXd> karcher_anchors;
  Eigen::VectorXd karcher_weights;

  QuasiDistance qdist = QuasiDistance::riemannian();
  SolverConfig solver;
  std::optional<double> lipschitz;  // explicit L; estimated when absent
  double lipschitz_region_radius = 1.0;
  int lipschitz_samples = 200;

  DiagnosticsToggles diagnostics;
};

ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_json(const nlohmann::json& doc);

/// Builders used by run_experiment; exposed for tests.
Manifold make_manifold(const ExperimentConfig& cfg);
std::unique_ptr<Objective> make_objective(const ExperimentConfig& cfg);
Point initial_point(const ExperimentConfig& cfg, const Manifold& m, const Objective& obj);

struct RunSummary {
  std::string name;
  SolveStatus status = SolveStatus::kMaxIters;
  std::string failure_reason;
  int iterations = 0;
  double final_f = 0.0;
  double final_grad_norm = 0.0;
  double wall_time_s = 0.0;
  double sum_qd_steps = 0.0;
  std::optional<double> oracle_distance;
  std::optional<double> lipschitz_used;
  DiagnosticsReport report;

  nlohmann::json to_json() const;
};

struct RunResult {
  DescentTrace trace;
  RunSummary summary;
  std::string trace_path;
  std::string summary_path;
};

/// Deterministic for a fixed (config, seed) apart from the recorded wall time.
/// Trace CSV and summary JSON are written atomically (temp file + rename).
/// RIEMKL_OUT_DIR overrides the configured output directory.
RunResult run_experiment(const ExperimentConfig& cfg);

/// Runs the configured diagnostics monitors against a solved trace.
DiagnosticsReport run_diagnostics(const ExperimentConfig& cfg, const Objective& obj,
                                  const DescentTrace& trace, std::optional<double> lipschitz);

/// One sweep axis: dotted config key plus the values it takes.
struct SweepAxis {
  std::string key;
  std::vector<nlohmann::json> values;
};

struct SweepResult {
  std::string table_path;
  int cells = 0;
  int failures = 0;
};

/// Cartesian sweep over numeric config fields; axes are ordered
/// lexicographically by key and cells run in a worker pool. Per-cell failures
/// are recorded inline and the sweep continues.
SweepResult sweep(const nlohmann::json& base_config, std::vector<SweepAxis> axes,
                  const std::string& out_dir_override = "", int workers = 0);

enum class PlotKind { kFGap, kLogLog, kCumQd };

PlotKind parse_plot_kind(const std::string& name);

/// Writes a standalone matplotlib script referencing the trace CSVs by
/// relative path. Throws IoError if a trace file is missing.
void emit_plot_script(const std::vector<std::string>& trace_paths, PlotKind kind,
                      const std::string& script_path, std::optional<double> f_star = std::nullopt);

/// Direct SVG rendering of the same three plot kinds.
void render_plot_svg(const std::vector<std::string>& trace_paths, PlotKind kind,
                     const std::string& svg_path, std::optional<double> f_star = std::nullopt);

/// Dotted-path override helper used by `--set` and sweeps ("solver.alpha=0.5").
void apply_override(nlohmann::json& doc, const std::string& dotted_key,
                    const nlohmann::json& value);

/// Parses "key=value" where value becomes JSON if possible, else a string.
std::pair<std::string, nlohmann::json> parse_key_value(const std::string& assignment);

void atomic_write_file(const std::string& path, const std::string& contents);

}  // namespace riemkl
