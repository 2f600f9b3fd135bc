#include "riemkl/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace riemkl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::string s = "invalid config:";
  for (const auto& i : issues) s += "\n  - " + i;
  return s;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---- JSON helpers -----------------------------------------------------

class Collector {
 public:
  void err(const std::string& path, const std::string& msg) { issues_.push_back(path + ": " + msg); }
  bool ok() const { return issues_.empty(); }
  std::vector<std::string> take() { return std::move(issues_); }

 private:
  std::vector<std::string> issues_;
};

const json* section(const json& doc, const char* name) {
  auto it = doc.find(name);
  return it == doc.end() ? nullptr : &*it;
}

void check_keys(Collector& c, const json& sec, const std::string& path,
                const std::set<std::string>& allowed) {
  if (!sec.is_object()) {
    c.err(path, "expected an object");
    return;
  }
  for (auto it = sec.begin(); it != sec.end(); ++it) {
    if (!allowed.count(it.key())) c.err(path + "." + it.key(), "unknown field");
  }
}

template <typename T>
bool fetch(Collector& c, const json& sec, const std::string& path, const char* key, T& out) {
  auto it = sec.find(key);
  if (it == sec.end()) return false;
  try {
    out = it->get<T>();
    return true;
  } catch (const json::exception&) {
    c.err(path + "." + key, "wrong type");
    return false;
  }
}

bool fetch_vector(Collector& c, const json& sec, const std::string& path, const char* key,
                  Eigen::VectorXd& out) {
  auto it = sec.find(key);
  if (it == sec.end()) return false;
  if (!it->is_array()) {
    c.err(path + "." + key, "expected an array of numbers");
    return false;
  }
  Eigen::VectorXd v(it->size());
  Eigen::Index i = 0;
  for (const auto& e : *it) {
    if (!e.is_number()) {
      c.err(path + "." + key, "expected an array of numbers");
      return false;
    }
    v[i++] = e.get<double>();
  }
  out = std::move(v);
  return true;
}

bool fetch_matrix(Collector& c, const json& sec, const std::string& path, const char* key,
                  Eigen::MatrixXd& out) {
  auto it = sec.find(key);
  if (it == sec.end()) return false;
  if (!it->is_array() || it->empty() || !(*it)[0].is_array()) {
    c.err(path + "." + key, "expected an array of arrays (matrix rows)");
    return false;
  }
  const std::size_t rows = it->size();
  const std::size_t cols = (*it)[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = (*it)[r];
    if (!row.is_array() || row.size() != cols) {
      c.err(path + "." + key, "ragged matrix rows");
      return false;
    }
    for (std::size_t cc = 0; cc < cols; ++cc) {
      if (!row[cc].is_number()) {
        c.err(path + "." + key, "expected numeric matrix entries");
        return false;
      }
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(cc)) = row[cc].get<double>();
    }
  }
  out = std::move(m);
  return true;
}

// ---- enum names -------------------------------------------------------

std::optional<ManifoldKind> manifold_kind_from(const std::string& s) {
  if (s == "euclidean") return ManifoldKind::kEuclidean;
  if (s == "sphere") return ManifoldKind::kSphere;
  if (s == "spd") return ManifoldKind::kSpd;
  return std::nullopt;
}

std::optional<ObjectiveVariant> objective_variant_from(const std::string& s) {
  if (s == "euclidean_quadratic") return ObjectiveVariant::kEuclideanQuadratic;
  if (s == "power_norm") return ObjectiveVariant::kPowerNorm;
  if (s == "rayleigh_sphere") return ObjectiveVariant::kRayleighSphere;
  if (s == "karcher_spd") return ObjectiveVariant::kKarcherSpd;
  return std::nullopt;
}

std::optional<SolverVariant> solver_variant_from(const std::string& s) {
  if (s == "sd-armijo") return SolverVariant::kSdArmijo;
  if (s == "sd-fixed") return SolverVariant::kSdFixed;
  if (s == "prox-inexact") return SolverVariant::kProxInexact;
  return std::nullopt;
}

std::optional<StepPolicy> step_policy_from(const std::string& s) {
  if (s == "midpoint") return StepPolicy::kMidpoint;
  if (s == "low") return StepPolicy::kLow;
  if (s == "high-minus-margin") return StepPolicy::kHighMinusMargin;
  return std::nullopt;
}

std::optional<CertificateSource> certificate_from(const std::string& s) {
  if (s == "morse") return CertificateSource::kMorse;
  if (s == "noncritical") return CertificateSource::kNoncritical;
  if (s == "assumed") return CertificateSource::kAssumed;
  if (s == "none") return CertificateSource::kNone;
  return std::nullopt;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"config file not found: " + path});
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
  }
  return parse_config_json(doc);
}

ExperimentConfig parse_config_json(const json& doc) {
  Collector c;
  ExperimentConfig cfg;
  if (!doc.is_object()) throw ConfigError({"config root must be a JSON object"});

  static const std::set<std::string> top_keys = {"experiment",    "manifold", "objective",
                                                 "quasidistance", "solver",   "diagnostics"};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!top_keys.count(it.key())) c.err(it.key(), "unknown section");
  }

  // experiment
  if (const json* sec = section(doc, "experiment")) {
    check_keys(c, *sec, "experiment", {"name", "seed", "out_dir", "snapshot_stride"});
    fetch(c, *sec, "experiment", "name", cfg.name);
    fetch(c, *sec, "experiment", "seed", cfg.seed);
    fetch(c, *sec, "experiment", "out_dir", cfg.out_dir);
    int stride = 0;
    if (fetch(c, *sec, "experiment", "snapshot_stride", stride)) {
      if (stride < 0) c.err("experiment.snapshot_stride", "must be >= 0");
      cfg.solver.snapshot_stride = stride;
    }
  }

  // manifold
  if (const json* sec = section(doc, "manifold")) {
    check_keys(c, *sec, "manifold", {"kind", "dim", "x0"});
    std::string kind;
    if (fetch(c, *sec, "manifold", "kind", kind)) {
      if (auto k = manifold_kind_from(kind)) {
        cfg.manifold_kind = *k;
      } else {
        c.err("manifold.kind", "must be one of euclidean|sphere|spd, got '" + kind + "'");
      }
    }
    fetch(c, *sec, "manifold", "dim", cfg.manifold_dim);
    if (cfg.manifold_dim < 1) c.err("manifold.dim", "must be >= 1");
    if (cfg.manifold_kind == ManifoldKind::kSphere && cfg.manifold_dim < 2) {
      c.err("manifold.dim", "sphere needs ambient dimension >= 2");
    }
    if (sec->contains("x0")) {
      if (cfg.manifold_kind == ManifoldKind::kSpd) {
        Eigen::MatrixXd m;
        if (fetch_matrix(c, *sec, "manifold", "x0", m)) {
          if (m.rows() != cfg.manifold_dim || m.cols() != cfg.manifold_dim) {
            c.err("manifold.x0", "matrix must be dim x dim");
          } else {
            cfg.x0 = Manifold::as_vector(m);
          }
        }
      } else {
        Eigen::VectorXd v;
        if (fetch_vector(c, *sec, "manifold", "x0", v)) {
          if (v.size() != cfg.manifold_dim) {
            c.err("manifold.x0", "length must equal manifold.dim");
          } else {
            cfg.x0 = std::move(v);
          }
        }
      }
    }
  }

  // objective
  if (const json* sec = section(doc, "objective")) {
    check_keys(c, *sec, "objective",
               {"variant", "q", "q_diag", "center", "p", "a", "a_diag", "anchors", "weights"});
    std::string variant;
    if (fetch(c, *sec, "objective", "variant", variant)) {
      if (auto v = objective_variant_from(variant)) {
        cfg.objective_variant = *v;
      } else {
        c.err("objective.variant", "unknown variant '" + variant + "'");
      }
    }
    Eigen::VectorXd diag;
    switch (cfg.objective_variant) {
      case ObjectiveVariant::kEuclideanQuadratic: {
        if (cfg.manifold_kind != ManifoldKind::kEuclidean) {
          c.err("objective.variant", "euclidean_quadratic requires manifold.kind = euclidean");
          break;
        }
        const int n = cfg.manifold_dim;
        cfg.quad_q = Eigen::MatrixXd::Identity(n, n);
        cfg.quad_center = Eigen::VectorXd::Zero(n);
        if (fetch_vector(c, *sec, "objective", "q_diag", diag)) {
          if (diag.size() != n) {
            c.err("objective.q_diag", "length must equal manifold.dim");
          } else {
            cfg.quad_q = diag.asDiagonal();
          }
        }
        Eigen::MatrixXd q;
        if (fetch_matrix(c, *sec, "objective", "q", q)) {
          if (q.rows() != n || q.cols() != n) {
            c.err("objective.q", "matrix must be dim x dim");
          } else {
            cfg.quad_q = std::move(q);
          }
        }
        Eigen::VectorXd center;
        if (fetch_vector(c, *sec, "objective", "center", center)) {
          if (center.size() != n) {
            c.err("objective.center", "length must equal manifold.dim");
          } else {
            cfg.quad_center = std::move(center);
          }
        }
        break;
      }
      case ObjectiveVariant::kPowerNorm: {
        if (cfg.manifold_kind != ManifoldKind::kEuclidean) {
          c.err("objective.variant", "power_norm requires manifold.kind = euclidean");
        }
        fetch(c, *sec, "objective", "p", cfg.power_p);
        if (cfg.power_p < 2.0) c.err("objective.p", "exponent must be >= 2");
        break;
      }
      case ObjectiveVariant::kRayleighSphere: {
        if (cfg.manifold_kind != ManifoldKind::kSphere) {
          c.err("objective.variant", "rayleigh_sphere requires manifold.kind = sphere");
          break;
        }
        const int n = cfg.manifold_dim;
        bool have = false;
        if (fetch_vector(c, *sec, "objective", "a_diag", diag)) {
          if (diag.size() != n) {
            c.err("objective.a_diag",
                  "dimension mismatch: need a " + std::to_string(n) + "-vector for ambient dim " +
                      std::to_string(n));
          } else {
            cfg.rayleigh_a = diag.asDiagonal();
            have = true;
          }
        }
        Eigen::MatrixXd a;
        if (fetch_matrix(c, *sec, "objective", "a", a)) {
          if (a.rows() != n || a.cols() != n) {
            c.err("objective.a", "dimension mismatch: matrix must be " + std::to_string(n) + "x" +
                                     std::to_string(n) + " for sphere ambient dim " +
                                     std::to_string(n));
          } else {
            cfg.rayleigh_a = std::move(a);
            have = true;
          }
        }
        if (!have && c.ok()) c.err("objective", "rayleigh_sphere needs 'a' or 'a_diag'");
        break;
      }
      case ObjectiveVariant::kKarcherSpd: {
        if (cfg.manifold_kind != ManifoldKind::kSpd) {
          c.err("objective.variant", "karcher_spd requires manifold.kind = spd");
          break;
        }
        const int m = cfg.manifold_dim;
        auto it = sec->find("anchors");
        if (it == sec->end() || !it->is_array() || it->empty()) {
          c.err("objective.anchors", "karcher_spd needs a nonempty anchor list");
          break;
        }
        bool anchors_ok = true;
        for (std::size_t i = 0; i < it->size(); ++i) {
          json wrap = json::object();
          wrap["anchor"] = (*it)[i];
          Eigen::MatrixXd a;
          const std::string path = "objective.anchors[" + std::to_string(i) + "]";
          if (!fetch_matrix(c, wrap, path, "anchor", a) || a.rows() != m || a.cols() != m) {
            c.err(path, "must be a " + std::to_string(m) + "x" + std::to_string(m) + " matrix");
            anchors_ok = false;
            continue;
          }
          cfg.karcher_anchors.push_back(std::move(a));
        }
        const auto count = static_cast<Eigen::Index>(cfg.karcher_anchors.size());
        cfg.karcher_weights = Eigen::VectorXd::Constant(count, 1.0 / std::max<double>(1, count));
        Eigen::VectorXd w;
        if (fetch_vector(c, *sec, "objective", "weights", w)) {
          if (anchors_ok && w.size() != count) {
            c.err("objective.weights", "length must equal the anchor count");
          } else if (w.minCoeff() < 0.0 || std::abs(w.sum() - 1.0) > 1e-9) {
            c.err("objective.weights", "must be nonnegative and sum to 1");
          } else {
            cfg.karcher_weights = std::move(w);
          }
        }
        break;
      }
    }
  }

  // quasidistance
  if (const json* sec = section(doc, "quasidistance")) {
    check_keys(c, *sec, "quasidistance", {"variant", "scale", "w_plus", "w_minus"});
    std::string variant = "riemannian";
    fetch(c, *sec, "quasidistance", "variant", variant);
    if (variant == "riemannian") {
      cfg.qdist = QuasiDistance::riemannian();
    } else if (variant == "scaled") {
      double scale = 1.0;
      fetch(c, *sec, "quasidistance", "scale", scale);
      if (scale <= 0.0) {
        c.err("quasidistance.scale", "must be positive");
      } else {
        cfg.qdist = QuasiDistance::scaled(scale);
      }
    } else if (variant == "gauge") {
      if (cfg.manifold_kind != ManifoldKind::kEuclidean) {
        c.err("quasidistance.variant", "gauge variant is only defined on Euclidean manifolds");
      }
      Eigen::VectorXd wp, wm;
      const bool have_p = fetch_vector(c, *sec, "quasidistance", "w_plus", wp);
      const bool have_m = fetch_vector(c, *sec, "quasidistance", "w_minus", wm);
      if (!have_p || !have_m) {
        c.err("quasidistance", "gauge variant needs w_plus and w_minus");
      } else if (wp.size() != cfg.manifold_dim || wm.size() != cfg.manifold_dim) {
        c.err("quasidistance", "gauge weights must have length manifold.dim");
      } else if (wp.minCoeff() <= 0.0 || wm.minCoeff() <= 0.0) {
        c.err("quasidistance", "gauge weights must be positive");
      } else {
        cfg.qdist = QuasiDistance::gauge(std::move(wp), std::move(wm));
      }
    } else {
      c.err("quasidistance.variant", "must be one of riemannian|scaled|gauge");
    }
  }

  // solver
  if (const json* sec = section(doc, "solver")) {
    check_keys(c, *sec, "solver",
               {"variant", "max_iters", "grad_tol", "sphere_step_cap", "alpha", "t_init",
                "max_halvings", "delta1", "delta2", "lipschitz", "step_policy", "lambda_bar",
                "lambda_tilde", "theta", "b", "lambda_schedule", "lambda_growth",
                "inner_max_iters", "inner_grad_tol", "inner_alpha", "inner_t_init",
                "inner_max_halvings", "lipschitz_region_radius", "lipschitz_samples"});
    std::string variant;
    if (fetch(c, *sec, "solver", "variant", variant)) {
      if (auto v = solver_variant_from(variant)) {
        cfg.solver.variant = *v;
      } else {
        c.err("solver.variant", "must be one of sd-armijo|sd-fixed|prox-inexact");
      }
    }
    fetch(c, *sec, "solver", "max_iters", cfg.solver.max_iters);
    if (cfg.solver.max_iters < 0) c.err("solver.max_iters", "must be >= 0");
    fetch(c, *sec, "solver", "grad_tol", cfg.solver.grad_tol);
    if (cfg.solver.grad_tol <= 0.0) c.err("solver.grad_tol", "must be positive");
    fetch(c, *sec, "solver", "sphere_step_cap", cfg.solver.sphere_step_cap);
    if (cfg.solver.sphere_step_cap <= 0.0) c.err("solver.sphere_step_cap", "must be positive");

    fetch(c, *sec, "solver", "alpha", cfg.solver.armijo.alpha);
    if (!(cfg.solver.armijo.alpha > 0.0 && cfg.solver.armijo.alpha < 1.0)) {
      c.err("solver.alpha", "Armijo alpha must lie in (0,1)");
    }
    fetch(c, *sec, "solver", "t_init", cfg.solver.armijo.t_init);
    if (cfg.solver.armijo.t_init <= 0.0) c.err("solver.t_init", "must be positive");
    fetch(c, *sec, "solver", "max_halvings", cfg.solver.armijo.max_halvings);
    if (cfg.solver.armijo.max_halvings < 0) c.err("solver.max_halvings", "must be >= 0");

    fetch(c, *sec, "solver", "delta1", cfg.solver.fixed.delta1);
    fetch(c, *sec, "solver", "delta2", cfg.solver.fixed.delta2);
    if (cfg.solver.fixed.delta1 <= 0.0) c.err("solver.delta1", "must be positive");
    if (cfg.solver.fixed.delta2 <= 0.0) c.err("solver.delta2", "must be positive");
    double lip = 0.0;
    if (fetch(c, *sec, "solver", "lipschitz", lip)) {
      if (lip <= 0.0) {
        c.err("solver.lipschitz", "must be positive");
      } else {
        cfg.lipschitz = lip;
        cfg.solver.fixed.lipschitz = lip;
      }
    }
    if (cfg.solver.variant == SolverVariant::kSdFixed && cfg.lipschitz) {
      if (*cfg.lipschitz * cfg.solver.fixed.delta1 + cfg.solver.fixed.delta2 >= 1.0) {
        c.err("solver", "fixed-step condition violated: need L*delta1 + delta2 < 1, got " +
                            fmt17(*cfg.lipschitz * cfg.solver.fixed.delta1 +
                                  cfg.solver.fixed.delta2));
      }
    }
    std::string policy;
    if (fetch(c, *sec, "solver", "step_policy", policy)) {
      if (auto p = step_policy_from(policy)) {
        cfg.solver.fixed.policy = *p;
      } else {
        c.err("solver.step_policy", "must be one of midpoint|low|high-minus-margin");
      }
    }

    fetch(c, *sec, "solver", "lambda_bar", cfg.solver.prox.lambda_bar);
    cfg.solver.prox.lambda_tilde = cfg.solver.prox.lambda_bar;
    fetch(c, *sec, "solver", "lambda_tilde", cfg.solver.prox.lambda_tilde);
    if (!(cfg.solver.prox.lambda_bar > 0.0 &&
          cfg.solver.prox.lambda_bar <= cfg.solver.prox.lambda_tilde)) {
      c.err("solver", "need 0 < lambda_bar <= lambda_tilde");
    }
    fetch(c, *sec, "solver", "theta", cfg.solver.prox.theta);
    if (!(cfg.solver.prox.theta > 0.0 && cfg.solver.prox.theta <= 1.0)) {
      c.err("solver.theta", "must lie in (0,1]");
    }
    fetch(c, *sec, "solver", "b", cfg.solver.prox.b);
    if (cfg.solver.variant == SolverVariant::kProxInexact) {
      if (cfg.solver.prox.b <= 1.0) c.err("solver.b", "must exceed 1");
      const double s2 = cfg.qdist.equivalence_constants().second;
      if (cfg.solver.prox.b <= s2) {
        c.err("solver.b", "must exceed the quasi-distance upper equivalence constant s2 = " +
                              fmt17(s2) + " or the relative-error test is unreachable");
      }
    }
    std::string schedule;
    if (fetch(c, *sec, "solver", "lambda_schedule", schedule)) {
      if (schedule == "constant") {
        cfg.solver.prox.schedule = LambdaSchedule::kConstant;
      } else if (schedule == "geometric") {
        cfg.solver.prox.schedule = LambdaSchedule::kGeometric;
      } else {
        c.err("solver.lambda_schedule", "must be constant|geometric");
      }
    }
    fetch(c, *sec, "solver", "lambda_growth", cfg.solver.prox.lambda_growth);
    if (cfg.solver.prox.lambda_growth <= 1.0 &&
        cfg.solver.prox.schedule == LambdaSchedule::kGeometric) {
      c.err("solver.lambda_growth", "geometric schedule needs growth > 1");
    }
    fetch(c, *sec, "solver", "inner_max_iters", cfg.solver.prox.inner_max_iters);
    if (cfg.solver.prox.inner_max_iters < 1) c.err("solver.inner_max_iters", "must be >= 1");
    fetch(c, *sec, "solver", "inner_grad_tol", cfg.solver.prox.inner_grad_tol);
    if (cfg.solver.prox.inner_grad_tol < 0.0) c.err("solver.inner_grad_tol", "must be >= 0");
    fetch(c, *sec, "solver", "inner_alpha", cfg.solver.prox.inner_armijo.alpha);
    fetch(c, *sec, "solver", "inner_t_init", cfg.solver.prox.inner_armijo.t_init);
    fetch(c, *sec, "solver", "inner_max_halvings", cfg.solver.prox.inner_armijo.max_halvings);
    fetch(c, *sec, "solver", "lipschitz_region_radius", cfg.lipschitz_region_radius);
    if (cfg.lipschitz_region_radius <= 0.0) {
      c.err("solver.lipschitz_region_radius", "must be positive");
    }
    fetch(c, *sec, "solver", "lipschitz_samples", cfg.lipschitz_samples);
    if (cfg.lipschitz_samples < 1) c.err("solver.lipschitz_samples", "must be >= 1");
  }

  // diagnostics
  if (const json* sec = section(doc, "diagnostics")) {
    check_keys(c, *sec, "diagnostics",
               {"h1", "h2", "summability", "lemma51", "kl_exponent", "lemma52", "certificate",
                "morse_radius", "assumed_c", "assumed_theta", "assumed_eta", "assumed_rho"});
    fetch(c, *sec, "diagnostics", "h1", cfg.diagnostics.h1);
    fetch(c, *sec, "diagnostics", "h2", cfg.diagnostics.h2);
    fetch(c, *sec, "diagnostics", "summability", cfg.diagnostics.summability);
    fetch(c, *sec, "diagnostics", "lemma51", cfg.diagnostics.lemma51);
    fetch(c, *sec, "diagnostics", "kl_exponent", cfg.diagnostics.kl_exponent);
    fetch(c, *sec, "diagnostics", "lemma52", cfg.diagnostics.lemma52);
    std::string cert;
    if (fetch(c, *sec, "diagnostics", "certificate", cert)) {
      if (auto cs = certificate_from(cert)) {
        cfg.diagnostics.certificate = *cs;
      } else {
        c.err("diagnostics.certificate", "must be morse|noncritical|assumed|none");
      }
    }
    fetch(c, *sec, "diagnostics", "morse_radius", cfg.diagnostics.morse_radius);
    if (cfg.diagnostics.morse_radius <= 0.0) c.err("diagnostics.morse_radius", "must be positive");
    cfg.diagnostics.assumed.form = KLCertificate::Form::kPower;
    cfg.diagnostics.assumed.provenance = KLCertificate::Provenance::kAssumed;
    fetch(c, *sec, "diagnostics", "assumed_c", cfg.diagnostics.assumed.c);
    fetch(c, *sec, "diagnostics", "assumed_theta", cfg.diagnostics.assumed.theta);
    fetch(c, *sec, "diagnostics", "assumed_eta", cfg.diagnostics.assumed.eta);
    fetch(c, *sec, "diagnostics", "assumed_rho", cfg.diagnostics.assumed.rho);
  }

  if (!c.ok()) throw ConfigError(c.take());
  return cfg;
}

Manifold make_manifold(const ExperimentConfig& cfg) {
  switch (cfg.manifold_kind) {
    case ManifoldKind::kEuclidean:
      return Manifold::euclidean(cfg.manifold_dim);
    case ManifoldKind::kSphere:
      return Manifold::sphere(cfg.manifold_dim);
    case ManifoldKind::kSpd:
      return Manifold::spd(cfg.manifold_dim);
  }
  throw ConfigError({"manifold.kind: unknown"});
}

std::unique_ptr<Objective> make_objective(const ExperimentConfig& cfg) {
  try {
    switch (cfg.objective_variant) {
      case ObjectiveVariant::kEuclideanQuadratic:
        return std::make_unique<EuclideanQuadratic>(cfg.quad_q, cfg.quad_center);
      case ObjectiveVariant::kPowerNorm:
        return std::make_unique<PowerNorm>(cfg.manifold_dim, cfg.power_p);
      case ObjectiveVariant::kRayleighSphere:
        return std::make_unique<RayleighSphere>(cfg.rayleigh_a);
      case ObjectiveVariant::kKarcherSpd:
        return std::make_unique<KarcherSpd>(cfg.manifold_dim, cfg.karcher_anchors,
                                            cfg.karcher_weights);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError({std::string("objective: ") + e.what()});
  }
  throw ConfigError({"objective.variant: unknown"});
}

Point initial_point(const ExperimentConfig& cfg, const Manifold& m, const Objective&) {
  if (cfg.x0) {
    try {
      return m.make_point(*cfg.x0);
    } catch (const std::invalid_argument& e) {
      throw ConfigError({std::string("manifold.x0: ") + e.what()});
    }
  }
  return m.random_point(cfg.seed);
}

DiagnosticsReport run_diagnostics(const ExperimentConfig& cfg, const Objective& obj,
                                  const DescentTrace& trace, std::optional<double> lipschitz) {
  DiagnosticsReport rep;
  if (trace.iterations() == 0) return rep;  // nothing to monitor
  const DiagnosticsToggles& tog = cfg.diagnostics;

  if (tog.h1) {
    const double a = constructive_h1_constant(cfg.solver, cfg.qdist, trace);
    rep.h1 = check_h1(trace, a);
    rep.h1_constant = a;
    rep.best_a = best_feasible_h1_constant(trace);
  }
  if (tog.h2) {
    const double b = constructive_h2_constant(cfg.solver, cfg.qdist, trace, lipschitz);
    rep.h2 = check_h2(trace, b);
    rep.h2_constant = b;
    rep.best_b = best_feasible_h2_constant(trace);
  }
  if (tog.summability) rep.summ = summability(trace);
  if (tog.lemma51) {
    std::vector<double> d_steps;
    d_steps.reserve(trace.steps.size());
    bool positive = true;
    for (const TraceStep& s : trace.steps) {
      positive = positive && s.qd_step > 0.0;
      d_steps.push_back(s.qd_step);
    }
    if (positive) rep.lemma51 = lemma51_bound(d_steps);
  }

  double f_star = 0.0;
  bool have_f_star = false;
  if (auto v = obj.known_minimum_value()) {
    f_star = *v;
    have_f_star = true;
  } else if (lipschitz && *lipschitz > 0.0) {
    // The limit value is unknown mid-run; undercut the final value by the
    // largest remaining decrease a gradient step could achieve.
    f_star = trace.final_f - cfg.solver.grad_tol * cfg.solver.grad_tol / (2.0 * *lipschitz);
    have_f_star = true;
  }

  if (tog.kl_exponent && have_f_star) {
    try {
      rep.exponent = estimate_kl_exponent(trace, f_star);
    } catch (const std::invalid_argument&) {
      // too few points above the gap floor; leave the field empty
    }
  }

  if (tog.lemma52 && have_f_star && tog.certificate != CertificateSource::kNone) {
    std::optional<KLCertificate> cert;
    try {
      switch (tog.certificate) {
        case CertificateSource::kMorse: {
          if (!trace.final_point) break;
          MorseCalibration cal = calibrated_morse_certificate(obj, *trace.final_point,
                                                              tog.morse_radius, cfg.seed + 17);
          cert = cal.cert;
          break;
        }
        case CertificateSource::kNoncritical:
          if (!trace.final_point) break;
          cert = noncritical_certificate(obj, *trace.final_point);
          break;
        case CertificateSource::kAssumed:
          cert = tog.assumed;
          break;
        case CertificateSource::kNone:
          break;
      }
    } catch (const std::exception&) {
      cert.reset();  // e.g. final point not near-critical; monitor stays empty
    }
    if (cert) {
      double a = rep.best_a && std::isfinite(*rep.best_a) && *rep.best_a > 0.0
                     ? *rep.best_a
                     : constructive_h1_constant(cfg.solver, cfg.qdist, trace);
      double b = rep.best_b && std::isfinite(*rep.best_b) && *rep.best_b > 0.0
                     ? *rep.best_b
                     : constructive_h2_constant(cfg.solver, cfg.qdist, trace, lipschitz);
      rep.lemma52 = lemma52_monitor(trace, *cert, a, b, f_star);
    }
  }
  return rep;
}

json RunSummary::to_json() const {
  json j;
  j["name"] = name;
  j["status"] = to_string(status);
  if (!failure_reason.empty()) j["failure_reason"] = failure_reason;
  j["iterations"] = iterations;
  j["final_f"] = final_f;
  j["final_grad_norm"] = final_grad_norm;
  j["wall_time_s"] = wall_time_s;
  j["sum_qd_steps"] = sum_qd_steps;
  if (oracle_distance) j["oracle_distance"] = *oracle_distance;
  if (lipschitz_used) j["lipschitz_used"] = *lipschitz_used;

  json d = json::object();
  if (report.h1) {
    d["h1"] = {{"pass", report.h1->pass},
               {"max_violation", report.h1->max_violation},
               {"a", *report.h1_constant},
               {"best_feasible_a", *report.best_a}};
  }
  if (report.h2) {
    d["h2"] = {{"pass", report.h2->pass},
               {"max_violation", report.h2->max_violation},
               {"b", *report.h2_constant},
               {"best_feasible_b", *report.best_b}};
  }
  if (report.summ) {
    d["summability"] = {{"tail_ratio", report.summ->tail_ratio},
                        {"is_cauchy", report.summ->is_cauchy_estimate},
                        {"sum", report.summ->partial_sums.empty()
                                    ? 0.0
                                    : report.summ->partial_sums.back()}};
  }
  if (report.lemma51) {
    d["lemma51"] = {{"pass", report.lemma51->pass},
                    {"lhs", report.lemma51->lhs},
                    {"rhs", report.lemma51->rhs}};
  }
  if (report.exponent) {
    d["kl_exponent"] = {{"alpha_hat", report.exponent->alpha_hat},
                        {"residual", report.exponent->residual},
                        {"points", report.exponent->points_used}};
  }
  if (report.lemma52) {
    d["lemma52"] = {{"first_valid_k", report.lemma52->first_valid_k},
                    {"monitored", report.lemma52->ks.size()},
                    {"excluded", report.lemma52->excluded_ks.size()}};
  }
  if (!d.empty()) j["diagnostics"] = d;
  return j;
}

void atomic_write_file(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp);
    out << contents;
    if (!out) throw IoError("write failed: " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("rename failed: " + tmp + " -> " + path + ": " + ec.message());
}

RunResult run_experiment(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  if (const char* env = std::getenv("RIEMKL_OUT_DIR"); env != nullptr && *env != '\0') {
    cfg.out_dir = env;
  }

  const Manifold m = make_manifold(cfg);
  const std::unique_ptr<Objective> obj = make_objective(cfg);
  const Point x0 = initial_point(cfg, m, *obj);

  std::optional<double> lipschitz = cfg.lipschitz;
  if (!lipschitz) {
    RegionSpec region{x0, cfg.lipschitz_region_radius, cfg.lipschitz_samples};
    lipschitz = lipschitz_estimate(*obj, region, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  }
  SolverConfig scfg = cfg.solver;
  if (scfg.variant == SolverVariant::kSdFixed) {
    scfg.fixed.lipschitz = *lipschitz;
    if (scfg.fixed.lipschitz * scfg.fixed.delta1 + scfg.fixed.delta2 >= 1.0) {
      throw ConfigError({"solver: fixed-step condition violated with estimated L = " +
                         fmt17(scfg.fixed.lipschitz) + ": need L*delta1 + delta2 < 1"});
    }
  }

  const auto t0 = std::chrono::steady_clock::now();
  const DescentTrace trace = solve(*obj, cfg.qdist, x0, scfg);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;

  RunResult result;
  result.trace = trace;
  RunSummary& s = result.summary;
  s.name = cfg.name;
  s.status = trace.status;
  s.failure_reason = trace.failure_reason;
  s.iterations = trace.iterations();
  s.final_f = trace.final_f;
  s.final_grad_norm = trace.final_grad_norm;
  s.wall_time_s = elapsed.count();
  s.sum_qd_steps = trace.sum_qd_steps();
  s.lipschitz_used = lipschitz;
  if (trace.final_point) s.oracle_distance = obj->distance_to_minimizer(*trace.final_point);
  s.report = run_diagnostics(cfg, *obj, trace, lipschitz);

  fs::create_directories(cfg.out_dir);
  result.trace_path = (fs::path(cfg.out_dir) / (cfg.name + "_trace.csv")).string();
  result.summary_path = (fs::path(cfg.out_dir) / (cfg.name + "_summary.json")).string();
  {
    std::ostringstream os;
    write_trace_csv(os, trace);
    atomic_write_file(result.trace_path, os.str());
  }
  atomic_write_file(result.summary_path, s.to_json().dump(2) + "\n");
  return result;
}

// ---- sweep ------------------------------------------------------------

void apply_override(json& doc, const std::string& dotted_key, const json& value) {
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted_key.find('.', start);
    const std::string part = dotted_key.substr(start, dot - start);
    if (part.empty()) throw ConfigError({"override: empty path component in " + dotted_key});
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

std::pair<std::string, json> parse_key_value(const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError({"override must look like key=value, got '" + assignment + "'"});
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;  // plain string
  }
  return {key, value};
}

SweepResult sweep(const json& base_config, std::vector<SweepAxis> axes,
                  const std::string& out_dir_override, int workers) {
  std::sort(axes.begin(), axes.end(),
            [](const SweepAxis& a, const SweepAxis& b) { return a.key < b.key; });
  for (const SweepAxis& ax : axes) {
    if (ax.values.empty()) throw ConfigError({"sweep axis '" + ax.key + "' has no values"});
  }

  std::size_t cells = axes.empty() ? 0 : 1;
  for (const SweepAxis& ax : axes) cells *= ax.values.size();

  std::string base_name = "experiment";
  std::string out_dir = ".";
  if (base_config.contains("experiment")) {
    const json& e = base_config["experiment"];
    if (e.contains("name") && e["name"].is_string()) base_name = e["name"].get<std::string>();
    if (e.contains("out_dir") && e["out_dir"].is_string())
      out_dir = e["out_dir"].get<std::string>();
  }
  if (!out_dir_override.empty()) out_dir = out_dir_override;
  if (const char* env = std::getenv("RIEMKL_OUT_DIR"); env != nullptr && *env != '\0') {
    out_dir = env;
  }

  struct Cell {
    std::vector<json> values;
    std::optional<RunSummary> summary;
    std::string error;
  };
  std::vector<Cell> results(cells);

  auto run_cell = [&](std::size_t ci) {
    Cell& cell = results[ci];
    json doc = base_config;
    std::size_t rem = ci;
    // lexicographic order: the last axis varies fastest
    std::vector<std::size_t> idx(axes.size(), 0);
    for (std::size_t a = axes.size(); a-- > 0;) {
      idx[a] = rem % axes[a].values.size();
      rem /= axes[a].values.size();
    }
    cell.values.reserve(axes.size());
    for (std::size_t a = 0; a < axes.size(); ++a) {
      cell.values.push_back(axes[a].values[idx[a]]);
      apply_override(doc, axes[a].key, axes[a].values[idx[a]]);
    }
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "_c%04zu", ci);
    apply_override(doc, "experiment.name", base_name + suffix);
    apply_override(doc, "experiment.out_dir", out_dir);
    try {
      ExperimentConfig cfg = parse_config_json(doc);
      cell.summary = run_experiment(cfg).summary;
    } catch (const std::exception& e) {
      std::string msg = e.what();
      for (char& ch : msg) {
        if (ch == '\n' || ch == ',') ch = ' ';
      }
      cell.error = msg;
    }
  };

  int pool = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
  pool = std::max(1, std::min<int>(pool, static_cast<int>(std::max<std::size_t>(cells, 1))));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(pool));
  for (int t = 0; t < pool; ++t) {
    threads.emplace_back([&]() {
      for (std::size_t ci = next.fetch_add(1); ci < cells; ci = next.fetch_add(1)) run_cell(ci);
    });
  }
  for (std::thread& t : threads) t.join();

  std::ostringstream os;
  os << "cell";
  for (const SweepAxis& ax : axes) os << ',' << ax.key;
  os << ",status,iterations,final_f,final_grad_norm,sum_qd_steps,oracle_distance,"
        "h1_pass,h2_pass,tail_ratio,is_cauchy,alpha_hat,lemma52_first_valid\n";
  int failures = 0;
  for (std::size_t ci = 0; ci < cells; ++ci) {
    const Cell& cell = results[ci];
    os << ci;
    for (const json& v : cell.values) os << ',' << v.dump();
    if (cell.summary) {
      const RunSummary& s = *cell.summary;
      os << ',' << to_string(s.status) << ',' << s.iterations << ',' << fmt17(s.final_f) << ','
         << fmt17(s.final_grad_norm) << ',' << fmt17(s.sum_qd_steps) << ','
         << (s.oracle_distance ? fmt17(*s.oracle_distance) : "") << ','
         << (s.report.h1 ? (s.report.h1->pass ? "1" : "0") : "") << ','
         << (s.report.h2 ? (s.report.h2->pass ? "1" : "0") : "") << ','
         << (s.report.summ ? fmt17(s.report.summ->tail_ratio) : "") << ','
         << (s.report.summ ? (s.report.summ->is_cauchy_estimate ? "1" : "0") : "") << ','
         << (s.report.exponent ? fmt17(s.report.exponent->alpha_hat) : "") << ','
         << (s.report.lemma52 ? std::to_string(s.report.lemma52->first_valid_k) : "");
    } else {
      ++failures;
      os << ",error: " << cell.error << ",,,,,,,,,,,";
    }
    os << '\n';
  }

  fs::create_directories(out_dir);
  SweepResult res;
  res.table_path = (fs::path(out_dir) / (base_name + "_sweep.csv")).string();
  res.cells = static_cast<int>(cells);
  res.failures = failures;
  atomic_write_file(res.table_path, os.str());
  return res;
}

// ---- plots ------------------------------------------------------------

PlotKind parse_plot_kind(const std::string& name) {
  if (name == "fgap") return PlotKind::kFGap;
  if (name == "loglog") return PlotKind::kLogLog;
  if (name == "cumqd") return PlotKind::kCumQd;
  throw ConfigError({"plot kind must be fgap|loglog|cumqd, got '" + name + "'"});
}

namespace {

const char* plot_kind_name(PlotKind k) {
  switch (k) {
    case PlotKind::kFGap:
      return "fgap";
    case PlotKind::kLogLog:
      return "loglog";
    case PlotKind::kCumQd:
      return "cumqd";
  }
  return "plot";
}

void require_traces(const std::vector<std::string>& trace_paths) {
  if (trace_paths.empty()) throw ConfigError({"plot: no trace files given"});
  for (const std::string& p : trace_paths) {
    if (!fs::exists(p)) throw IoError("plot: missing trace file: " + p);
  }
}

DescentTrace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace: " + path);
  return read_trace_csv(in);
}

}  // namespace

void emit_plot_script(const std::vector<std::string>& trace_paths, PlotKind kind,
                      const std::string& script_path, std::optional<double> f_star) {
  require_traces(trace_paths);
  const fs::path script_dir = fs::absolute(fs::path(script_path)).parent_path();

  std::ostringstream os;
  os << "#!/usr/bin/env python3\n";
  os << "# " << plot_kind_name(kind) << " plot over solver trace CSVs; paths are relative to\n";
  os << "# this script's directory.\n";
  os << "import csv\nimport os\n\nimport matplotlib\nmatplotlib.use(\"Agg\")\n";
  os << "import matplotlib.pyplot as plt\n\n";
  os << "HERE = os.path.dirname(os.path.abspath(__file__))\n";
  os << "TRACES = [\n";
  for (const std::string& p : trace_paths) {
    std::error_code ec;
    fs::path rel = fs::relative(fs::absolute(p), script_dir, ec);
    os << "    \"" << (ec ? fs::absolute(p).string() : rel.string()) << "\",\n";
  }
  os << "]\n";
  if (f_star) {
    os << "F_STAR = " << fmt17(*f_star) << "\n\n";
  } else {
    os << "F_STAR = None  # defaults to the smallest f seen across traces\n\n";
  }
  os << "def load(path):\n"
        "    with open(os.path.join(HERE, path)) as fh:\n"
        "        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(fh)]\n\n"
        "data = {p: load(p) for p in TRACES}\n"
        "if F_STAR is None:\n"
        "    F_STAR = min(r[\"f\"] for rows in data.values() for r in rows)\n\n"
        "fig, ax = plt.subplots(figsize=(7, 5))\n"
        "for path, rows in data.items():\n"
        "    label = os.path.basename(path)\n";
  switch (kind) {
    case PlotKind::kFGap:
      os << "    pts = [(r[\"iter\"], r[\"f\"] - F_STAR) for r in rows if r[\"f\"] > F_STAR]\n"
            "    ax.semilogy([p[0] for p in pts], [p[1] for p in pts], label=label)\n"
            "ax.set_xlabel(\"iteration\")\n"
            "ax.set_ylabel(\"f - f*\")\n";
      break;
    case PlotKind::kLogLog:
      os << "    pts = [(r[\"f\"] - F_STAR, r[\"grad_norm\"]) for r in rows\n"
            "           if r[\"f\"] > F_STAR and r[\"grad_norm\"] > 0]\n"
            "    pts.sort()\n"
            "    ax.loglog([p[0] for p in pts], [p[1] for p in pts], marker=\".\", label=label)\n"
            "ax.set_xlabel(\"f - f*\")\n"
            "ax.set_ylabel(\"gradient norm\")  # slope = KL exponent\n";
      break;
    case PlotKind::kCumQd:
      os << "    ax.plot([r[\"iter\"] for r in rows], [r[\"cum_qd\"] for r in rows], "
            "label=label)\n"
            "ax.set_xlabel(\"iteration\")\n"
            "ax.set_ylabel(\"cumulative quasi-distance step\")\n";
      break;
  }
  os << "ax.legend()\n"
        "ax.grid(True, which=\"both\", alpha=0.3)\n"
        "out = os.path.join(HERE, \""
     << plot_kind_name(kind)
     << ".png\")\n"
        "fig.savefig(out, dpi=150, bbox_inches=\"tight\")\n"
        "print(out)\n";

  fs::create_directories(script_dir);
  atomic_write_file(script_path, os.str());
}

namespace {

struct Series {
  std::vector<double> x, y;
};

double nice_log(double v) { return std::log10(v); }

}  // namespace

void render_plot_svg(const std::vector<std::string>& trace_paths, PlotKind kind,
                     const std::string& svg_path, std::optional<double> f_star) {
  require_traces(trace_paths);
  std::vector<DescentTrace> traces;
  traces.reserve(trace_paths.size());
  for (const std::string& p : trace_paths) traces.push_back(load_trace(p));

  double fstar = f_star.value_or(std::numeric_limits<double>::infinity());
  if (!f_star) {
    for (const DescentTrace& t : traces) fstar = std::min(fstar, t.final_f);
  }

  const bool logx = kind == PlotKind::kLogLog;
  const bool logy = kind != PlotKind::kCumQd;
  std::vector<Series> series;
  for (const DescentTrace& t : traces) {
    Series s;
    double cum = 0.0;
    for (int k = 0; k <= t.iterations(); ++k) {
      if (k < t.iterations()) cum += t.steps[static_cast<std::size_t>(k)].qd_step;
      const double gap = t.f_at(k) - fstar;
      switch (kind) {
        case PlotKind::kFGap:
          if (gap > 0) {
            s.x.push_back(k);
            s.y.push_back(gap);
          }
          break;
        case PlotKind::kLogLog:
          if (gap > 0 && t.grad_norm_at(k) > 0) {
            s.x.push_back(gap);
            s.y.push_back(t.grad_norm_at(k));
          }
          break;
        case PlotKind::kCumQd:
          s.x.push_back(k);
          s.y.push_back(k == 0 ? 0.0 : cum);
          break;
      }
    }
    series.push_back(std::move(s));
  }

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const Series& s : series) {
    for (double v : s.x) {
      xmin = std::min(xmin, v);
      xmax = std::max(xmax, v);
    }
    for (double v : s.y) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  }
  if (!std::isfinite(xmin) || !std::isfinite(ymin)) {
    throw ConfigError({"plot: traces contain no plottable points for this kind"});
  }
  if (logx) {
    xmin = nice_log(std::max(xmin, 1e-300));
    xmax = nice_log(std::max(xmax, 1e-300));
  }
  if (logy) {
    ymin = nice_log(std::max(ymin, 1e-300));
    ymax = nice_log(std::max(ymax, 1e-300));
  }
  if (xmax - xmin < 1e-12) xmax = xmin + 1.0;
  if (ymax - ymin < 1e-12) ymax = ymin + 1.0;

  const double width = 640, height = 480, mleft = 70, mright = 20, mtop = 20, mbottom = 50;
  const auto sx = [&](double v) {
    if (logx) v = nice_log(std::max(v, 1e-300));
    return mleft + (v - xmin) / (xmax - xmin) * (width - mleft - mright);
  };
  const auto sy = [&](double v) {
    if (logy) v = nice_log(std::max(v, 1e-300));
    return height - mbottom - (v - ymin) / (ymax - ymin) * (height - mtop - mbottom);
  };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<rect x=\"" << mleft << "\" y=\"" << mtop << "\" width=\"" << width - mleft - mright
     << "\" height=\"" << height - mtop - mbottom
     << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const Series& s = series[i];
    os << "<polyline fill=\"none\" stroke=\"" << colors[i % 8] << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      os << sx(s.x[k]) << ',' << sy(s.y[k]) << ' ';
    }
    os << "\"/>\n";
  }
  const char* xlabel = kind == PlotKind::kLogLog ? "f - f* (log10)" : "iteration";
  const char* ylabel = kind == PlotKind::kFGap     ? "f - f* (log10)"
                       : kind == PlotKind::kLogLog ? "grad norm (log10)"
                                                   : "cumulative D-step";
  os << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
     << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel << "</text>\n";
  os << "<text x=\"16\" y=\"" << height / 2 << "\" text-anchor=\"middle\" font-size=\"13\" "
     << "transform=\"rotate(-90 16 " << height / 2 << ")\">" << ylabel << "</text>\n";
  // axis range labels
  os << "<text x=\"" << mleft << "\" y=\"" << height - mbottom + 16
     << "\" font-size=\"11\" text-anchor=\"middle\">" << xmin << "</text>\n";
  os << "<text x=\"" << width - mright << "\" y=\"" << height - mbottom + 16
     << "\" font-size=\"11\" text-anchor=\"middle\">" << xmax << "</text>\n";
  os << "<text x=\"" << mleft - 6 << "\" y=\"" << height - mbottom
     << "\" font-size=\"11\" text-anchor=\"end\">" << ymin << "</text>\n";
  os << "<text x=\"" << mleft - 6 << "\" y=\"" << mtop + 10
     << "\" font-size=\"11\" text-anchor=\"end\">" << ymax << "</text>\n";
  os << "</svg>\n";

  const fs::path dir = fs::absolute(fs::path(svg_path)).parent_path();
  fs::create_directories(dir);
  atomic_write_file(svg_path, os.str());
}

}  // namespace riemkl
