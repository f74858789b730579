#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "brp/rough_path.hpp"

namespace brp::harness {

using Json = nlohmann::json;

// ---------------------------------------------------------------- lipschitz

struct LipschitzConfig {
  double p = 2.5;
  double gamma = 2.8;  // field regularity, must exceed p
  int d = 2;
  int e = 2;
  int segments = 96;  // driver pieces per unit time
  int degree = 3;     // polynomial degree of the field
  double path_amp = 0.35;
  double field_cap = 0.25;  // per-direction sup norm cap
  double box_radius = 4.0;
  std::vector<double> hs = {0.125, 0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625};
  // the top-tree sweep scales h down so the perturbation never dominates the
  // control; otherwise omega itself grows with h and bends the slope
  double top_h_scale = 0.015625;
  std::vector<int> t_blocks = {1, 2, 4};
  double slope_tol = 0.05;
  double tscale_residual_tol = 0.25;  // in log units
  std::uint64_t seed = 0;
  int threads = 1;
};

struct SweepPoint {
  double h = 0.0;
  double lhs = 0.0;
  double ingredient = 0.0;  // the matching right-hand factor at this h
};

struct SweepResult {
  std::string name;
  std::vector<SweepPoint> points;
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
  double m_hat = 0.0;  // geometric mean of lhs / ingredient
  bool pass = false;
};

struct TScalePoint {
  int blocks = 0;
  double omega = 0.0;  // omega(0, T) of the base pair control
  double m_hat = 0.0;
};

struct LipschitzReport {
  std::vector<SweepResult> sweeps;
  double zero_h_lhs = 0.0;
  bool zero_h_identical = false;
  bool lambda_exact = false;   // rational pipeline, bit equality
  double lambda_drift = 0.0;   // float pipeline with lambda = 2
  std::vector<TScalePoint> tscale;
  double tscale_slope = 0.0;
  double tscale_residual = 0.0;
  bool tscale_pass = false;
  bool pass = false;
};

LipschitzReport lipschitz_experiment(const LipschitzConfig& cfg);

Json lipschitz_config_json(const LipschitzConfig& cfg);
LipschitzConfig lipschitz_config_from_json(const Json& j);
Json lipschitz_report_json(const LipschitzConfig& cfg, const LipschitzReport& rep);
std::string lipschitz_sweeps_csv(const LipschitzReport& rep);
std::string lipschitz_tscale_csv(const LipschitzReport& rep);

// --------------------------------------------------------------- ode bounds

struct OdeBoundsConfig {
  int instances = 100;
  int max_e = 3;
  int max_k = 5;  // driver components
  int degree = 3;
  double box_radius = 5.0;
  double slack = 1e-6;
  int adversarial_index = 7;  // gets one driver component pushed to 1-variation ~ 5
  std::uint64_t seed = 0;
  int threads = 1;
};

struct OdeInstanceRow {
  int index = 0;
  int e = 0;
  int k = 0;
  double lhs1 = 0.0, rhs1 = 0.0;
  double lhs2 = 0.0, rhs2 = 0.0;
  double max_one_variation = 0.0;
  bool pass = false;
  std::string error;
};

struct OdeBoundsReport {
  std::vector<OdeInstanceRow> rows;
  int passes = 0;
  double max_one_variation = 0.0;
  bool pass = false;
};

OdeBoundsReport ode_bounds_experiment(const OdeBoundsConfig& cfg);

Json ode_bounds_config_json(const OdeBoundsConfig& cfg);
OdeBoundsConfig ode_bounds_config_from_json(const Json& j);
Json ode_bounds_report_json(const OdeBoundsConfig& cfg, const OdeBoundsReport& rep);
std::string ode_bounds_csv(const OdeBoundsReport& rep);

// -------------------------------------------------------------- convergence

struct ConvergenceConfig {
  std::vector<double> ps = {1.5, 2.5};
  int defect_segments = 256;
  std::vector<int> meshes = {64, 128, 256, 512, 1024, 2048};
  double slope_slack = 0.15;   // defect slope tolerance below (floor(p)+1)/p
  double order_slack = 0.2;    // backend decay order tolerance
  double agree_tol = 1e-6;     // backend gap at the finest mesh
  std::uint64_t seed = 0;
  int threads = 1;
};

struct DefectRow {
  double p = 0.0;
  double slope = 0.0;
  double residual = 0.0;
  std::size_t points = 0;
  bool exact = false;
  double threshold = 0.0;
  bool pass = false;
  std::vector<std::pair<double, double>> samples;  // (omega, |defect|)
};

struct BackendRow {
  double p = 0.0;
  std::vector<std::pair<int, double>> samples;  // (mesh, sup discrepancy)
  double order = 0.0;
  double finest = 0.0;
  double order_threshold = 0.0;
  bool pass = false;
};

struct ConvergenceReport {
  std::vector<DefectRow> defects;
  std::vector<BackendRow> backends;
  bool pass = false;
};

ConvergenceReport convergence_experiment(const ConvergenceConfig& cfg);

Json convergence_config_json(const ConvergenceConfig& cfg);
ConvergenceConfig convergence_config_from_json(const Json& j);
Json convergence_report_json(const ConvergenceConfig& cfg, const ConvergenceReport& rep);
std::string convergence_defect_csv(const ConvergenceReport& rep);
std::string convergence_backend_csv(const ConvergenceReport& rep);

// ------------------------------------------------------------------ shared

// Full table of the control omega(i,j) = sum over the given paths of the
// p-variation p-th power over [t_i, t_j]; entries below the diagonal are
// zero. One O(n^2) relaxation pass per left endpoint.
std::vector<std::vector<double>> omega_table(const BranchedRoughPath<double>& a,
                                             const BranchedRoughPath<double>* b, double p);

// rho against a precomputed control table, 0/0 counted as 0.
double rho_from_table(const BranchedRoughPath<double>& x1, const BranchedRoughPath<double>& x2,
                      const std::vector<std::vector<double>>& om);

void parallel_for(int n, int threads, const std::function<void(int)>& body);

// Report wrapper: config and hashes every experiment report embeds.
Json report_envelope(const Json& config, int hopf_n, int hopf_d);

}  // namespace brp::harness
