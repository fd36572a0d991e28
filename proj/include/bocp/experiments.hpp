#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "abstract.hpp"
#include "kkt.hpp"
#include "solvers.hpp"
#include "spectral.hpp"

namespace bocp {

enum class PreconditionerKind { exact, approx };

// How eps is compared with the preconditioned residual:
//   norm  - sqrt((r_k, B r_k) / (r_0, B r_0)) <= eps
//   inner - (r_k, B r_k) / (r_0, B r_0) <= eps
enum class StopRule { norm, inner };

StopRule parse_stop_rule(const std::string& name);
std::string to_string(StopRule rule);

PreconditionerKind parse_preconditioner(const std::string& name);
std::string to_string(PreconditionerKind kind);

struct ExperimentConfig {
  std::vector<double> alphas;
  std::vector<double> hs;
  double eps = 1e-12;
  std::uint64_t seed = 20240101;
  PreconditionerKind preconditioner = PreconditionerKind::approx;
  StopRule stop_rule = StopRule::norm;
  Variant variant = Variant::boundary_obs;
  std::filesystem::path output_dir = ".";
  Index max_iter = 2000;
  bool estimate_condition = true;
  bool write_files = true;

  // Throws std::invalid_argument for alpha <= 0 or h not of the form 2^-k.
  void validate() const;

  // Tolerance on the inner-product ratio tracked by minres().
  double minres_tolerance() const { return stop_rule == StopRule::norm ? eps * eps : eps; }
};

// 1/h as a cell count; throws unless h = 2^-k, k >= 0.
Index cells_for_h(double h);

// "1e-06" style label used in file names.
std::string alpha_label(double alpha);

struct TableRow {
  double alpha = 0.0;
  double h = 0.0;
  Index iterations = 0;
  std::optional<double> cond_estimate;
  double wall_time_ms = 0.0;
  bool converged = false;
  std::string message;
};

// Observation data of the demo problem: state generated by the control
// 4x(1-x) + y.
double demo_true_control(double x, double y);

// One preconditioned MINRES solve on the demo data from a seeded random
// initial guess.
TableRow solve_cell(const ExperimentConfig& config, double alpha, double h,
                    std::vector<double>* residual_history = nullptr);

// Writes minres_table.csv and residual_<alpha>_<n>.csv.
std::vector<TableRow> run_minres_table(const ExperimentConfig& config);

struct DemoResult {
  SolverReport report;
  double boundary_misfit = 0.0;  // ||u - u_data||_obs / ||u_data||_obs
  Vector control;
  Vector state;
  Vector multiplier;
};

// config.alphas / config.hs default to 1e-6 and 1/32. When true_control is
// set it replaces 4x(1-x) + y.
DemoResult run_demo(const ExperimentConfig& config, const ScalarField& true_control = {});

struct SpectrumCell {
  SpectrumReport report;
  ContainmentVerdict verdict;
};

// Writes spectrum_<alpha>.csv per cell (under n<cells>/ when several h are
// given) and spectrum_summary.json.
std::vector<SpectrumCell> run_spectrum_sweep(const ExperimentConfig& config,
                                             const SpectrumOptions& options = {});

struct SmootherRow {
  double alpha = 0.0;  // 0 for the mass-matrix table
  double h = 0.0;
  int sweeps = 0;
  ConditionEstimate estimate;
};

struct SmootherTables {
  std::vector<SmootherRow> gauss_seidel;
  std::vector<SmootherRow> multigrid;
};

// gs_table.csv (h, sweeps, cond_estimate, iterations) for 1-3 sweeps at
// each h, and mg_table.csv (alpha, h, cond_estimate, iterations).
SmootherTables run_smoother_tables(const ExperimentConfig& config);

struct AbstractInstanceResult {
  std::uint64_t seed = 0;
  Index n_control = 0;
  Index n_state = 0;
  Index ker_k_dim = 0;
  double alpha = 0.0;
  double min_abs = 0.0;
  double max_abs = 0.0;
  double kappa = 0.0;
  bool contained = false;
  bool bound_ok = false;     // kappa <= r3/r2 + 1e-6
  bool equality_ok = true;   // r2 and r3 attained when ker K is nontrivial
};

struct ExampleResult {
  std::string name;
  bool assumptions_ok = false;
  std::vector<std::string> failures;
  StabilityReport stability;
  double kappa = 0.0;
  bool contained = false;
};

struct AbstractVerification {
  std::vector<AbstractInstanceResult> instances;
  std::vector<ExampleResult> examples;
  bool ok() const;
};

// n_instances random triples (dims 3-40) over config.alphas (default
// {1, 1e-3, 1e-6, 1e-9}) plus the three example triples on the coarsest
// h of config.hs (default 1/4). Writes abstract_verify.csv and
// abstract_examples.json.
AbstractVerification run_abstract_verify(const ExperimentConfig& config, Index n_instances = 50);

}  // namespace bocp
