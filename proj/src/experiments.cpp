#include <bocp/experiments.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

#include <bocp/assembly.hpp>
#include <bocp/io.hpp>

namespace bocp {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<double> or_default(const std::vector<double>& values, std::vector<double> fallback) {
  return values.empty() ? fallback : values;
}

// Right-hand side of the state row for the demo data on this discretization.
Vector demo_rhs(const Discretization& d, const ScalarField& true_control) {
  if (d.variant == Variant::laplace_state) {
    // -Laplacian with pure Neumann data has no unique forward solution; use
    // the control profile itself as observation data.
    return d.observation_rhs(true_control);
  }
  Vector f = project_dg(d.grid, d.dg, true_control);
  return manufacture_observation(*d.blocks, f);
}

LinearOperator make_preconditioner(const ExperimentConfig& config, const KktSystem& kkt,
                                   const MeshHierarchy* hierarchy) {
  if (config.preconditioner == PreconditionerKind::exact) {
    return ExactPreconditioner(kkt.shared_blocks(), kkt.alpha()).op();
  }
  return build_approx_preconditioner(kkt, *hierarchy, config.variant);
}

TableRow solve_on(const ExperimentConfig& config, const Discretization& d, const MeshHierarchy* hierarchy,
                  const Vector& rhs, double alpha, double h, std::vector<double>* history) {
  TableRow row;
  row.alpha = alpha;
  row.h = h;
  auto start = Clock::now();
  try {
    KktSystem kkt(d.blocks, alpha, rhs);
    auto precond = make_preconditioner(config, kkt, hierarchy);
    Vector x0 = random_vector(kkt.size(), config.seed);
    auto report = minres(kkt.op(), precond, kkt.rhs(), x0, config.minres_tolerance(), config.max_iter);
    row.iterations = report.iterations;
    row.converged = report.converged;
    row.message = report.message;
    if (history) {
      *history = report.residual_history;
    }
    row.wall_time_ms = elapsed_ms(start);
    if (config.estimate_condition) {
      ConditionOptions options;
      options.seed = config.seed;
      row.cond_estimate = estimate_condition_cg_normal(kkt.op(), precond, options).kappa;
    }
  } catch (const std::exception& e) {
    row.converged = false;
    row.message = e.what();
    row.wall_time_ms = elapsed_ms(start);
  }
  return row;
}

std::filesystem::path cell_dir(const ExperimentConfig& config, const std::vector<double>& hs, double h) {
  if (hs.size() <= 1) {
    return config.output_dir;
  }
  return config.output_dir / ("n" + std::to_string(cells_for_h(h)));
}

CsvTable sample_grid(Index samples, const std::function<double(double, double)>& field) {
  CsvTable t{{"x", "y", "value"}, {}};
  for (Index j = 0; j <= samples; j++) {
    for (Index i = 0; i <= samples; i++) {
      double x = static_cast<double>(i) / samples;
      double y = static_cast<double>(j) / samples;
      t.rows.push_back({format_double(x), format_double(y), format_double(field(x, y))});
    }
  }
  return t;
}

CsvTable sample_boundary(Index samples, const std::function<double(double, double)>& field) {
  CsvTable t{{"x", "y", "value"}, {}};
  auto add = [&](double x, double y) {
    t.rows.push_back({format_double(x), format_double(y), format_double(field(x, y))});
  };
  for (Index i = 0; i < samples; i++) {
    double s = static_cast<double>(i) / samples;
    add(s, 0.0);
    add(1.0, s);
    add(1.0 - s, 1.0);
    add(0.0, 1.0 - s);
  }
  return t;
}

}  // namespace

PreconditionerKind parse_preconditioner(const std::string& name) {
  if (name == "exact") {
    return PreconditionerKind::exact;
  }
  if (name == "approx") {
    return PreconditionerKind::approx;
  }
  throw std::invalid_argument("unknown preconditioner '" + name + "' (expected exact or approx)");
}

std::string to_string(PreconditionerKind kind) {
  return kind == PreconditionerKind::exact ? "exact" : "approx";
}

StopRule parse_stop_rule(const std::string& name) {
  if (name == "norm") {
    return StopRule::norm;
  }
  if (name == "inner") {
    return StopRule::inner;
  }
  throw std::invalid_argument("unknown stopping rule '" + name + "' (expected norm or inner)");
}

std::string to_string(StopRule rule) { return rule == StopRule::norm ? "norm" : "inner"; }

Index cells_for_h(double h) {
  if (!(h > 0.0) || h > 1.0) {
    throw std::invalid_argument("h must lie in (0, 1]");
  }
  double n = 1.0 / h;
  double rounded = std::round(n);
  auto cells = static_cast<Index>(rounded);
  if (std::abs(n - rounded) > 1e-9 * rounded || (cells & (cells - 1)) != 0) {
    throw std::invalid_argument("h must be a power of two, got " + format_double(h));
  }
  return cells;
}

std::string alpha_label(double alpha) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", alpha);
  return buf;
}

void ExperimentConfig::validate() const {
  for (double a : alphas) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw std::invalid_argument("alpha must be positive, got " + format_double(a));
    }
  }
  for (double h : hs) {
    cells_for_h(h);
  }
  if (!(eps > 0.0)) {
    throw std::invalid_argument("eps must be positive");
  }
  if (max_iter < 1) {
    throw std::invalid_argument("max_iter must be positive");
  }
}

double demo_true_control(double x, double y) { return 4.0 * x * (1.0 - x) + y; }

TableRow solve_cell(const ExperimentConfig& config, double alpha, double h, std::vector<double>* history) {
  config.validate();
  auto n = cells_for_h(h);
  auto d = discretize(n, config.variant);
  std::optional<MeshHierarchy> hierarchy;
  if (config.preconditioner == PreconditionerKind::approx) {
    hierarchy = multigrid_hierarchy(n);
  }
  Vector rhs = demo_rhs(d, demo_true_control);
  return solve_on(config, d, hierarchy ? &*hierarchy : nullptr, rhs, alpha, h, history);
}

std::vector<TableRow> run_minres_table(const ExperimentConfig& config) {
  config.validate();
  std::vector<TableRow> rows;
  CsvTable table{{"alpha", "h", "iterations", "cond_estimate", "wall_time_ms"}, {}};
  if (!config.alphas.empty()) {
    for (double h : config.hs) {
      auto n = cells_for_h(h);
      auto d = discretize(n, config.variant);
      std::optional<MeshHierarchy> hierarchy;
      if (config.preconditioner == PreconditionerKind::approx) {
        hierarchy = multigrid_hierarchy(n);
      }
      Vector rhs = demo_rhs(d, demo_true_control);
      for (double alpha : config.alphas) {
        std::vector<double> history;
        auto row = solve_on(config, d, hierarchy ? &*hierarchy : nullptr, rhs, alpha, h, &history);
        if (config.write_files) {
          CsvTable hist{{"iteration", "ratio"}, {}};
          for (std::size_t k = 0; k < history.size(); k++) {
            hist.rows.push_back({std::to_string(k), format_double(history[k])});
          }
          write_csv(config.output_dir / ("residual_" + alpha_label(alpha) + "_" + std::to_string(n) + ".csv"),
                    hist);
        }
        table.rows.push_back({format_double(alpha), format_double(h),
                              row.converged ? std::to_string(row.iterations) : "nan",
                              row.cond_estimate ? format_double(*row.cond_estimate) : "nan",
                              format_double(row.wall_time_ms)});
        rows.push_back(std::move(row));
      }
    }
  }
  if (config.write_files) {
    write_csv(config.output_dir / "minres_table.csv", table);
  }
  return rows;
}

DemoResult run_demo(const ExperimentConfig& config, const ScalarField& true_control) {
  config.validate();
  if (config.variant == Variant::laplace_state) {
    throw std::invalid_argument("the demo needs a forward model; laplace_state has none");
  }
  double alpha = or_default(config.alphas, {1e-6}).front();
  double h = or_default(config.hs, {1.0 / 32.0}).front();
  auto n = cells_for_h(h);
  auto d = discretize(n, config.variant);
  ScalarField control = true_control ? true_control : ScalarField(demo_true_control);

  Vector f_true = project_dg(d.grid, d.dg, control);
  Vector u_data = forward_solve(*d.blocks, f_true);
  Vector rhs = d.blocks->observation * u_data;

  KktSystem kkt(d.blocks, alpha, rhs);
  LinearOperator precond;
  if (config.preconditioner == PreconditionerKind::exact) {
    precond = ExactPreconditioner(d.blocks, alpha).op();
  } else {
    precond = build_approx_preconditioner(kkt, multigrid_hierarchy(n), config.variant);
  }
  Vector x0 = random_vector(kkt.size(), config.seed);

  DemoResult result;
  result.report = minres(kkt.op(), precond, kkt.rhs(), x0, config.minres_tolerance(), config.max_iter);
  const auto& l = kkt.layout();
  const Vector& x = result.report.solution;
  result.control = x.segment(0, l.n_f);
  result.state = x.segment(l.u_offset(), l.n_u);
  result.multiplier = x.segment(l.w_offset(), l.n_w);

  const auto& k = d.blocks->observation;
  Vector diff = result.state - u_data;
  result.boundary_misfit = std::sqrt(diff.dot(k * diff) / u_data.dot(k * u_data));

  if (config.write_files) {
    Index samples = 2 * n;
    const auto& out = config.output_dir;
    write_csv(out / "u.csv", sample_grid(samples, [&](double px, double py) {
                return evaluate_bfs(d.grid, d.bfs, result.state, px, py).value;
              }));
    write_csv(out / "f.csv", sample_grid(samples, [&](double px, double py) {
                return evaluate_dg(d.grid, d.dg, result.control, px, py);
              }));
    write_csv(out / "w.csv", sample_grid(samples, [&](double px, double py) {
                return evaluate_dg(d.grid, d.dg, result.multiplier, px, py);
              }));
    write_csv(out / "f_true.csv", sample_grid(samples, control));
    auto data = [&](double px, double py) { return evaluate_bfs(d.grid, d.bfs, u_data, px, py).value; };
    write_csv(out / "d.csv", config.variant == Variant::full_obs ? sample_grid(samples, data)
                                                                 : sample_boundary(4 * n, data));
    nlohmann::json summary;
    summary["alpha"] = alpha;
    summary["h"] = h;
    summary["variant"] = to_string(config.variant);
    summary["iterations"] = result.report.iterations;
    summary["converged"] = result.report.converged;
    summary["boundary_misfit"] = result.boundary_misfit;
    write_file_atomic(out / "demo_summary.json", summary.dump(2) + "\n");
  }
  return result;
}

std::vector<SpectrumCell> run_spectrum_sweep(const ExperimentConfig& config, const SpectrumOptions& options) {
  config.validate();
  auto intervals = theorem_intervals();
  std::vector<SpectrumCell> cells;
  nlohmann::json summary;
  summary["r_roots"] = {intervals.r1, intervals.r2, intervals.r3};
  summary["q_roots"] = {intervals.q1, intervals.q2};
  summary["kappa_bound"] = intervals.kappa_bound();
  summary["variant"] = to_string(config.variant);
  summary["cells"] = nlohmann::json::array();
  double kappa_max = 0.0;
  bool all_contained = true;

  for (double h : config.hs) {
    if (config.alphas.empty()) {
      break;
    }
    auto d = discretize(cells_for_h(h), config.variant);
    for (double alpha : config.alphas) {
      KktSystem kkt(d.blocks, alpha, Vector::Zero(d.blocks->n_state()));
      ExactPreconditioner precond(d.blocks, alpha);
      SpectrumCell cell;
      cell.report = generalized_spectrum(kkt, precond, options);
      cell.report.h = h;
      cell.verdict = check_containment(cell.report, intervals);
      kappa_max = std::max(kappa_max, cell.report.kappa);
      all_contained = all_contained && cell.verdict.contained;
      summary["cells"].push_back(spectrum_summary(cell.report, intervals, cell.verdict));
      if (config.write_files && !cell.report.eigenvalues.empty()) {
        std::ostringstream os;
        write_spectrum_csv(os, cell.report);
        write_file_atomic(cell_dir(config, config.hs, h) / ("spectrum_" + alpha_label(alpha) + ".csv"), os.str());
      }
      cells.push_back(std::move(cell));
    }
  }
  summary["kappa_max"] = kappa_max;
  summary["all_contained"] = all_contained;
  if (config.write_files) {
    write_file_atomic(config.output_dir / "spectrum_summary.json", summary.dump(2) + "\n");
  }
  return cells;
}

SmootherTables run_smoother_tables(const ExperimentConfig& config) {
  config.validate();
  SmootherTables tables;
  ConditionOptions options;
  options.seed = config.seed;

  CsvTable gs{{"h", "sweeps", "cond_estimate", "iterations"}, {}};
  for (double h : config.hs) {
    auto grid = build_grid(cells_for_h(h));
    auto dg = dof_map_dg(grid);
    auto mass = std::make_shared<const SparseMatrix>(assemble_mass_dg(grid, dg));
    for (int sweeps = 1; sweeps <= 3; sweeps++) {
      SmootherRow row{0.0, h, sweeps,
                      estimate_condition_pcg(LinearOperator::matrix(mass), symmetric_gauss_seidel(mass, sweeps),
                                             options)};
      gs.rows.push_back({format_double(h), std::to_string(sweeps), format_double(row.estimate.kappa),
                         std::to_string(row.estimate.iterations)});
      tables.gauss_seidel.push_back(row);
    }
  }

  CsvTable mg{{"alpha", "h", "cond_estimate", "iterations"}, {}};
  for (double h : config.hs) {
    auto hierarchy = multigrid_hierarchy(cells_for_h(h));
    for (double alpha : config.alphas) {
      auto cycle = build_state_multigrid(hierarchy, alpha, config.variant);
      auto matrix = std::make_shared<const SparseMatrix>(cycle.matrix());
      SmootherRow row{alpha, h, 1, estimate_condition_pcg(LinearOperator::matrix(matrix), cycle.op(), options)};
      mg.rows.push_back({format_double(alpha), format_double(h), format_double(row.estimate.kappa),
                         std::to_string(row.estimate.iterations)});
      tables.multigrid.push_back(row);
    }
  }

  if (config.write_files) {
    write_csv(config.output_dir / "gs_table.csv", gs);
    write_csv(config.output_dir / "mg_table.csv", mg);
  }
  return tables;
}

bool AbstractVerification::ok() const {
  for (const auto& r : instances) {
    if (!r.contained || !r.bound_ok || !r.equality_ok) {
      return false;
    }
  }
  for (const auto& e : examples) {
    if (!e.assumptions_ok || !e.contained) {
      return false;
    }
  }
  return true;
}

AbstractVerification run_abstract_verify(const ExperimentConfig& config, Index n_instances) {
  config.validate();
  auto alphas = or_default(config.alphas, {1.0, 1e-3, 1e-6, 1e-9});
  auto intervals = theorem_intervals();
  AbstractVerification out;

  CsvTable table{{"seed", "n_control", "n_state", "ker_k_dim", "alpha", "min_abs", "max_abs", "kappa", "contained",
                  "equality"},
                 {}};
  for (Index i = 0; i < n_instances; i++) {
    AbstractInstanceResult r;
    r.seed = config.seed + static_cast<std::uint64_t>(i);
    std::mt19937_64 rng(r.seed ^ 0x9e3779b97f4a7c15ULL);
    r.n_state = std::uniform_int_distribution<Index>(3, 40)(rng);
    r.n_control = std::uniform_int_distribution<Index>(r.n_state, 40)(rng);
    r.ker_k_dim = i % 2 == 0 ? 0 : std::uniform_int_distribution<Index>(1, r.n_state - 1)(rng);
    r.alpha = alphas[static_cast<std::size_t>(i) % alphas.size()];

    auto triple = random_instance(r.seed, {r.n_control, r.n_state, r.n_state}, r.ker_k_dim, r.alpha);
    auto eigenvalues = preconditioned_spectrum(triple);
    auto report = make_report(r.alpha, eigenvalues);
    r.min_abs = report.min_abs;
    r.max_abs = report.max_abs;
    r.kappa = report.kappa;
    r.contained = check_containment(report, intervals, 1e-8).contained;
    r.bound_ok = r.kappa <= intervals.kappa_bound() + 1e-6;
    if (r.ker_k_dim > 0) {
      auto hits = [&](double target) {
        return std::any_of(eigenvalues.begin(), eigenvalues.end(),
                           [&](double v) { return std::abs(v - target) <= 1e-6; });
      };
      r.equality_ok = hits(intervals.r2) && hits(intervals.r3) &&
                      std::abs(r.kappa - intervals.kappa_bound()) <= 1e-6;
    }
    table.rows.push_back({std::to_string(r.seed), std::to_string(r.n_control), std::to_string(r.n_state),
                          std::to_string(r.ker_k_dim), format_double(r.alpha), format_double(r.min_abs),
                          format_double(r.max_abs), format_double(r.kappa), r.contained ? "1" : "0",
                          r.equality_ok ? "1" : "0"});
    out.instances.push_back(r);
  }

  double h = config.hs.empty() ? 0.25 : *std::max_element(config.hs.begin(), config.hs.end());
  auto n = cells_for_h(h);
  nlohmann::json examples = nlohmann::json::array();
  const std::pair<const char*, Variant> cases[] = {{"boundary_observation", Variant::boundary_obs},
                                                   {"laplace_state", Variant::laplace_state},
                                                   {"full_observation", Variant::full_obs}};
  for (const auto& [name, variant] : cases) {
    ExampleResult e;
    e.name = name;
    auto triple = example_triple(variant, n, alphas.front());
    auto verdict = validate_assumptions(triple);
    e.assumptions_ok = verdict.ok();
    e.failures = verdict.failures();
    e.stability = measure_stability(triple);
    auto report = make_report(triple.alpha, preconditioned_spectrum(triple));
    e.kappa = report.kappa;
    e.contained = check_containment(report, intervals, 1e-8).contained;
    examples.push_back({{"name", e.name},
                        {"h", h},
                        {"alpha", triple.alpha},
                        {"assumptions_ok", e.assumptions_ok},
                        {"failures", e.failures},
                        {"inf_sup", e.stability.inf_sup},
                        {"coercivity", e.stability.coercivity},
                        {"boundedness", e.stability.boundedness},
                        {"kappa", e.kappa},
                        {"contained", e.contained}});
    out.examples.push_back(std::move(e));
  }

  if (config.write_files) {
    write_csv(config.output_dir / "abstract_verify.csv", table);
    write_file_atomic(config.output_dir / "abstract_examples.json", examples.dump(2) + "\n");
  }
  return out;
}

}  // namespace bocp
