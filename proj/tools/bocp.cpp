// Command-line driver for the boundary-control experiments.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include <bocp/experiments.hpp>

using namespace bocp;

namespace {

void print_rows(const std::vector<TableRow>& rows) {
  std::printf("%-10s %-10s %10s %10s %12s\n", "alpha", "h", "iters", "cond", "time_ms");
  for (const auto& r : rows) {
    std::printf("%-10g %-10g %10s %10s %12.1f%s\n", r.alpha, r.h,
                r.converged ? std::to_string(r.iterations).c_str() : "-",
                r.cond_estimate ? std::to_string(*r.cond_estimate).substr(0, 6).c_str() : "-", r.wall_time_ms,
                r.message.empty() ? "" : ("  " + r.message).c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preconditioned solvers and spectral checks for a boundary-observation control problem"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key = value file mirroring the flags; flags on the command line win");

  ExperimentConfig config;
  std::string precond = "approx";
  std::string variant = "boundary_obs";
  std::string out = ".";
  app.add_option("--alpha", config.alphas, "Regularization weights")->delimiter(',');
  app.add_option("--h", config.hs, "Mesh sizes (powers of two)")->delimiter(',');
  app.add_option("--eps", config.eps, "MINRES tolerance on the preconditioned residual ratio")
      ->capture_default_str();
  app.add_option("--seed", config.seed, "Seed for random vectors")->capture_default_str();
  app.add_option("--precond", precond, "exact | approx")
      ->check(CLI::IsMember({"exact", "approx"}))
      ->capture_default_str();
  app.add_option("--variant", variant, "boundary_obs | full_obs | laplace_state")
      ->check(CLI::IsMember({"boundary_obs", "full_obs", "laplace_state"}))
      ->capture_default_str();
  std::string stop = "norm";
  app.add_option("--stop", stop, "Compare eps with the B-norm ratio (norm) or its square (inner)")
      ->check(CLI::IsMember({"norm", "inner"}))
      ->capture_default_str();
  app.add_option("--out", out, "Output directory")->capture_default_str();
  app.add_option("--max-iter", config.max_iter, "MINRES iteration cap")->capture_default_str();
  bool no_cond = false;
  app.add_flag("--no-cond", no_cond, "Skip condition estimates in minres-table");

  auto* demo = app.add_subcommand("demo", "Solve the demo problem and write sample grids");
  auto* table = app.add_subcommand("minres-table", "MINRES iteration counts over the alpha/h grid");
  auto* spectrum = app.add_subcommand("spectrum", "Generalized spectra and interval containment");
  auto* smoothers = app.add_subcommand("smoothers", "Condition numbers of Gauss-Seidel and V-cycle");
  auto* abstract = app.add_subcommand("abstract-verify", "Randomized checks of the abstract framework");

  std::string mode = "auto";
  spectrum->add_option("--mode", mode, "auto | full | deflated | extremes")
      ->check(CLI::IsMember({"auto", "full", "deflated", "extremes"}))
      ->capture_default_str();
  Index instances = 50;
  abstract->add_option("--instances", instances, "Number of random instances")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    config.preconditioner = parse_preconditioner(precond);
    config.variant = parse_variant(variant);
    config.stop_rule = parse_stop_rule(stop);
    config.output_dir = out;
    config.estimate_condition = !no_cond;
    config.validate();
    std::filesystem::create_directories(config.output_dir);

    if (*demo) {
      auto result = run_demo(config);
      std::printf("iterations %lld, converged %s, boundary misfit %.6e\n",
                  static_cast<long long>(result.report.iterations), result.report.converged ? "yes" : "no",
                  result.boundary_misfit);
      return result.report.converged ? 0 : 1;
    }

    if (*table) {
      if (config.hs.empty()) {
        config.hs = {1.0 / 16, 1.0 / 32, 1.0 / 64};
      }
      auto rows = run_minres_table(config);
      print_rows(rows);
      bool ok = std::all_of(rows.begin(), rows.end(), [](const TableRow& r) { return r.converged; });
      return ok ? 0 : 1;
    }

    if (*spectrum) {
      if (config.hs.empty()) {
        config.hs = {1.0 / 16};
      }
      if (config.alphas.empty()) {
        config.alphas = {1.0, 1e-4, 1e-6, 1e-10};
      }
      SpectrumOptions options;
      if (mode == "full") {
        options.mode = SpectrumMode::full;
      } else if (mode == "deflated") {
        options.mode = SpectrumMode::deflated;
      } else if (mode == "extremes") {
        options.mode = SpectrumMode::extremes;
      }
      auto cells = run_spectrum_sweep(config, options);
      auto bound = theorem_intervals().kappa_bound();
      bool ok = true;
      std::printf("%-10s %-10s %10s %10s %10s %s\n", "alpha", "h", "min|l|", "max|l|", "kappa", "contained");
      for (const auto& c : cells) {
        std::printf("%-10g %-10g %10.6f %10.6f %10.6f %s\n", c.report.alpha, c.report.h, c.report.min_abs,
                    c.report.max_abs, c.report.kappa, c.verdict.contained ? "yes" : "NO");
        ok = ok && c.verdict.contained;
      }
      std::printf("kappa bound r3/r2 = %.10f\n", bound);
      return ok ? 0 : 1;
    }

    if (*smoothers) {
      if (config.hs.empty()) {
        config.hs = {1.0 / 16, 1.0 / 64};
      }
      if (config.alphas.empty()) {
        config.alphas = {1.0, 1e-4, 1e-8, 1e-12};
      }
      auto tables = run_smoother_tables(config);
      std::printf("Gauss-Seidel on the control mass matrix\n");
      for (const auto& r : tables.gauss_seidel) {
        std::printf("  h %-10g sweeps %d  kappa %.4f\n", r.h, r.sweeps, r.estimate.kappa);
      }
      std::printf("One V-cycle on the state block\n");
      for (const auto& r : tables.multigrid) {
        std::printf("  alpha %-8g h %-10g kappa %.4f\n", r.alpha, r.h, r.estimate.kappa);
      }
      return 0;
    }

    if (*abstract) {
      auto result = run_abstract_verify(config, instances);
      Index failed = 0;
      for (const auto& r : result.instances) {
        if (!r.contained || !r.bound_ok || !r.equality_ok) {
          failed++;
        }
      }
      std::printf("random instances: %zu, failed: %lld\n", result.instances.size(),
                  static_cast<long long>(failed));
      for (const auto& e : result.examples) {
        std::printf("%-22s assumptions %s  inf-sup %.6f  coercivity %.6f  bound %.6f  kappa %.6f\n",
                    e.name.c_str(), e.assumptions_ok ? "ok" : "FAIL", e.stability.inf_sup,
                    e.stability.coercivity, e.stability.boundedness, e.kappa);
        for (const auto& f : e.failures) {
          std::printf("    %s\n", f.c_str());
        }
      }
      return result.ok() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
