#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdarl/bench.hpp"
#include "sdarl/dataio.hpp"
#include "sdarl/datagen.hpp"
#include "sdarl/experiment.hpp"
#include "sdarl/oracle.hpp"
#include "sdarl/solver.hpp"
#include "sdarl/tuning.hpp"
#include "sdarl/verification.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitVerify = 3;

struct GenArgs {
  std::string config;
  std::string out;
  std::string truth;
  std::string model = "linear";
  std::string design = "ar1";
  std::string coef = "unit_floor";
  long long n = 0, p = 0, k = 0;
  double rho = 0.0, r = 1.0, sigma1 = 1.0, train_fraction = 0.8;
  bool no_intercept = false;
  std::uint64_t seed = 1;
};

struct SolverArgs {
  double nu = 0.9;
  double sigma = 0.1;
  int max_outer = 50;
  int max_exponent = 200;
  double subsolver_tol = 1e-8;
  int subsolver_max_iter = 100;
};

struct FitArgs {
  std::string data;
  std::string model = "logistic";
  std::string method = "sdarl";
  long long t = 0;
  double gamma = 1.0;
  bool no_intercept = false;
  std::string dump;
  SolverArgs solver;
};

struct BenchArgs {
  std::string preset;
  std::string config;
  std::string out;
  std::string summary;
  int reps = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int workers = 0;
  bool no_timing = false;
  bool list = false;
};

struct TuneArgs {
  std::string data;
  std::string config;
  std::string model = "logistic";
  long long alpha = 1;
  long long q = 0;
  std::string criterion = "hbic";
  int folds = 10;
  std::uint64_t cv_seed = 0;
  bool no_intercept = false;
  SolverArgs solver;
};

struct VerifyArgs {
  std::uint64_t seed = 7;
  bool corrupt_gradient = false;
};

void add_solver_flags(CLI::App* cmd, SolverArgs& args) {
  cmd->add_option("--nu", args.nu, "line-search backtrack factor");
  cmd->add_option("--sigma", args.sigma, "sufficient-decrease constant");
  cmd->add_option("--max-outer", args.max_outer, "outer iteration cap");
  cmd->add_option("--max-exponent", args.max_exponent, "line-search exponent cap");
  cmd->add_option("--subsolver-tol", args.subsolver_tol, "restricted-solve gradient tolerance");
  cmd->add_option("--subsolver-max-iter", args.subsolver_max_iter,
                  "restricted-solve iteration cap");
}

sdarl::SolverConfig to_config(const SolverArgs& args) {
  sdarl::SolverConfig cfg;
  cfg.backtrack_factor = args.nu;
  cfg.sufficient_decrease = args.sigma;
  cfg.max_outer = args.max_outer;
  cfg.max_exponent = args.max_exponent;
  cfg.subsolver.grad_tol = args.subsolver_tol;
  cfg.subsolver.max_iterations = args.subsolver_max_iter;
  return cfg;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

sdarl::Model parse_model(const std::string& s) {
  if (s == "linear") return sdarl::Model::linear;
  if (s == "logistic") return sdarl::Model::logistic;
  throw CLI::ValidationError("--model", "expected linear or logistic");
}

// Loads a sparse-text file and assembles the loss plus eligibility mask.
struct LoadedData {
  sdarl::SparseTextData data;
  std::unique_ptr<sdarl::Loss> loss;
  std::vector<sdarl::Index> eligible;
};

LoadedData load_for_fit(const std::string& path, sdarl::Model model, bool intercept,
                        const sdarl::SubsolverOptions& subsolver) {
  LoadedData out;
  out.data = sdarl::read_sparse_text(
      path, /*normalize=*/true,
      model == sdarl::Model::linear ? sdarl::LabelPolicy::real : sdarl::LabelPolicy::binary);
  std::size_t zi = 0;
  for (sdarl::Index j = 0; j < out.data.design.cols(); ++j) {
    if (zi < out.data.zero_columns.size() && out.data.zero_columns[zi] == j) {
      ++zi;
      continue;
    }
    out.eligible.push_back(j);
  }
  if (out.eligible.empty()) throw sdarl::DataError("'" + path + "': every column is zero");
  if (model == sdarl::Model::linear)
    out.loss = std::make_unique<sdarl::LinearLoss>(out.data.design, out.data.response,
                                                   intercept, subsolver);
  else
    out.loss = std::make_unique<sdarl::LogisticLoss>(out.data.design, out.data.response,
                                                     subsolver);
  return out;
}

int cmd_gen(const CLI::App* cmd, GenArgs& args) {
  sdarl::ExperimentSpec spec;
  if (!args.config.empty()) spec = sdarl::read_config(args.config);

  auto given = [cmd](const std::string& name) { return cmd->count(name) > 0; };
  if (given("--model")) spec.gen.model = parse_model(args.model);
  if (given("--design")) {
    if (args.design == "ar1")
      spec.gen.design = sdarl::DesignKind::ar1;
    else if (args.design == "neighbor")
      spec.gen.design = sdarl::DesignKind::neighbor;
    else
      throw CLI::ValidationError("--design", "expected ar1 or neighbor");
  }
  if (given("--coef")) {
    if (args.coef == "unit_floor")
      spec.gen.coef = sdarl::CoefKind::unit_floor;
    else if (args.coef == "logfloor")
      spec.gen.coef = sdarl::CoefKind::logfloor;
    else
      throw CLI::ValidationError("--coef", "expected unit_floor or logfloor");
  }
  if (given("--n")) spec.gen.n = args.n;
  if (given("--p")) spec.gen.p = args.p;
  if (given("--K")) spec.gen.k = args.k;
  if (given("--rho")) spec.gen.rho = args.rho;
  if (given("--R")) spec.gen.signal_ratio = args.r;
  if (given("--sigma1")) spec.gen.noise_sd = args.sigma1;
  if (given("--train-fraction")) spec.gen.train_fraction = args.train_fraction;
  if (given("--no-intercept")) spec.gen.unit_intercept = false;
  if (given("--seed")) spec.gen.seed = args.seed;

  try {
    spec.gen.validate();
  } catch (const std::invalid_argument& e) {
    std::cerr << "gen: " << e.what() << "\n";
    return kExitUsage;
  }

  sdarl::Dataset data = sdarl::make_dataset(spec.gen);
  sdarl::write_sparse_text(args.out, data.design, data.response);
  if (!args.truth.empty()) {
    std::ofstream truth(args.truth);
    if (!truth) throw sdarl::DataError("cannot open '" + args.truth + "' for writing");
    truth << "# p = " << spec.gen.p << ", 1-based indices\n";
    for (std::size_t i = 0; i < data.true_coef.indices.size(); ++i)
      truth << (data.true_coef.indices[i] + 1) << ' '
            << fmt(data.true_coef.values[i]) << '\n';
  }

  std::cout << "wrote " << data.design.rows() << " rows x " << data.design.cols()
            << " columns to " << args.out << "\n";
  if (!args.truth.empty()) std::cout << "wrote true support to " << args.truth << "\n";
  std::cout << "# columns are scaled to Euclidean norm sqrt(n)\n";
  std::cout << "# effective configuration:\n" << sdarl::format_config(spec);
  return kExitOk;
}

int cmd_fit(const CLI::App* cmd, FitArgs& args) {
  if (args.method != "sdarl" && args.method != "fixed_step")
    throw CLI::ValidationError("--method", "expected sdarl or fixed_step");
  sdarl::Model model = parse_model(args.model);
  sdarl::SolverConfig cfg = to_config(args.solver);
  LoadedData loaded = load_for_fit(args.data, model, !args.no_intercept, cfg.subsolver);
  const sdarl::Index n = loaded.loss->sample_count();
  const sdarl::Index usable = static_cast<sdarl::Index>(loaded.eligible.size());

  sdarl::Index t;
  if (cmd->count("--T") > 0) {
    t = static_cast<sdarl::Index>(args.t);
  } else {
    t = static_cast<sdarl::Index>(
        std::floor(args.gamma * static_cast<double>(n) / std::log(static_cast<double>(n))));
    t = std::max<sdarl::Index>(t, 1);
  }
  if (t > usable) {
    std::cerr << "fit: T = " << t << " exceeds the " << usable << " usable columns\n";
    return kExitUsage;
  }
  cfg.target_size = t;
  if (usable < loaded.data.design.cols()) cfg.eligible = loaded.eligible;

  sdarl::FitResult fit = args.method == "fixed_step"
                             ? sdarl::fit_fixed_step(*loaded.loss, cfg)
                             : sdarl::fit_sdarl(*loaded.loss, cfg);

  std::cout << "rows kept: " << n << " (dropped " << loaded.data.dropped_rows
            << " vacant), columns: " << loaded.data.design.cols() << " (" << usable
            << " usable)\n";
  std::cout << "method: " << args.method << ", T = " << t << "\n";
  std::cout << "termination: " << sdarl::to_string(fit.termination) << " after "
            << fit.iterations << " iteration(s)\n";
  if (fit.separation_flagged)
    std::cout << "warning: a restricted fit looked separated (|beta| > 30)\n";
  std::cout << "iter  loss            tau       m   |A|\n";
  for (std::size_t i = 0; i + 1 < fit.loss_trajectory.size(); ++i) {
    std::printf("%4zu  %-14.8g", i + 1, fit.loss_trajectory[i + 1]);
    if (i < fit.step_sizes.size())
      std::printf("  %-8.4g  %-3d", fit.step_sizes[i], fit.search_exponents[i]);
    else
      std::printf("  %-8s  %-3s", "-", "-");
    std::printf(" %4zu\n", fit.active_set_history[i].size());
  }
  std::cout << "final support (1-based):";
  for (sdarl::Index j : fit.active_set) std::cout << ' ' << (j + 1);
  std::cout << "\n";

  if (fit.termination == sdarl::Termination::converged) {
    sdarl::LambdaInterval interval =
        sdarl::admissible_lambda_interval(*loaded.loss, fit.beta, fit.final_tau);
    if (!interval.empty) {
      sdarl::KktCertificate cert =
          sdarl::certify_kkt(*loaded.loss, fit.beta, fit.final_tau, interval.midpoint());
      std::cout << "kkt residual " << fmt(cert.residual) << " at lambda "
                << fmt(cert.lambda) << " (admissible (" << fmt(interval.lo) << ", "
                << (std::isinf(interval.hi) ? "inf" : fmt(interval.hi)) << "])\n";
    }
  }

  if (!args.dump.empty()) {
    std::ofstream dump(args.dump);
    if (!dump) throw sdarl::DataError("cannot open '" + args.dump + "' for writing");
    dump << "# coefficients on the sqrt(n)-normalized design, 1-based indices\n";
    for (std::size_t i = 0; i < fit.beta.indices.size(); ++i) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", fit.beta.values[i]);
      dump << (fit.beta.indices[i] + 1) << ' ' << buf << '\n';
    }
    std::cout << "wrote coefficients to " << args.dump << "\n";
  }
  return kExitOk;
}

int cmd_bench(BenchArgs& args) {
  if (args.list) {
    for (const std::string& name : sdarl::preset_names()) std::cout << name << "\n";
    return kExitOk;
  }
  if (args.preset.empty() == args.config.empty()) {
    std::cerr << "bench: exactly one of --preset or --config is required\n";
    return kExitUsage;
  }
  if (args.out.empty()) {
    std::cerr << "bench: --out is required\n";
    return kExitUsage;
  }

  sdarl::BenchPlan plan;
  if (!args.preset.empty()) {
    plan = sdarl::make_preset(args.preset);
  } else {
    plan.name = args.config;
    sdarl::ExperimentSpec spec = sdarl::read_config(args.config);
    plan.cells.push_back({"config", std::move(spec)});
  }
  for (sdarl::BenchCell& cell : plan.cells) {
    if (args.reps > 0) cell.spec.replications = args.reps;
    if (args.seed_given) cell.spec.base_seed = args.seed;
  }
  plan.workers = args.workers;
  plan.include_timing = !args.no_timing;

  sdarl::BenchRun run = sdarl::run_bench(plan, &std::cerr);
  std::vector<sdarl::SummaryRow> summary = sdarl::emit_results(args.out, run.rows);
  if (!args.summary.empty()) sdarl::write_summary_csv(args.summary, summary);
  std::cout << sdarl::format_summary(summary);
  std::cout << "wrote " << run.rows.size() << " rows to " << args.out << "\n";
  for (const std::string& e : run.errors) std::cerr << "error: " << e << "\n";
  return kExitOk;
}

int cmd_tune(TuneArgs& args) {
  sdarl::TuningConfig tuning;
  tuning.alpha = static_cast<sdarl::Index>(args.alpha);
  tuning.q = static_cast<sdarl::Index>(args.q);
  if (args.criterion == "hbic")
    tuning.criterion = sdarl::Criterion::hbic;
  else if (args.criterion == "cv")
    tuning.criterion = sdarl::Criterion::cv;
  else
    throw CLI::ValidationError("--criterion", "expected hbic or cv");
  tuning.cv_folds = args.folds;
  tuning.cv_seed = args.cv_seed;
  tuning.solver = to_config(args.solver);

  std::unique_ptr<sdarl::Loss> loss;
  LoadedData loaded;
  if (!args.data.empty()) {
    sdarl::Model model = parse_model(args.model);
    loaded = load_for_fit(args.data, model, !args.no_intercept, tuning.solver.subsolver);
    if (loaded.eligible.size() < static_cast<std::size_t>(loaded.data.design.cols()))
      tuning.solver.eligible = loaded.eligible;
    loss = std::move(loaded.loss);
  } else if (!args.config.empty()) {
    sdarl::ExperimentSpec spec = sdarl::read_config(args.config);
    sdarl::Dataset data = sdarl::make_dataset(spec.gen);
    loss = sdarl::make_train_loss(data, spec.gen, tuning.solver.subsolver);
  } else {
    std::cerr << "tune: one of --data or --config is required\n";
    return kExitUsage;
  }

  sdarl::SolutionPath path = sdarl::fit_asdarl(*loss, tuning);
  std::cout << "sweep bound Q = " << path.sweep_bound << ", criterion = " << args.criterion
            << "\n";
  std::cout << "   T  loss           df   criterion        iters  selected\n";
  for (std::size_t i = 0; i < path.entries.size(); ++i) {
    const sdarl::PathEntry& e = path.entries[i];
    std::printf("%4lld  %-13.8g %4lld  %-15.8g %5d  %s\n",
                static_cast<long long>(e.target_size), e.fit.loss_trajectory.back(),
                static_cast<long long>(e.fit.beta.count_nonzero(1e-10)), e.criterion_value,
                e.fit.iterations, i == path.selected ? "*" : "");
  }
  return kExitOk;
}

int cmd_verify(VerifyArgs& args) {
  sdarl::VerifyOptions options;
  options.seed = args.seed;
  options.corrupt_gradient = args.corrupt_gradient;
  sdarl::VerifyReport report = sdarl::run_verification(options);
  std::cout << sdarl::format_report(report);
  return report.all_pass() ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse l0-constrained regression via support detection and root finding"};
  app.require_subcommand(1);

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic dataset");
  gen->add_option("--config", gen_args.config, "experiment config file");
  gen->add_option("--out", gen_args.out, "output sparse-text path")->required();
  gen->add_option("--truth", gen_args.truth, "write the true support here");
  gen->add_option("--model", gen_args.model, "linear or logistic");
  gen->add_option("--design", gen_args.design, "ar1 or neighbor");
  gen->add_option("--coef", gen_args.coef, "unit_floor or logfloor");
  gen->add_option("--n", gen_args.n, "sample count");
  gen->add_option("--p", gen_args.p, "feature count");
  gen->add_option("--K", gen_args.k, "true support size");
  gen->add_option("--rho", gen_args.rho, "design correlation");
  gen->add_option("--R", gen_args.r, "signal spread ratio");
  gen->add_option("--sigma1", gen_args.sigma1, "linear noise sd");
  gen->add_option("--train-fraction", gen_args.train_fraction, "logistic split fraction");
  gen->add_flag("--no-intercept", gen_args.no_intercept, "drop the all-ones intercept");
  gen->add_option("--seed", gen_args.seed, "generation seed");

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand("fit", "fit one model to a sparse-text dataset");
  fit->add_option("--data", fit_args.data, "sparse-text dataset")->required();
  fit->add_option("--model", fit_args.model, "linear or logistic (default logistic)");
  fit->add_option("--method", fit_args.method, "sdarl or fixed_step");
  fit->add_option("--T", fit_args.t, "active-set size (default gamma*n/ln n)");
  fit->add_option("--gamma", fit_args.gamma, "multiplier for the default T");
  fit->add_flag("--no-intercept", fit_args.no_intercept, "linear: drop the intercept");
  fit->add_option("--dump", fit_args.dump, "write final coefficients here");
  add_solver_flags(fit, fit_args.solver);

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "run a replicated experiment sweep");
  bench->add_option("--preset", bench_args.preset, "named preset (see --list)");
  bench->add_option("--config", bench_args.config, "experiment config file");
  bench->add_option("--out", bench_args.out, "per-replication CSV path");
  bench->add_option("--summary", bench_args.summary, "summary CSV path");
  bench->add_option("--reps", bench_args.reps, "override replication count");
  bench->add_option("--seed", bench_args.seed, "override base seed")
      ->each([&bench_args](const std::string&) { bench_args.seed_given = true; });
  bench->add_option("--workers", bench_args.workers, "worker threads (0 = hardware)");
  bench->add_flag("--no-timing", bench_args.no_timing, "write time_s as 0 for byte-stable output");
  bench->add_flag("--list", bench_args.list, "list preset names and exit");

  TuneArgs tune_args;
  CLI::App* tune = app.add_subcommand("tune", "adaptive sparsity sweep with model selection");
  tune->add_option("--data", tune_args.data, "sparse-text dataset");
  tune->add_option("--config", tune_args.config, "generate-and-tune config file");
  tune->add_option("--model", tune_args.model, "linear or logistic (with --data)");
  tune->add_option("--alpha", tune_args.alpha, "sparsity stride");
  tune->add_option("--Q", tune_args.q, "sweep bound (0 = n/ln n)");
  tune->add_option("--criterion", tune_args.criterion, "hbic or cv");
  tune->add_option("--folds", tune_args.folds, "cross-validation folds");
  tune->add_option("--cv-seed", tune_args.cv_seed, "fold shuffle seed");
  tune->add_flag("--no-intercept", tune_args.no_intercept, "linear: drop the intercept");
  add_solver_flags(tune, tune_args.solver);

  VerifyArgs verify_args;
  CLI::App* verify = app.add_subcommand("verify", "run the small-instance verification battery");
  verify->add_option("--seed", verify_args.seed, "battery seed");
  verify->add_flag("--corrupt-gradient", verify_args.corrupt_gradient)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen, gen_args);
    if (fit->parsed()) return cmd_fit(fit, fit_args);
    if (bench->parsed()) return cmd_bench(bench_args);
    if (tune->parsed()) return cmd_tune(tune_args);
    if (verify->parsed()) return cmd_verify(verify_args);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.get_name() << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const sdarl::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
