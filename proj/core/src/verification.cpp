#include "sdarl/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>

#include "sdarl/datagen.hpp"
#include "sdarl/linalg.hpp"
#include "sdarl/loss.hpp"
#include "sdarl/oracle.hpp"
#include "sdarl/rng.hpp"
#include "sdarl/solver.hpp"

namespace sdarl {

bool VerifyReport::all_pass() const {
  for (const PropertyResult& p : properties)
    if (!p.pass) return false;
  return true;
}

std::string format_report(const VerifyReport& report) {
  std::ostringstream out;
  for (const PropertyResult& p : report.properties)
    out << (p.pass ? "[ok]   " : "[FAIL] ") << p.name << ": " << p.detail << '\n';
  out << (report.all_pass() ? "verification passed" : "verification FAILED") << '\n';
  return out.str();
}

namespace {

// Test hook: a loss whose reported gradient is biased on coordinate 0.
class CorruptedLoss final : public Loss {
 public:
  explicit CorruptedLoss(const Loss& inner) : inner_(inner) {}
  Index dim() const override { return inner_.dim(); }
  Index sample_count() const override { return inner_.sample_count(); }
  bool is_classification() const override { return inner_.is_classification(); }
  const Eigen::VectorXd& response() const override { return inner_.response(); }
  double value(const SparseCoef& beta) const override { return inner_.value(beta); }
  Eigen::VectorXd gradient(const SparseCoef& beta) const override {
    Eigen::VectorXd g = inner_.gradient(beta);
    g[0] += 1e-3;
    return g;
  }
  RestrictedFit minimize_restricted(std::span<const Index> active,
                                    const SparseCoef* warm) const override {
    return inner_.minimize_restricted(active, warm);
  }
  std::unique_ptr<Loss> subset_rows(std::span<const Index> rows) const override {
    return inner_.subset_rows(rows);
  }

 private:
  const Loss& inner_;
};

double gradient_mismatch(const Loss& loss, const SparseCoef& at) {
  Eigen::VectorXd g = loss.gradient(at);
  Eigen::VectorXd fd = finite_diff_gradient(loss, at, 1e-6);
  return (g - fd).lpNorm<Eigen::Infinity>() / std::max(1.0, g.lpNorm<Eigen::Infinity>());
}

SparseCoef random_point(rng::Stream& stream, Index p, double scale) {
  Eigen::VectorXd v(p);
  for (Index i = 0; i < p; ++i) v[i] = scale * stream.next_normal();
  return SparseCoef::from_dense(v);
}

PropertyResult check_gradients(const VerifyOptions& options, bool logistic) {
  rng::Stream stream(rng::stream_key(options.seed, logistic ? 1 : 0, rng::Purpose::generic));
  int failures = 0;
  double worst = 0.0;
  const int trials = 50;
  for (int t = 0; t < trials; ++t) {
    Index n = 8 + static_cast<Index>(stream.next_below(23));
    Index p = 2 + static_cast<Index>(stream.next_below(19));
    Eigen::MatrixXd x(n, p);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < p; ++j) x(i, j) = stream.next_normal();
    std::unique_ptr<Loss> loss;
    if (logistic) {
      Eigen::VectorXd y(n);
      for (Index i = 0; i < n; ++i) y[i] = stream.next_uniform() < 0.5 ? 1.0 : 0.0;
      loss = std::make_unique<LogisticLoss>(x, y);
    } else {
      Eigen::VectorXd y = stream.normal_vector(n);
      loss = std::make_unique<LinearLoss>(x, y, t % 2 == 0);
    }
    SparseCoef at = random_point(stream, p, 0.5);
    double err;
    if (options.corrupt_gradient) {
      CorruptedLoss corrupted(*loss);
      err = gradient_mismatch(corrupted, at);
    } else {
      err = gradient_mismatch(*loss, at);
    }
    worst = std::max(worst, err);
    if (err > 1e-6) ++failures;
  }
  PropertyResult res;
  res.name = logistic ? "gradient-logistic" : "gradient-linear";
  res.pass = failures == 0;
  std::ostringstream d;
  d << trials - failures << "/" << trials << " trials within 1e-6 (worst " << worst << ")";
  res.detail = d.str();
  return res;
}

PropertyResult check_top_t(const VerifyOptions& options) {
  rng::Stream stream(rng::stream_key(options.seed, 2, rng::Purpose::generic));
  int failures = 0;
  const int trials = 300;
  for (int t = 0; t < trials; ++t) {
    Index p = 2 + static_cast<Index>(stream.next_below(39));
    Eigen::VectorXd u(p);
    // Quantized magnitudes force ties.
    for (Index i = 0; i < p; ++i)
      u[i] = std::round(stream.next_normal() * 4.0) / 4.0;
    Index k = 1 + static_cast<Index>(stream.next_below(static_cast<std::uint64_t>(p)));
    TopTSelection sel = top_t_select(u, k);

    std::vector<Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&u](Index a, Index b) {
      return std::abs(u[a]) > std::abs(u[b]);
    });
    std::vector<Index> expected(order.begin(), order.begin() + k);
    std::sort(expected.begin(), expected.end());
    double expected_threshold = std::abs(u[order[static_cast<std::size_t>(k - 1)]]);
    if (sel.indices != expected || sel.threshold != expected_threshold) ++failures;
  }
  PropertyResult res;
  res.name = "top-t-sort-oracle";
  res.pass = failures == 0;
  res.detail = std::to_string(trials - failures) + "/" + std::to_string(trials) +
               " selections match the stable-sort oracle";
  return res;
}

PropertyResult check_hard_threshold(const VerifyOptions& options) {
  rng::Stream stream(rng::stream_key(options.seed, 3, rng::Purpose::generic));
  int failures = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    Index p = 1 + static_cast<Index>(stream.next_below(30));
    Eigen::VectorXd u = stream.normal_vector(p);
    double level = std::abs(stream.next_normal());
    double lambda_tau = 0.5 * level * level;
    Eigen::VectorXd h = hard_threshold(u, lambda_tau);
    for (Index i = 0; i < p; ++i) {
      double want = std::abs(u[i]) < level ? 0.0 : u[i];
      if (h[i] != want) ++failures;
    }
    if ((hard_threshold(u, 0.0).array() != u.array()).any()) ++failures;
  }
  PropertyResult res;
  res.name = "hard-threshold";
  res.pass = failures == 0;
  res.detail = failures == 0 ? "all coordinate rules hold" :
               std::to_string(failures) + " coordinate violations";
  return res;
}

struct FitCase {
  std::unique_ptr<Loss> loss;
  FitResult fit;
  SolverConfig config;
  bool linear = false;
  Eigen::MatrixXd design;  // linear cases only, for the smoothness bound
};

std::vector<FitCase> run_fit_matrix(const VerifyOptions& options) {
  std::vector<FitCase> cases;
  std::uint64_t s = options.seed;
  int which = 0;
  for (double rho : {0.0, 0.5, 0.8}) {
    for (double r : {1.0, 100.0}) {
      for (int k : {3, 8}) {
        ++which;
        GenSpec gen;
        gen.model = which % 3 == 0 ? Model::logistic : Model::linear;
        gen.n = gen.model == Model::linear ? 80 : 150;
        gen.p = 160;
        gen.k = k;
        gen.rho = rho;
        gen.signal_ratio = r;
        gen.noise_sd = 0.5;
        gen.seed = rng::stream_key(s, static_cast<std::uint64_t>(which), rng::Purpose::generic);
        Dataset data = make_dataset(gen);
        FitCase fc;
        fc.linear = gen.model == Model::linear;
        fc.config.target_size = k;
        if (fc.linear) fc.design = data.design;
        fc.loss = make_train_loss(data, gen);
        fc.fit = fit_sdarl(*fc.loss, fc.config);
        cases.push_back(std::move(fc));
      }
    }
  }
  return cases;
}

PropertyResult check_descent(const std::vector<FitCase>& cases) {
  int violations = 0;
  int checked = 0;
  for (const FitCase& fc : cases) {
    const std::vector<double>& traj = fc.fit.loss_trajectory;
    for (std::size_t i = 2; i < traj.size(); ++i) {
      ++checked;
      if (traj[i] > traj[i - 1] + 1e-12) ++violations;
    }
  }
  PropertyResult res;
  res.name = "descent-invariant";
  res.pass = violations == 0;
  res.detail = std::to_string(checked) + " transitions checked, " +
               std::to_string(violations) + " violations";
  return res;
}

PropertyResult check_line_search(const std::vector<FitCase>& cases) {
  int capped = 0;
  int over = 0;
  for (const FitCase& fc : cases) {
    if (fc.fit.termination == Termination::line_search_cap) ++capped;
    for (int m : fc.fit.search_exponents)
      if (m >= fc.config.max_exponent) ++over;
  }
  PropertyResult res;
  res.name = "line-search-exponent";
  res.pass = capped == 0 && over == 0;
  res.detail = std::to_string(cases.size()) + " fits, " + std::to_string(capped) +
               " hit the exponent cap";
  return res;
}

PropertyResult check_kkt(const std::vector<FitCase>& cases) {
  int converged = 0;
  int failures = 0;
  double worst = 0.0;
  for (const FitCase& fc : cases) {
    if (fc.fit.termination != Termination::converged) continue;
    ++converged;
    LambdaInterval interval =
        admissible_lambda_interval(*fc.loss, fc.fit.beta, fc.fit.final_tau);
    if (interval.empty) {
      ++failures;
      continue;
    }
    KktCertificate cert =
        certify_kkt(*fc.loss, fc.fit.beta, fc.fit.final_tau, interval.midpoint());
    worst = std::max(worst, cert.residual);
    if (!cert.pass) ++failures;
  }
  PropertyResult res;
  res.name = "kkt-certification";
  res.pass = failures == 0 && converged > 0;
  std::ostringstream d;
  d << converged << " converged fits certified (worst residual " << worst << ")";
  res.detail = d.str();
  return res;
}

PropertyResult check_brute_force(const VerifyOptions& options) {
  rng::Stream stream(rng::stream_key(options.seed, 4, rng::Purpose::generic));
  const int trials = 30;
  int value_matches = 0;
  int kkt_passes = 0;
  for (int t = 0; t < trials; ++t) {
    GenSpec gen;
    gen.model = Model::linear;
    gen.n = 30;
    gen.p = 8 + static_cast<Index>(stream.next_below(3));  // 8..10
    gen.k = 1 + static_cast<Index>(stream.next_below(3));  // 1..3
    gen.rho = 0.3;
    gen.signal_ratio = 10.0;
    gen.noise_sd = 0.05;
    gen.seed = stream.next_u64();
    Dataset data = make_dataset(gen);
    LinearLoss loss(data.design, data.response);

    SolverConfig cfg;
    cfg.target_size = gen.k;
    FitResult fit = fit_sdarl(loss, cfg);
    BruteForceResult brute = brute_force_best_support(loss, gen.k);
    if (loss.value(fit.beta) <= brute.value + 1e-8) ++value_matches;
    if (fit.termination == Termination::converged) {
      LambdaInterval interval = admissible_lambda_interval(loss, fit.beta, fit.final_tau);
      if (!interval.empty &&
          certify_kkt(loss, fit.beta, fit.final_tau, interval.midpoint()).pass)
        ++kkt_passes;
    }
  }
  PropertyResult res;
  res.name = "brute-force-match";
  res.pass = value_matches >= 27 && kkt_passes >= 27;
  res.detail = std::to_string(value_matches) + "/" + std::to_string(trials) +
               " objective matches, " + std::to_string(kkt_passes) + "/" +
               std::to_string(trials) + " KKT certificates";
  return res;
}

PropertyResult check_step_bound(const VerifyOptions& options) {
  rng::Stream stream(rng::stream_key(options.seed, 5, rng::Purpose::generic));
  const int trials = 20;
  int violations = 0;
  double slack = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    GenSpec gen;
    gen.model = Model::linear;
    gen.n = 60;
    gen.p = t % 2 == 0 ? 30 : 60;
    gen.k = 4;
    gen.rho = t % 3 == 0 ? 0.7 : 0.2;
    gen.signal_ratio = 50.0;
    gen.noise_sd = 1.0;
    gen.seed = stream.next_u64();
    Dataset data = make_dataset(gen);
    LinearLoss loss(data.design, data.response);

    Eigen::MatrixXd gram = data.design.transpose() * data.design;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigs(gram);
    double m = eigs.eigenvalues().maxCoeff() / static_cast<double>(gen.n);

    SolverConfig cfg;
    cfg.target_size = gen.k;
    FitResult fit = fit_sdarl(loss, cfg);
    double bound =
        cfg.backtrack_factor * (1.0 - cfg.sufficient_decrease) / m - 1e-12;
    for (double tau : fit.step_sizes) {
      slack = std::min(slack, tau - bound);
      if (tau < bound) ++violations;
    }
  }
  PropertyResult res;
  res.name = "step-lower-bound";
  res.pass = violations == 0;
  std::ostringstream d;
  d << trials << " instances, min slack above the bound " << slack;
  res.detail = d.str();
  return res;
}

}  // namespace

VerifyReport run_verification(const VerifyOptions& options) {
  VerifyReport report;
  report.properties.push_back(check_gradients(options, /*logistic=*/false));
  report.properties.push_back(check_gradients(options, /*logistic=*/true));
  report.properties.push_back(check_top_t(options));
  report.properties.push_back(check_hard_threshold(options));
  std::vector<FitCase> cases = run_fit_matrix(options);
  report.properties.push_back(check_descent(cases));
  report.properties.push_back(check_line_search(cases));
  report.properties.push_back(check_kkt(cases));
  report.properties.push_back(check_brute_force(options));
  report.properties.push_back(check_step_bound(options));
  return report;
}

}  // namespace sdarl
