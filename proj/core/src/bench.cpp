#include "sdarl/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "sdarl/dataio.hpp"
#include "sdarl/rng.hpp"

namespace sdarl {

const char* to_string(Method m) {
  switch (m) {
    case Method::sdarl: return "sdarl";
    case Method::fixed_step: return "fixed_step";
    case Method::asdarl: return "asdarl";
  }
  return "unknown";
}

Method method_from_string(const std::string& s) {
  if (s == "sdarl") return Method::sdarl;
  if (s == "fixed_step") return Method::fixed_step;
  if (s == "asdarl") return Method::asdarl;
  throw std::invalid_argument("unknown method '" + s + "' (sdarl, fixed_step, asdarl)");
}

void ExperimentSpec::validate() const {
  gen.validate();
  if (replications < 1) throw std::invalid_argument("ExperimentSpec: reps must be positive");
  if (methods.empty()) throw std::invalid_argument("ExperimentSpec: no methods");
  Index t = effective_target();
  if (t < 1 || t > gen.p)
    throw std::invalid_argument("ExperimentSpec: target size must lie in [1, p]");
  SolverConfig probe = solver;
  probe.target_size = t;
  probe.validate(gen.p);
  tuning.validate(gen.n, gen.p);
}

namespace {

double quiet_nan() { return std::numeric_limits<double>::quiet_NaN(); }

// Evaluates one method on one generated replication.
ResultRow run_one(const ExperimentSpec& spec, Method method, int rep, std::uint64_t rep_seed,
                  const Dataset& data, const Loss& train_loss, bool include_timing) {
  ResultRow row;
  row.method = to_string(method);
  row.seed = rep_seed;
  row.rep = rep;
  row.n = spec.gen.n;
  row.p = spec.gen.p;
  row.k = spec.gen.k;
  row.t = spec.effective_target();
  row.rho = spec.gen.rho;
  row.r = spec.gen.signal_ratio;

  SolverConfig cfg = spec.solver;
  cfg.target_size = spec.effective_target();

  auto start = std::chrono::steady_clock::now();
  SparseCoef beta;
  std::vector<Index> support;
  int iterations = 0;
  if (method == Method::asdarl) {
    TuningConfig tun = spec.tuning;
    tun.solver = spec.solver;
    tun.cv_seed = rep_seed;
    SolutionPath path = fit_asdarl(train_loss, tun);
    const PathEntry& chosen = path.entries[path.selected];
    beta = chosen.fit.beta;
    support = chosen.fit.active_set;
    row.t = chosen.target_size;
    for (const PathEntry& e : path.entries) iterations += e.fit.iterations;
  } else {
    FitResult fit = method == Method::sdarl ? fit_sdarl(train_loss, cfg)
                                            : fit_fixed_step(train_loss, cfg);
    beta = fit.beta;
    support = fit.active_set;
    iterations = fit.iterations;
  }
  auto stop = std::chrono::steady_clock::now();

  row.eval.relative_error = relative_error(beta, data.true_coef);
  DiscoveryRates rates = discovery_rates(support, data.true_support);
  row.eval.pdr = rates.pdr;
  row.eval.fdr = rates.fdr;
  row.eval.cdr = rates.cdr;
  row.eval.iterations = iterations;
  row.eval.wall_time_s =
      include_timing ? std::chrono::duration<double>(stop - start).count() : 0.0;
  row.eval.est_support_size = static_cast<Index>(support.size());
  row.eval.true_support_size = static_cast<Index>(data.true_support.size());
  if (spec.gen.model == Model::logistic) {
    LogisticLoss full(data.design, data.response);
    row.eval.car = classification_accuracy(full, beta, data.test_rows);
  }
  return row;
}

ResultRow failure_row(const ExperimentSpec& spec, Method method, int rep,
                      std::uint64_t rep_seed) {
  ResultRow row;
  row.method = to_string(method);
  row.seed = rep_seed;
  row.rep = rep;
  row.n = spec.gen.n;
  row.p = spec.gen.p;
  row.k = spec.gen.k;
  row.t = spec.effective_target();
  row.rho = spec.gen.rho;
  row.r = spec.gen.signal_ratio;
  row.eval.relative_error = quiet_nan();
  row.eval.pdr = quiet_nan();
  row.eval.fdr = quiet_nan();
  row.eval.cdr = quiet_nan();
  row.failed = true;
  return row;
}

}  // namespace

BenchRun run_bench(const BenchPlan& plan, std::ostream* progress) {
  BenchRun out;
  std::mutex error_mutex;

  for (const BenchCell& cell : plan.cells) {
    const ExperimentSpec& spec = cell.spec;
    spec.validate();
    const int reps = spec.replications;
    const std::size_t methods = spec.methods.size();
    std::vector<ResultRow> cell_rows(static_cast<std::size_t>(reps) * methods);

    if (progress != nullptr)
      *progress << "cell " << cell.label << ": " << reps << " reps x " << methods
                << " methods\n"
                << std::flush;

    auto work_rep = [&](int rep) {
      std::uint64_t rep_seed = rng::stream_key(spec.base_seed, static_cast<std::uint64_t>(rep),
                                               rng::Purpose::generic);
      GenSpec gen = spec.gen;
      gen.seed = rep_seed;
      Dataset data;
      std::unique_ptr<Loss> train;
      bool generated = false;
      std::string gen_error;
      try {
        data = make_dataset(gen);
        train = make_train_loss(data, gen, spec.solver.subsolver);
        generated = true;
      } catch (const std::exception& e) {
        gen_error = e.what();
      }
      for (std::size_t m = 0; m < methods; ++m) {
        std::size_t slot = static_cast<std::size_t>(rep) * methods + m;
        if (!generated) {
          cell_rows[slot] = failure_row(spec, spec.methods[m], rep, rep_seed);
          std::lock_guard<std::mutex> lock(error_mutex);
          out.errors.push_back(cell.label + " rep " + std::to_string(rep) + ": " + gen_error);
          continue;
        }
        try {
          cell_rows[slot] = run_one(spec, spec.methods[m], rep, rep_seed, data, *train,
                                    plan.include_timing);
        } catch (const std::exception& e) {
          cell_rows[slot] = failure_row(spec, spec.methods[m], rep, rep_seed);
          std::lock_guard<std::mutex> lock(error_mutex);
          out.errors.push_back(cell.label + " rep " + std::to_string(rep) + " " +
                               to_string(spec.methods[m]) + ": " + e.what());
        }
      }
    };

    unsigned hw = std::thread::hardware_concurrency();
    int workers = plan.workers > 0 ? plan.workers : static_cast<int>(hw > 0 ? hw : 1);
    workers = std::min(workers, reps);
    if (workers <= 1) {
      for (int rep = 0; rep < reps; ++rep) work_rep(rep);
    } else {
      std::atomic<int> next{0};
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(workers));
      for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
          for (int rep = next.fetch_add(1); rep < reps; rep = next.fetch_add(1)) work_rep(rep);
        });
      for (std::thread& th : pool) th.join();
    }

    out.rows.insert(out.rows.end(), std::make_move_iterator(cell_rows.begin()),
                    std::make_move_iterator(cell_rows.end()));
  }
  return out;
}

namespace {

struct GroupKey {
  std::string method;
  Index n, p, k, t;
  double rho, r;
  bool operator==(const GroupKey&) const = default;
};

}  // namespace

std::vector<SummaryRow> summarize(std::span<const ResultRow> rows) {
  std::vector<GroupKey> keys;
  std::vector<std::vector<const ResultRow*>> groups;
  for (const ResultRow& row : rows) {
    GroupKey key{row.method, row.n, row.p, row.k, row.t, row.rho, row.r};
    std::size_t g = 0;
    for (; g < keys.size(); ++g)
      if (keys[g] == key) break;
    if (g == keys.size()) {
      keys.push_back(key);
      groups.emplace_back();
    }
    groups[g].push_back(&row);
  }

  std::vector<SummaryRow> out;
  for (std::size_t g = 0; g < keys.size(); ++g) {
    SummaryRow s;
    s.method = keys[g].method;
    s.n = keys[g].n;
    s.p = keys[g].p;
    s.k = keys[g].k;
    s.t = keys[g].t;
    s.rho = keys[g].rho;
    s.r = keys[g].r;
    double are_sum = 0.0, pdr_sum = 0.0, fdr_sum = 0.0, cdr_sum = 0.0;
    double car_sum = 0.0, iters_sum = 0.0, time_sum = 0.0;
    int ok = 0, car_count = 0;
    for (const ResultRow* row : groups[g]) {
      ++s.replications;
      if (row->failed) {
        ++s.failures;
        continue;
      }
      ++ok;
      are_sum += row->eval.relative_error;
      pdr_sum += row->eval.pdr;
      fdr_sum += row->eval.fdr;
      cdr_sum += row->eval.cdr;
      iters_sum += row->eval.iterations;
      time_sum += row->eval.wall_time_s;
      if (row->eval.car) {
        car_sum += *row->eval.car;
        ++car_count;
      }
    }
    if (ok > 0) {
      s.are_mean = are_sum / ok;
      s.pdr_mean = pdr_sum / ok;
      s.fdr_mean = fdr_sum / ok;
      s.cdr_mean = cdr_sum / ok;
      s.iters_mean = iters_sum / ok;
      s.time_mean = time_sum / ok;
      double ss = 0.0;
      for (const ResultRow* row : groups[g])
        if (!row->failed) {
          double dev = row->eval.relative_error - s.are_mean;
          ss += dev * dev;
        }
      s.are_sd = ok > 1 ? std::sqrt(ss / (ok - 1)) : 0.0;
    } else {
      s.are_mean = s.are_sd = quiet_nan();
      s.pdr_mean = s.fdr_mean = s.cdr_mean = quiet_nan();
      s.iters_mean = s.time_mean = quiet_nan();
    }
    s.car_mean = car_count > 0 ? car_sum / car_count : quiet_nan();
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace

void write_summary_csv(const std::string& path, std::span<const SummaryRow> rows) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << "method,n,p,K,T,rho,R,reps,failures,are_mean,are_sd,pdr_mean,fdr_mean,cdr_mean,"
         "car_mean,iters_mean,time_mean\n";
  for (const SummaryRow& s : rows) {
    out << s.method << ',' << s.n << ',' << s.p << ',' << s.k << ',' << s.t << ','
        << fmt17(s.rho) << ',' << fmt17(s.r) << ',' << s.replications << ',' << s.failures
        << ',' << fmt17(s.are_mean) << ',' << fmt17(s.are_sd) << ',' << fmt17(s.pdr_mean)
        << ',' << fmt17(s.fdr_mean) << ',' << fmt17(s.cdr_mean) << ',' << fmt17(s.car_mean)
        << ',' << fmt17(s.iters_mean) << ',' << fmt17(s.time_mean) << '\n';
  }
  if (!out) throw DataError("write failed for '" + path + "'");
}

std::string format_summary(std::span<const SummaryRow> rows) {
  std::ostringstream out;
  out << "method      n     p     K    T    rho   R      are mean (sd)        pdr    fdr    "
         "cdr    car    iters  time_s\n";
  for (const SummaryRow& s : rows) {
    char line[256];
    std::snprintf(line, sizeof(line),
                  "%-10s %5lld %5lld %4lld %4lld %5.2f %6.4g  %-20s %6.3f %6.3f %6.3f %6s "
                  "%6.2f %8.4g\n",
                  s.method.c_str(), static_cast<long long>(s.n), static_cast<long long>(s.p),
                  static_cast<long long>(s.k), static_cast<long long>(s.t), s.rho, s.r,
                  (fmt4(s.are_mean) + " (" + fmt4(s.are_sd) + ")").c_str(), s.pdr_mean,
                  s.fdr_mean, s.cdr_mean,
                  std::isnan(s.car_mean) ? "-" : fmt4(s.car_mean).c_str(), s.iters_mean,
                  s.time_mean);
    out << line;
    if (s.failures > 0) out << "  ^ " << s.failures << " failed replication(s)\n";
  }
  return out.str();
}

std::vector<SummaryRow> emit_results(const std::string& csv_path,
                                     std::span<const ResultRow> rows) {
  write_results_csv(csv_path, rows);
  std::vector<ResultRow> reread = read_results_csv(csv_path);
  std::vector<SummaryRow> direct = summarize(rows);
  std::vector<SummaryRow> recomputed = summarize(reread);
  if (direct.size() != recomputed.size())
    throw std::logic_error("emit_results: summary cross-check failed (group count)");
  auto same = [](double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; };
  for (std::size_t i = 0; i < direct.size(); ++i) {
    const SummaryRow& a = direct[i];
    const SummaryRow& b = recomputed[i];
    bool match = a.method == b.method && a.n == b.n && a.p == b.p && a.k == b.k && a.t == b.t &&
                 a.rho == b.rho && a.r == b.r && a.replications == b.replications &&
                 a.failures == b.failures && same(a.are_mean, b.are_mean) &&
                 same(a.are_sd, b.are_sd) && same(a.pdr_mean, b.pdr_mean) &&
                 same(a.fdr_mean, b.fdr_mean) && same(a.cdr_mean, b.cdr_mean) &&
                 same(a.car_mean, b.car_mean) && same(a.iters_mean, b.iters_mean) &&
                 same(a.time_mean, b.time_mean);
    if (!match)
      throw std::logic_error("emit_results: summary cross-check failed (group " +
                             std::to_string(i) + ")");
  }
  return direct;
}

namespace {

ExperimentSpec base_linear_spec() {
  ExperimentSpec spec;
  spec.gen.model = Model::linear;
  spec.gen.design = DesignKind::ar1;
  spec.gen.coef = CoefKind::unit_floor;
  spec.gen.noise_sd = 1.0;
  spec.gen.signal_ratio = 100.0;
  spec.base_seed = 1;
  return spec;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig1", "fig2", "table1-rho02", "table1-rho05", "table1-rho08",
          "fig7", "fig8", "table2-rho02", "table2-rho05", "table2-rho08", "smoke"};
}

BenchPlan make_preset(const std::string& name) {
  BenchPlan plan;
  plan.name = name;

  auto cell = [&plan](std::string label, ExperimentSpec spec) {
    plan.cells.push_back({std::move(label), std::move(spec)});
  };

  if (name == "fig1") {
    ExperimentSpec spec = base_linear_spec();
    spec.gen.n = 500;
    spec.gen.p = 1000;
    spec.gen.k = 20;
    spec.gen.rho = 0.2;
    spec.methods = {Method::sdarl, Method::fixed_step};
    spec.replications = 100;
    cell("fig1", std::move(spec));
    return plan;
  }
  if (name == "fig2") {
    for (double rho : {0.2, 0.5, 0.8})
      for (Index k = 5; k <= 50; k += 5) {
        ExperimentSpec spec = base_linear_spec();
        spec.gen.n = 500;
        spec.gen.p = 1000;
        spec.gen.k = k;
        spec.gen.rho = rho;
        spec.methods = {Method::sdarl};
        spec.replications = 100;
        cell("fig2-rho" + fmt4(rho) + "-K" + std::to_string(k), std::move(spec));
      }
    return plan;
  }
  if (name.rfind("table1-", 0) == 0) {
    double rho = name == "table1-rho02" ? 0.2 : name == "table1-rho05" ? 0.5
                 : name == "table1-rho08" ? 0.8 : -1.0;
    if (rho > 0) {
      ExperimentSpec spec = base_linear_spec();
      spec.gen.design = DesignKind::neighbor;
      spec.gen.coef = CoefKind::logfloor;
      spec.gen.n = 800;
      spec.gen.p = 5000;
      spec.gen.k = 100;
      spec.gen.rho = rho;
      spec.methods = {Method::sdarl, Method::asdarl};
      spec.replications = 100;
      spec.tuning.alpha = 50;
      cell(name, std::move(spec));
      return plan;
    }
  }
  if (name == "fig7") {
    ExperimentSpec spec = base_linear_spec();
    spec.gen.model = Model::logistic;
    spec.gen.n = 300;
    spec.gen.p = 5000;
    spec.gen.k = 10;
    spec.gen.rho = 0.2;
    spec.methods = {Method::sdarl, Method::fixed_step};
    spec.replications = 100;
    cell("fig7", std::move(spec));
    return plan;
  }
  if (name == "fig8") {
    for (double rho : {0.2, 0.5, 0.8})
      for (Index k = 5; k <= 50; k += 5) {
        ExperimentSpec spec = base_linear_spec();
        spec.gen.model = Model::logistic;
        spec.gen.n = 300;
        spec.gen.p = 5000;
        spec.gen.k = k;
        spec.gen.rho = rho;
        spec.methods = {Method::sdarl};
        spec.replications = 100;
        cell("fig8-rho" + fmt4(rho) + "-K" + std::to_string(k), std::move(spec));
      }
    return plan;
  }
  if (name.rfind("table2-", 0) == 0) {
    double rho = name == "table2-rho02" ? 0.2 : name == "table2-rho05" ? 0.5
                 : name == "table2-rho08" ? 0.8 : -1.0;
    if (rho > 0) {
      ExperimentSpec spec = base_linear_spec();
      spec.gen.model = Model::logistic;
      spec.gen.design = DesignKind::neighbor;
      spec.gen.coef = CoefKind::logfloor;
      spec.gen.n = 300;
      spec.gen.p = 5000;
      spec.gen.k = 10;
      spec.gen.rho = rho;
      spec.methods = {Method::sdarl, Method::asdarl};
      spec.replications = 100;
      spec.tuning.alpha = 1;
      cell(name, std::move(spec));
      return plan;
    }
  }
  if (name == "smoke") {
    ExperimentSpec spec = base_linear_spec();
    spec.gen.n = 80;
    spec.gen.p = 120;
    spec.gen.k = 5;
    spec.gen.rho = 0.2;
    spec.gen.signal_ratio = 10.0;
    spec.gen.noise_sd = 0.5;
    spec.methods = {Method::sdarl, Method::fixed_step, Method::asdarl};
    spec.replications = 3;
    spec.tuning.alpha = 2;
    cell("smoke", std::move(spec));
    return plan;
  }

  std::string known;
  for (const std::string& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown preset '" + name + "' (known: " + known + ")");
}

}  // namespace sdarl
