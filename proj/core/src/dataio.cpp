#include "sdarl/dataio.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "sdarl/linalg.hpp"

namespace sdarl {

namespace {

constexpr const char* kResultsHeader =
    "method,seed,rep,n,p,K,T,rho,R,are,pdr,fdr,cdr,car,iters,time_s";

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const std::string& where) {
  const std::string t = trim(s);
  if (t.empty()) throw DataError(where + ": empty number");
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) throw DataError(where + ": bad number '" + t + "'");
  return v;
}

long long parse_int(const std::string& s, const std::string& where) {
  const std::string t = trim(s);
  if (t.empty()) throw DataError(where + ": empty integer");
  char* end = nullptr;
  long long v = std::strtoll(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size()) throw DataError(where + ": bad integer '" + t + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s, const std::string& where) {
  const std::string t = trim(s);
  if (t.empty()) throw DataError(where + ": empty integer");
  char* end = nullptr;
  unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size()) throw DataError(where + ": bad integer '" + t + "'");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

SparseTextData read_sparse_text(const std::string& path, bool normalize, LabelPolicy labels) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");

  struct Entry {
    Index row;
    Index col;
    double value;
  };
  std::vector<Entry> entries;
  std::vector<double> kept_labels;
  Index max_col = -1;
  Index dropped = 0;

  std::string line;
  Index line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string where = "line " + std::to_string(line_no);
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;

    std::istringstream row(t);
    std::string token;
    row >> token;

    double label;
    if (labels == LabelPolicy::binary) {
      if (token == "1" || token == "+1")
        label = 1.0;
      else if (token == "-1" || token == "0")
        label = 0.0;
      else
        throw DataError(where + ": label must be -1/+1 or 0/1, got '" + token + "'");
    } else {
      label = parse_double(token, where);
    }

    Index row_index = static_cast<Index>(kept_labels.size());
    Index prev_col = 0;  // 1-based; columns must increase strictly
    Index features = 0;
    while (row >> token) {
      std::size_t colon = token.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == token.size())
        throw DataError(where + ": expected index:value, got '" + token + "'");
      long long raw = parse_int(token.substr(0, colon), where);
      if (raw < 1) throw DataError(where + ": feature indices are 1-based, got " +
                                   std::to_string(raw));
      if (raw <= prev_col)
        throw DataError(where + ": feature indices must be strictly increasing");
      prev_col = static_cast<Index>(raw);
      double value = parse_double(token.substr(colon + 1), where);
      Index col = static_cast<Index>(raw) - 1;
      entries.push_back({row_index, col, value});
      max_col = std::max(max_col, col);
      ++features;
    }
    if (features == 0) {
      // Vacant row: no feature entries at all.
      ++dropped;
      continue;
    }
    kept_labels.push_back(label);
  }

  if (kept_labels.empty()) throw DataError("'" + path + "': no usable rows");

  SparseTextData data;
  data.dropped_rows = dropped;
  data.declared_dim = max_col + 1;
  const Index n = static_cast<Index>(kept_labels.size());
  const Index p = max_col + 1;
  data.design = Eigen::MatrixXd::Zero(n, p);
  for (const Entry& e : entries) data.design(e.row, e.col) = e.value;
  data.response = Eigen::Map<Eigen::VectorXd>(kept_labels.data(), n);
  data.scales = Eigen::VectorXd::Ones(p);

  for (Index j = 0; j < p; ++j)
    if (data.design.col(j).norm() == 0.0) data.zero_columns.push_back(j);

  if (normalize) {
    ColumnScaling scaled = normalize_columns(data.design, /*allow_zero_columns=*/true);
    data.design = std::move(scaled.matrix);
    data.scales = std::move(scaled.scales);
    data.normalized = true;
  }
  return data;
}

void write_sparse_text(const std::string& path, const Eigen::MatrixXd& design,
                       const Eigen::VectorXd& response) {
  if (design.rows() != response.size())
    throw std::invalid_argument("write_sparse_text: row/response mismatch");
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  for (Index i = 0; i < design.rows(); ++i) {
    out << format_double(response[i]);
    for (Index j = 0; j < design.cols(); ++j)
      if (design(i, j) != 0.0) out << ' ' << (j + 1) << ':' << format_double(design(i, j));
    out << '\n';
  }
  if (!out) throw DataError("write failed for '" + path + "'");
}

void write_results_csv(const std::string& path, std::span<const ResultRow> rows) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << kResultsHeader << '\n';
  for (const ResultRow& r : rows) {
    out << r.method << ',' << r.seed << ',' << r.rep << ',' << r.n << ',' << r.p << ','
        << r.k << ',' << r.t << ',' << format_double(r.rho) << ',' << format_double(r.r)
        << ',' << format_double(r.eval.relative_error) << ',' << format_double(r.eval.pdr)
        << ',' << format_double(r.eval.fdr) << ',' << format_double(r.eval.cdr) << ','
        << (r.eval.car ? format_double(*r.eval.car) : std::string()) << ','
        << r.eval.iterations << ',' << format_double(r.eval.wall_time_s) << '\n';
  }
  if (!out) throw DataError("write failed for '" + path + "'");
}

std::vector<ResultRow> read_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || trim(line) != kResultsHeader)
    throw DataError("'" + path + "': missing or unexpected results header");
  std::vector<ResultRow> rows;
  Index line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::string where = "line " + std::to_string(line_no);
    std::vector<std::string> f = split(trim(line), ',');
    if (f.size() != 16) throw DataError(where + ": expected 16 columns, got " +
                                        std::to_string(f.size()));
    ResultRow r;
    r.method = f[0];
    r.seed = parse_u64(f[1], where);
    r.rep = static_cast<int>(parse_int(f[2], where));
    r.n = static_cast<Index>(parse_int(f[3], where));
    r.p = static_cast<Index>(parse_int(f[4], where));
    r.k = static_cast<Index>(parse_int(f[5], where));
    r.t = static_cast<Index>(parse_int(f[6], where));
    r.rho = parse_double(f[7], where);
    r.r = parse_double(f[8], where);
    r.eval.relative_error = parse_double(f[9], where);
    r.eval.pdr = parse_double(f[10], where);
    r.eval.fdr = parse_double(f[11], where);
    r.eval.cdr = parse_double(f[12], where);
    if (!trim(f[13]).empty()) r.eval.car = parse_double(f[13], where);
    r.eval.iterations = static_cast<int>(parse_int(f[14], where));
    r.eval.wall_time_s = parse_double(f[15], where);
    r.failed = std::isnan(r.eval.relative_error);
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

struct ConfigMap {
  std::map<std::string, std::string> values;
  std::vector<std::string> unknown;

  bool take(const std::string& key, std::string& out) {
    auto it = values.find(key);
    if (it == values.end()) return false;
    out = it->second;
    values.erase(it);
    return true;
  }
};

}  // namespace

ExperimentSpec read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");

  ConfigMap cfg;
  std::string line;
  Index line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw DataError("line " + std::to_string(line_no) + ": expected 'key = value'");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw DataError("line " + std::to_string(line_no) + ": empty key");
    if (cfg.values.count(key))
      throw DataError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    cfg.values[key] = value;
  }

  ExperimentSpec spec;
  std::string v;

  std::vector<std::string> missing;
  auto require = [&](const char* key) {
    if (cfg.take(key, v)) return true;
    missing.push_back(key);
    return false;
  };

  if (require("n")) spec.gen.n = static_cast<Index>(parse_int(v, "n"));
  if (require("p")) spec.gen.p = static_cast<Index>(parse_int(v, "p"));
  if (require("K")) spec.gen.k = static_cast<Index>(parse_int(v, "K"));

  if (cfg.take("model", v)) {
    if (v == "linear")
      spec.gen.model = Model::linear;
    else if (v == "logistic")
      spec.gen.model = Model::logistic;
    else
      throw DataError("model: expected linear or logistic, got '" + v + "'");
  }
  if (cfg.take("design", v)) {
    if (v == "ar1")
      spec.gen.design = DesignKind::ar1;
    else if (v == "neighbor")
      spec.gen.design = DesignKind::neighbor;
    else
      throw DataError("design: expected ar1 or neighbor, got '" + v + "'");
  }
  if (cfg.take("coef", v)) {
    if (v == "unit_floor")
      spec.gen.coef = CoefKind::unit_floor;
    else if (v == "logfloor")
      spec.gen.coef = CoefKind::logfloor;
    else
      throw DataError("coef: expected unit_floor or logfloor, got '" + v + "'");
  }
  if (cfg.take("rho", v)) spec.gen.rho = parse_double(v, "rho");
  if (cfg.take("R", v)) spec.gen.signal_ratio = parse_double(v, "R");
  if (cfg.take("sigma1", v)) spec.gen.noise_sd = parse_double(v, "sigma1");
  if (cfg.take("train_fraction", v)) spec.gen.train_fraction = parse_double(v, "train_fraction");
  if (cfg.take("intercept", v)) spec.gen.unit_intercept = parse_int(v, "intercept") != 0;
  if (cfg.take("seed", v)) {
    spec.gen.seed = parse_u64(v, "seed");
    spec.base_seed = spec.gen.seed;
  }
  if (cfg.take("methods", v)) {
    spec.methods.clear();
    for (const std::string& name : split(v, ','))
      spec.methods.push_back(method_from_string(trim(name)));
    if (spec.methods.empty()) throw DataError("methods: empty list");
  }
  if (cfg.take("reps", v)) spec.replications = static_cast<int>(parse_int(v, "reps"));
  if (cfg.take("T", v)) spec.target_size = static_cast<Index>(parse_int(v, "T"));
  if (cfg.take("nu", v)) spec.solver.backtrack_factor = parse_double(v, "nu");
  if (cfg.take("sigma", v)) spec.solver.sufficient_decrease = parse_double(v, "sigma");
  if (cfg.take("max_outer", v))
    spec.solver.max_outer = static_cast<int>(parse_int(v, "max_outer"));
  if (cfg.take("max_exponent", v))
    spec.solver.max_exponent = static_cast<int>(parse_int(v, "max_exponent"));
  if (cfg.take("subsolver_tol", v))
    spec.solver.subsolver.grad_tol = parse_double(v, "subsolver_tol");
  if (cfg.take("subsolver_max_iter", v))
    spec.solver.subsolver.max_iterations = static_cast<int>(parse_int(v, "subsolver_max_iter"));
  if (cfg.take("alpha", v)) spec.tuning.alpha = static_cast<Index>(parse_int(v, "alpha"));
  if (cfg.take("Q", v)) spec.tuning.q = static_cast<Index>(parse_int(v, "Q"));
  if (cfg.take("criterion", v)) {
    if (v == "hbic")
      spec.tuning.criterion = Criterion::hbic;
    else if (v == "cv")
      spec.tuning.criterion = Criterion::cv;
    else
      throw DataError("criterion: expected hbic or cv, got '" + v + "'");
  }
  if (cfg.take("cv_folds", v)) spec.tuning.cv_folds = static_cast<int>(parse_int(v, "cv_folds"));
  if (cfg.take("cv_seed", v)) spec.tuning.cv_seed = parse_u64(v, "cv_seed");

  std::string problems;
  if (!missing.empty()) {
    problems += "missing required keys:";
    for (const std::string& k : missing) problems += " " + k;
  }
  if (!cfg.values.empty()) {
    if (!problems.empty()) problems += "; ";
    problems += "unknown keys:";
    for (const auto& [k, unused] : cfg.values) problems += " " + k;
  }
  if (!problems.empty()) throw DataError("'" + path + "': " + problems);

  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError("'" + path + "': " + e.what());
  }
  return spec;
}

std::string format_config(const ExperimentSpec& spec) {
  std::ostringstream out;
  out << "model = " << to_string(spec.gen.model) << '\n'
      << "design = " << to_string(spec.gen.design) << '\n'
      << "coef = " << to_string(spec.gen.coef) << '\n'
      << "n = " << spec.gen.n << '\n'
      << "p = " << spec.gen.p << '\n'
      << "K = " << spec.gen.k << '\n'
      << "rho = " << format_double(spec.gen.rho) << '\n'
      << "R = " << format_double(spec.gen.signal_ratio) << '\n'
      << "sigma1 = " << format_double(spec.gen.noise_sd) << '\n'
      << "train_fraction = " << format_double(spec.gen.train_fraction) << '\n'
      << "intercept = " << (spec.gen.unit_intercept ? 1 : 0) << '\n'
      << "seed = " << spec.gen.seed << '\n';
  out << "methods = ";
  for (std::size_t i = 0; i < spec.methods.size(); ++i)
    out << (i > 0 ? "," : "") << to_string(spec.methods[i]);
  out << '\n';
  out << "reps = " << spec.replications << '\n'
      << "T = " << spec.target_size << '\n'
      << "nu = " << format_double(spec.solver.backtrack_factor) << '\n'
      << "sigma = " << format_double(spec.solver.sufficient_decrease) << '\n'
      << "max_outer = " << spec.solver.max_outer << '\n'
      << "max_exponent = " << spec.solver.max_exponent << '\n'
      << "subsolver_tol = " << format_double(spec.solver.subsolver.grad_tol) << '\n'
      << "subsolver_max_iter = " << spec.solver.subsolver.max_iterations << '\n'
      << "alpha = " << spec.tuning.alpha << '\n'
      << "Q = " << spec.tuning.q << '\n'
      << "criterion = " << (spec.tuning.criterion == Criterion::hbic ? "hbic" : "cv") << '\n'
      << "cv_folds = " << spec.tuning.cv_folds << '\n'
      << "cv_seed = " << spec.tuning.cv_seed << '\n';
  return out.str();
}

}  // namespace sdarl
