#pragma once

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdarl/experiment.hpp"
#include "sdarl/types.hpp"

namespace sdarl {

// Malformed input files raise this (CLI exit code 2).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// How sparse-text labels are interpreted. `binary` maps {-1,+1} or {0,1} to
// {0,1}; `real` keeps the raw value (synthetic linear responses).
enum class LabelPolicy { binary, real };

struct SparseTextData {
  Eigen::MatrixXd design;            // densified; normalized when requested
  Eigen::VectorXd response;
  Eigen::VectorXd scales;            // column scale factors (ones when raw)
  std::vector<Index> zero_columns;   // all-zero columns (excluded from fitting)
  Index dropped_rows = 0;            // vacant rows removed
  Index declared_dim = 0;            // largest feature index seen
  bool normalized = false;
};

// Read "label idx:val idx:val ..." lines with 1-based, strictly increasing
// feature indices. Lines with no features are vacant and dropped (counted).
// Comment lines start with '#'. With normalize set, columns are scaled to
// sqrt(n) and all-zero columns are reported instead of scaled.
SparseTextData read_sparse_text(const std::string& path, bool normalize = true,
                                LabelPolicy labels = LabelPolicy::binary);

// Inverse writer: one line per row, nonzeros only, 1-based indices, doubles
// printed with enough digits for an exact round trip.
void write_sparse_text(const std::string& path, const Eigen::MatrixXd& design,
                       const Eigen::VectorXd& response);

// Results CSV with the fixed header
//   method,seed,rep,n,p,K,T,rho,R,are,pdr,fdr,cdr,car,iters,time_s
// Doubles print with %.17g (exact round trip); absent car prints empty.
void write_results_csv(const std::string& path, std::span<const ResultRow> rows);
std::vector<ResultRow> read_results_csv(const std::string& path);

// Flat "key = value" config ('#' comments, blank lines ok). Unknown keys and
// missing required keys raise DataError naming every offender; field values
// then pass the usual validation.
ExperimentSpec read_config(const std::string& path);

// Serialize a spec in the same key = value format (gen echoes its settings).
std::string format_config(const ExperimentSpec& spec);

}  // namespace sdarl
