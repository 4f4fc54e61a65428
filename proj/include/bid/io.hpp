#pragma once

#include "bid/linalg.hpp"
#include "bid/model.hpp"
#include "bid/sampler.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bid {

enum class MatrixFormat { csv, matrix_market };

/// Picks the format from the extension: .mtx / .mm are MatrixMarket, anything else CSV.
MatrixFormat format_from_path(const std::filesystem::path& path);

/// Empty CSV fields and absent MatrixMarket entries become unobserved zeros.
/// Throws InputError with line/column context on malformed input.
ObservedMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format,
                           bool csv_header = false);
ObservedMatrix parse_csv(const std::string& text, bool header = false);
ObservedMatrix parse_matrix_market(const std::string& text);

/// Unobserved cells are written as empty fields.
void save_csv(const std::filesystem::path& path, const ObservedMatrix& m);
void save_matrix_market(const std::filesystem::path& path, const ObservedMatrix& m);
void save_dense_csv(const std::filesystem::path& path, const DenseMatrix& m);
std::string format_double(double v);

struct PreprocessConfig {
  std::optional<double> cap_value = 100.0;
  bool undo_log = false;
  bool standardize = true;
  bool duplicate_columns = true;
  std::size_t min_observed_per_vector = 3;
  bool fill_missing_zero = true;
};

void validate(const PreprocessConfig& cfg);

/// undo-log, cap, drop sparse rows/columns, per-column standardization over
/// observed cells, zero fill, column duplication ([A | A]), in that order.
ObservedMatrix preprocess(const ObservedMatrix& data, const PreprocessConfig& cfg);

/// Named numeric columns, as read back from a trace CSV.
struct Table {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  const std::vector<double>* find(const std::string& name) const;
};

void save_trace(const std::filesystem::path& path, const GibbsTrace& trace);
Table load_table(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

} // namespace bid
