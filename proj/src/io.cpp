#include "bid/io.hpp"

#include "bid/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

namespace bid {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    if (end == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

std::string where(std::size_t line, std::size_t column) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

double parse_number(std::string_view field, std::size_t line, std::size_t column) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = field.data() + field.size();
  if (!field.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw InputError("cannot parse '" + std::string(field) + "' as a number at " +
                     where(line, column));
  if (!std::isfinite(value))
    throw InputError("non-finite value '" + std::string(field) + "' at " + where(line, column));
  return value;
}

std::size_t parse_index(std::string_view field, std::size_t line, std::size_t column) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw InputError("cannot parse '" + std::string(field) + "' as an index at " +
                     where(line, column));
  return value;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

} // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw InputError("write failed for '" + path.string() + "'");
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

MatrixFormat format_from_path(const std::filesystem::path& path) {
  const std::string ext = lower(path.extension().string());
  return ext == ".mtx" || ext == ".mm" ? MatrixFormat::matrix_market : MatrixFormat::csv;
}

ObservedMatrix parse_csv(const std::string& text, bool header) {
  const auto lines = split_lines(text);
  std::vector<double> values;
  std::vector<std::uint8_t> mask;
  std::size_t width = 0;
  std::size_t rows = 0;
  bool skipped_header = !header;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const std::string_view line = lines[ln];
    if (trim(line).empty()) continue;
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    std::size_t fields = 0;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      const std::string_view field =
          trim(line.substr(start, comma == std::string_view::npos ? line.size() - start
                                                                   : comma - start));
      ++fields;
      if (field.empty()) {
        values.push_back(0.0);
        mask.push_back(0);
      } else {
        values.push_back(parse_number(field, ln + 1, fields));
        mask.push_back(1);
      }
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      width = fields;
    } else if (fields != width) {
      throw InputError("inconsistent row width at line " + std::to_string(ln + 1) + ": expected " +
                       std::to_string(width) + " fields, found " + std::to_string(fields));
    }
    ++rows;
  }
  if (rows == 0) throw InputError("CSV input contains no data rows");
  return ObservedMatrix(DenseMatrix(rows, width, std::move(values)), std::move(mask));
}

ObservedMatrix parse_matrix_market(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw InputError("empty MatrixMarket input");
  const auto banner = split_ws(lines[0]);
  if (banner.size() < 5 || lower(banner[0]) != "%%matrixmarket" || lower(banner[1]) != "matrix" ||
      lower(banner[2]) != "coordinate" ||
      (lower(banner[3]) != "real" && lower(banner[3]) != "integer") ||
      lower(banner[4]) != "general") {
    throw InputError("line 1: expected '%%MatrixMarket matrix coordinate real general'");
  }
  std::size_t ln = 1;
  while (ln < lines.size() && (trim(lines[ln]).empty() || trim(lines[ln]).front() == '%')) ++ln;
  if (ln >= lines.size()) throw InputError("MatrixMarket input has no size line");
  const auto size = split_ws(lines[ln]);
  if (size.size() != 3) throw InputError("line " + std::to_string(ln + 1) + ": expected 'rows cols entries'");
  const std::size_t rows = parse_index(size[0], ln + 1, 1);
  const std::size_t cols = parse_index(size[1], ln + 1, 2);
  const std::size_t nnz = parse_index(size[2], ln + 1, 3);
  if (rows == 0 || cols == 0) throw InputError("MatrixMarket matrix has a zero dimension");

  DenseMatrix values(rows, cols);
  std::vector<std::uint8_t> mask(rows * cols, 0);
  std::size_t seen = 0;
  for (++ln; ln < lines.size(); ++ln) {
    const auto t = trim(lines[ln]);
    if (t.empty() || t.front() == '%') continue;
    const auto parts = split_ws(t);
    if (parts.size() != 3)
      throw InputError("line " + std::to_string(ln + 1) + ": expected 'row col value'");
    const std::size_t i = parse_index(parts[0], ln + 1, 1);
    const std::size_t j = parse_index(parts[1], ln + 1, 2);
    if (i < 1 || i > rows || j < 1 || j > cols)
      throw InputError("index out of range at " + where(ln + 1, 1));
    const double v = parse_number(parts[2], ln + 1, 3);
    std::uint8_t& cell = mask[(i - 1) * cols + (j - 1)];
    if (cell) throw InputError("duplicate entry (" + std::to_string(i) + ", " + std::to_string(j) +
                               ") at line " + std::to_string(ln + 1));
    cell = 1;
    values(i - 1, j - 1) = v;
    ++seen;
  }
  if (seen != nnz)
    throw InputError("MatrixMarket header declares " + std::to_string(nnz) + " entries, found " +
                     std::to_string(seen));
  return ObservedMatrix(std::move(values), std::move(mask));
}

ObservedMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format,
                           bool csv_header) {
  const std::string text = read_file(path);
  try {
    return format == MatrixFormat::csv ? parse_csv(text, csv_header) : parse_matrix_market(text);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void save_csv(const std::filesystem::path& path, const ObservedMatrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      if (m.is_observed(i, j)) out += format_double(m.values(i, j));
    }
    out += '\n';
  }
  write_file(path, out);
}

void save_matrix_market(const std::filesystem::path& path, const ObservedMatrix& m) {
  std::string out = "%%MatrixMarket matrix coordinate real general\n";
  out += std::to_string(m.rows()) + " " + std::to_string(m.cols()) + " " +
         std::to_string(m.observed_count()) + "\n";
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m.is_observed(i, j))
        out += std::to_string(i + 1) + " " + std::to_string(j + 1) + " " +
               format_double(m.values(i, j)) + "\n";
  write_file(path, out);
}

void save_dense_csv(const std::filesystem::path& path, const DenseMatrix& m) {
  save_csv(path, ObservedMatrix(m));
}

void validate(const PreprocessConfig& cfg) {
  if (cfg.cap_value && !(*cfg.cap_value > 0.0)) throw ConfigError("cap value must be positive");
}

ObservedMatrix preprocess(const ObservedMatrix& data, const PreprocessConfig& cfg) {
  validate(cfg);
  DenseMatrix v = data.values;
  std::vector<std::uint8_t> mask = data.observed;
  const std::size_t cols0 = data.cols();

  for (std::size_t idx = 0; idx < v.size(); ++idx) {
    if (!mask[idx]) continue;
    double& x = v.data()[idx];
    if (cfg.undo_log) x = std::exp(x);
    if (cfg.cap_value && x > *cfg.cap_value) x = *cfg.cap_value;
    if (!std::isfinite(x)) throw NumericalError("undo-log overflowed to a non-finite value");
  }

  // Drop sparse rows and columns until every survivor has enough observations.
  std::vector<std::size_t> keep_rows(data.rows());
  std::vector<std::size_t> keep_cols(cols0);
  for (std::size_t i = 0; i < keep_rows.size(); ++i) keep_rows[i] = i;
  for (std::size_t j = 0; j < keep_cols.size(); ++j) keep_cols[j] = j;
  const std::size_t need = cfg.min_observed_per_vector;
  for (bool changed = need > 0; changed;) {
    changed = false;
    std::vector<std::size_t> rows_next;
    for (std::size_t i : keep_rows) {
      std::size_t c = 0;
      for (std::size_t j : keep_cols) c += mask[i * cols0 + j];
      if (c >= need) rows_next.push_back(i);
    }
    std::vector<std::size_t> cols_next;
    for (std::size_t j : keep_cols) {
      std::size_t c = 0;
      for (std::size_t i : rows_next) c += mask[i * cols0 + j];
      if (c >= need) cols_next.push_back(j);
    }
    changed = rows_next.size() != keep_rows.size() || cols_next.size() != keep_cols.size();
    keep_rows = std::move(rows_next);
    keep_cols = std::move(cols_next);
  }
  if (keep_rows.empty() || keep_cols.empty())
    throw InputError("preprocessing removed every row or column");

  const std::size_t m = keep_rows.size();
  const std::size_t n = keep_cols.size();
  DenseMatrix out(m, n);
  std::vector<std::uint8_t> out_mask(m * n, 0);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t src = keep_rows[r] * cols0 + keep_cols[c];
      out_mask[r * n + c] = mask[src];
      out(r, c) = mask[src] ? v.data()[src] : 0.0;
    }

  if (cfg.standardize) {
    for (std::size_t c = 0; c < n; ++c) {
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t r = 0; r < m; ++r)
        if (out_mask[r * n + c]) {
          sum += out(r, c);
          ++count;
        }
      const std::string name = "column " + std::to_string(keep_cols[c]);
      if (count == 0) throw NumericalError("cannot standardize " + name + ": no observed entries");
      const double mean = sum / static_cast<double>(count);
      double ss = 0.0;
      for (std::size_t r = 0; r < m; ++r)
        if (out_mask[r * n + c]) ss += (out(r, c) - mean) * (out(r, c) - mean);
      const double sd = std::sqrt(ss / static_cast<double>(count));
      if (!(sd > 0.0)) throw NumericalError("cannot standardize " + name + ": zero observed variance");
      for (std::size_t r = 0; r < m; ++r)
        if (out_mask[r * n + c]) out(r, c) = (out(r, c) - mean) / sd;
    }
  }
  // Unobserved cells are always zero in an ObservedMatrix; fill_missing_zero
  // only documents that choice.

  if (cfg.duplicate_columns) {
    DenseMatrix dup(m, 2 * n);
    std::vector<std::uint8_t> dup_mask(m * 2 * n);
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        dup(r, c) = dup(r, c + n) = out(r, c);
        dup_mask[r * 2 * n + c] = dup_mask[r * 2 * n + c + n] = out_mask[r * n + c];
      }
    return ObservedMatrix(std::move(dup), std::move(dup_mask));
  }
  return ObservedMatrix(std::move(out), std::move(out_mask));
}

const std::vector<double>* Table::find(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return &columns[i];
  return nullptr;
}

void save_trace(const std::filesystem::path& path, const GibbsTrace& trace) {
  std::string out = "iteration,mse,mse_observed,sigma2";
  for (const auto& p : trace.probes)
    out += ",y_" + std::to_string(p.k) + "_" + std::to_string(p.l);
  out += '\n';
  for (std::size_t t = 0; t < trace.iterations(); ++t) {
    out += std::to_string(t + 1);
    out += ',' + format_double(trace.mse_per_iter[t]);
    out += ',' + format_double(trace.mse_observed_per_iter[t]);
    out += ',' + format_double(trace.sigma2_chain[t]);
    for (const auto& chain : trace.y_entry_chains) out += ',' + format_double(chain[t]);
    out += '\n';
  }
  write_file(path, out);
}

Table load_table(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto lines = split_lines(text);
  Table table;
  std::size_t ln = 0;
  while (ln < lines.size() && trim(lines[ln]).empty()) ++ln;
  if (ln == lines.size()) throw InputError(path.string() + ": empty table");
  {
    std::string_view header = lines[ln];
    std::size_t start = 0;
    for (;;) {
      const auto comma = header.find(',', start);
      table.names.emplace_back(
          trim(header.substr(start, comma == std::string_view::npos ? header.size() - start
                                                                     : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  table.columns.assign(table.names.size(), {});
  for (++ln; ln < lines.size(); ++ln) {
    const std::string_view line = lines[ln];
    if (trim(line).empty()) continue;
    std::size_t start = 0;
    std::size_t field = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      const auto text_field = trim(
          line.substr(start, comma == std::string_view::npos ? line.size() - start : comma - start));
      if (field >= table.names.size())
        throw InputError(path.string() + ": too many fields at line " + std::to_string(ln + 1));
      table.columns[field].push_back(parse_number(text_field, ln + 1, field + 1));
      ++field;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (field != table.names.size())
      throw InputError(path.string() + ": expected " + std::to_string(table.names.size()) +
                       " fields at line " + std::to_string(ln + 1));
  }
  return table;
}

} // namespace bid
