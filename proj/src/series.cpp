#include "apgarch/series.hpp"

#include "apgarch/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace apgarch {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\"");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool is_missing(const std::string& cell) { return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan"; }

[[noreturn]] void parse_error(long row, const std::string& column, const std::string& what) {
  throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + ", column '" + column + "': " + what);
}

}  // namespace

LoadedSeries load_series(const SeriesFile& file) {
  std::ifstream in(file.path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + file.path);
  return load_series(in, file);
}

LoadedSeries load_series(std::istream& in, const SeriesFile& file) {
  std::string line;
  long row = 0;
  std::vector<std::string> header;
  if (file.has_header) {
    if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "empty file");
    ++row;
    header = split_row(line);
  }

  std::vector<std::vector<std::string>> rows;
  std::vector<long> row_numbers;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    rows.push_back(split_row(line));
    row_numbers.push_back(row);
  }
  if (rows.empty()) throw Error(ErrorCode::ParseError, "no data rows");
  if (!file.has_header) {
    for (std::size_t c = 0; c < rows.front().size(); ++c) header.push_back(std::to_string(c + 1));
  }

  auto find_column = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorCode::ParseError, "no column named '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  std::optional<std::size_t> date_index;
  if (file.date_column) date_index = find_column(*file.date_column);
  std::vector<std::size_t> value_index;
  if (file.value_columns.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (!date_index || c != *date_index) value_index.push_back(c);
    }
  } else {
    for (const auto& name : file.value_columns) value_index.push_back(find_column(name));
  }
  if (value_index.empty()) throw Error(ErrorCode::ParseError, "no value columns");

  LoadedSeries out;
  for (std::size_t c : value_index) out.columns.push_back(header[c]);
  const Eigen::Index m = static_cast<Eigen::Index>(value_index.size());

  std::vector<Eigen::RowVectorXd> values;
  std::vector<std::string> dates;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& cells = rows[k];
    if (cells.size() != header.size()) {
      parse_error(row_numbers[k], std::to_string(cells.size()) + " cells",
                  "expected " + std::to_string(header.size()) + " cells");
    }
    Eigen::RowVectorXd v(m);
    bool missing = false;
    for (Eigen::Index j = 0; j < m; ++j) {
      const std::string& cell = cells[value_index[j]];
      if (is_missing(cell)) {
        missing = true;
        continue;
      }
      double x = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(x)) {
        parse_error(row_numbers[k], header[value_index[j]], "not a number: '" + cell + "'");
      }
      if (file.kind == SeriesFile::Kind::Prices && x <= 0.0) {
        throw Error(ErrorCode::NonPositivePrice, "row " + std::to_string(row_numbers[k]) + ", column '" +
                                                     header[value_index[j]] + "': price " + cell + " is not positive");
      }
      v[j] = x;
    }
    if (missing) {
      ++out.dropped_rows;
      continue;
    }
    values.push_back(v);
    dates.push_back(date_index ? cells[*date_index] : std::string());
  }

  if (file.kind == SeriesFile::Kind::Returns) {
    out.returns.resize(static_cast<Eigen::Index>(values.size()), m);
    for (std::size_t t = 0; t < values.size(); ++t) out.returns.row(static_cast<Eigen::Index>(t)) = values[t];
    if (date_index) out.dates = dates;
  } else {
    if (values.size() < 2) throw Error(ErrorCode::ParseError, "need at least two complete price rows");
    out.returns.resize(static_cast<Eigen::Index>(values.size() - 1), m);
    for (std::size_t t = 1; t < values.size(); ++t) {
      out.returns.row(static_cast<Eigen::Index>(t - 1)) =
          file.scale * (values[t].array().log() - values[t - 1].array().log()).matrix();
    }
    if (date_index) out.dates.assign(dates.begin() + 1, dates.end());
  }
  return out;
}

std::vector<Window> split_windows(long n, int k) {
  if (k < 1) throw Error(ErrorCode::InvalidSpec, "number of subperiods must be at least 1");
  const long base = n / k;
  if (base < 1) throw Error(ErrorCode::NotEnoughData, "fewer rows than subperiods");
  std::vector<Window> out;
  for (int i = 0; i < k; ++i) out.push_back({i * base, i + 1 < k ? base : n - i * base});
  return out;
}

}  // namespace apgarch
