#pragma once

#include "apgarch/volatility.hpp"

#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace apgarch {

struct SeriesFile {
  enum class Kind { Prices, Returns };

  std::string path;
  bool has_header = true;
  std::optional<std::string> date_column;
  std::vector<std::string> value_columns;  // empty: every column except the date column
  Kind kind = Kind::Returns;
  double scale = 100.0;                    // applied to log differences of prices only
};

struct LoadedSeries {
  ReturnsMatrix returns;
  std::vector<std::string> columns;
  std::vector<std::string> dates;  // date of each return row, empty without a date column
  long dropped_rows = 0;           // input rows with a missing value
};

/// Reads a CSV series. Cells that are empty, "NA" or "NaN" count as missing
/// and drop their row before differencing. Without a header, columns are
/// named "1", "2", ... Throws ParseError (with row and column) or
/// NonPositivePrice.
LoadedSeries load_series(const SeriesFile& file);
LoadedSeries load_series(std::istream& in, const SeriesFile& file);

/// Consecutive windows of floor(n / k) rows, the remainder joining the last.
struct Window {
  long begin = 0;
  long length = 0;
};
std::vector<Window> split_windows(long n, int k);

}  // namespace apgarch
