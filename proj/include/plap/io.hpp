#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "plap/inverse.hpp"
#include "plap/pruefer.hpp"

namespace plap {

/// Shortest decimal form that reads back to the same double.
std::string format_double(double x);

/// One eigenfunction's zeros as stored in a nodal data file.
struct NodalRecord {
  int n = 0;
  double lambda = 0.0;
  bool has_lambda = false;
  std::vector<double> zeros;  // x_0 < x_1 < ... in [0, 1)
};

/// Columns n,k,x_k, plus lambda when every record carries one.
void write_nodal_csv(std::ostream& out, const std::vector<NodalRecord>& records);

/// Reads the columns by header name; '#' lines and blank lines are skipped.
/// k must run 0, 1, ... within each n. Records come back sorted by n.
std::vector<NodalRecord> read_nodal_csv(std::istream& in);

/// Zeros in [0, 1) of a nodal set, as one record.
NodalRecord to_record(int n, const NodalSet& nodes);

/// Columns x,F_n,variant,n,wrap; wrap is 1 on the periodic wrap-around interval.
void write_reconstruction_csv(std::ostream& out, const std::vector<ReconstructionCurve>& curves);

/// Trimmed comma-separated fields of one line.
std::vector<std::string> split_csv_line(const std::string& line);

/// Header plus data rows of a CSV file; '#' lines and blank lines are skipped.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;

  /// Index of a column; throws InputError when it is missing.
  std::size_t column(const std::string& name) const;
  bool has_column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
  int integer(std::size_t row, const std::string& name) const;
};

CsvTable read_csv_table(std::istream& in);

}  // namespace plap
