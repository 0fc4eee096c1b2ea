#include "plap/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>

#include "plap/error.hpp"

namespace plap {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, std::size_t line_no) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    throw InputError("line " + std::to_string(line_no) + ": '" + field + "' is not a finite number");
  return v;
}

int parse_index(const std::string& field, std::size_t line_no) {
  int v = 0;
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), last, v);
  if (ec != std::errc() || ptr != last)
    throw InputError("line " + std::to_string(line_no) + ": '" + field + "' is not an integer");
  return v;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw InputError("CSV input has no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

bool CsvTable::has_column(const std::string& name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

double CsvTable::number(std::size_t row, const std::string& name) const {
  return parse_number(rows[row][column(name)], line_numbers[row]);
}

int CsvTable::integer(std::size_t row, const std::string& name) const {
  return parse_index(rows[row][column(name)], line_numbers[row]);
}

CsvTable read_csv_table(std::istream& in) {
  CsvTable t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    auto fields = split_csv_line(s);
    if (t.columns.empty()) {
      t.columns = std::move(fields);
      continue;
    }
    if (fields.size() != t.columns.size())
      throw InputError("line " + std::to_string(line_no) + ": expected " + std::to_string(t.columns.size()) +
                       " fields");
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(line_no);
  }
  if (t.columns.empty()) throw InputError("CSV input is empty (a header line is required)");
  return t;
}

void write_nodal_csv(std::ostream& out, const std::vector<NodalRecord>& records) {
  const bool with_lambda =
      !records.empty() && std::all_of(records.begin(), records.end(), [](const auto& r) { return r.has_lambda; });
  out << "n,k,x_k" << (with_lambda ? ",lambda" : "") << '\n';
  for (const auto& r : records)
    for (std::size_t k = 0; k < r.zeros.size(); ++k) {
      out << r.n << ',' << k << ',' << format_double(r.zeros[k]);
      if (with_lambda) out << ',' << format_double(r.lambda);
      out << '\n';
    }
}

std::vector<NodalRecord> read_nodal_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  int col_n = -1, col_k = -1, col_x = -1, col_lambda = -1;
  std::size_t width = 0;
  std::map<int, NodalRecord> by_n;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = split_csv_line(t);
    if (col_n < 0) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] == "n") col_n = int(i);
        if (fields[i] == "k") col_k = int(i);
        if (fields[i] == "x_k") col_x = int(i);
        if (fields[i] == "lambda") col_lambda = int(i);
      }
      if (col_n < 0 || col_k < 0 || col_x < 0)
        throw InputError("nodal data needs a header with columns n, k, x_k");
      width = fields.size();
      continue;
    }
    if (fields.size() != width)
      throw InputError("line " + std::to_string(line_no) + ": expected " + std::to_string(width) + " fields");
    const int n = parse_index(fields[col_n], line_no);
    const int k = parse_index(fields[col_k], line_no);
    const double x = parse_number(fields[col_x], line_no);
    auto& rec = by_n[n];
    rec.n = n;
    if (k != int(rec.zeros.size()))
      throw InputError("line " + std::to_string(line_no) + ": k values for n=" + std::to_string(n) +
                       " must run 0, 1, 2, ...");
    if (!(x >= 0.0 && x < 1.0)) throw InputError("line " + std::to_string(line_no) + ": x_k must lie in [0, 1)");
    if (!rec.zeros.empty() && !(x > rec.zeros.back()))
      throw InputError("line " + std::to_string(line_no) + ": x_k must increase with k");
    rec.zeros.push_back(x);
    if (col_lambda >= 0) {
      const double lam = parse_number(fields[col_lambda], line_no);
      if (rec.has_lambda && lam != rec.lambda)
        throw InputError("line " + std::to_string(line_no) + ": lambda differs within n=" + std::to_string(n));
      rec.lambda = lam;
      rec.has_lambda = true;
    }
  }
  if (col_n < 0) throw InputError("nodal data is empty (a header n,k,x_k is required)");
  std::vector<NodalRecord> out;
  for (auto& [n, rec] : by_n) out.push_back(std::move(rec));
  return out;
}

NodalRecord to_record(int n, const NodalSet& nodes) {
  NodalRecord r;
  r.n = n;
  r.lambda = nodes.lambda;
  r.has_lambda = true;
  r.zeros = nodes.zeros;
  return r;
}

void write_reconstruction_csv(std::ostream& out, const std::vector<ReconstructionCurve>& curves) {
  out << "x,F_n,variant,n,wrap\n";
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.grid.size(); ++i)
      out << format_double(c.grid[i]) << ',' << format_double(c.values[i]) << ',' << to_string(c.variant) << ','
          << c.n << ',' << (c.wrapped[i] ? 1 : 0) << '\n';
}

}  // namespace plap
